#pragma once

#include <string>
#include <vector>

#include "cfm/pipeline.hpp"

namespace cfm {

// Canonical rectangle with its horizontal slits (slits drawn in red).
std::string svg_canonical(const CanonicalDomain& cd);

// Parameter-plane checkerboard rendering of the conformal map from the
// per-element tensor samples produced by sample_map.
std::string svg_checkerboard(const Mesh& mesh, const std::vector<MapSample>& samples,
                             int density);

// Log-log convergence plot: reciprocal error (solid) and the relative
// squared auxiliary estimates for the primary (dashed) and conjugate
// (dotted) problems versus the dof count.
std::string svg_convergence(const std::vector<StudyRow>& rows);

// Plain mesh wireframe, cuts highlighted.
std::string svg_mesh(const Mesh& mesh);

}  // namespace cfm
