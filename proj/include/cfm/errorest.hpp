#pragma once

#include "cfm/solve.hpp"

namespace cfm {

struct ErrorEstimate {
    double eta = 0.0;                          // energy norm
    std::vector<double> element_contributions;  // squares, summing to eta^2
};

// Auxiliary-subspace a posteriori estimate: projects the residual of `sol`
// onto the space spanned by edge modes of degree p+1 and interior bubbles of
// degrees p+1 and p+2, with homogeneous essential conditions on the Dirichlet
// boundaries of `roles`. Needs p+2 within the implemented basis range.
ErrorEstimate estimate(const AssembledSystem& sys, const Solution& sol,
                       const RoleAssignment& roles, SolveContext& ctx);

}  // namespace cfm
