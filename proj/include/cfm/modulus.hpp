#pragma once

#include "cfm/conjugate.hpp"

namespace cfm {

double reciprocal_error(double M, double Mt);

struct CanonicalSlit {
    Vec2 zeta;        // left endpoint in the canonical rectangle
    double length;    // horizontal extent
    double height;    // M * delta_i
    double spread;    // max vertical spread over the sampled boundary
    int hole = 0;
};

// Rectangle (0,1) x (0,h) minus horizontal slits.
struct CanonicalDomain {
    double h = 0.0;
    std::vector<CanonicalSlit> slits;
};

struct ModulusReport {
    double M = 0.0;
    double Mt = 0.0;
    double reci = 0.0;
    double h = 0.0;  // canonical rectangle height, = M
    Eigen::VectorXd delta;
    bool delta_in_range = true;
    CanonicalDomain canonical;
    std::array<Vec2, 4> corner_images{};  // Phi(z_1..z_4)
    double eta_primary = -1.0;            // energy-norm estimates when computed
    double eta_conjugate = -1.0;
};

// Conformal map Phi = (u, M * u~) onto [0,1] x [0,M]. With the quadrilateral
// convention used here, corner z_2 lands at the origin; corner images are
// reported so downstream consumers can fix their own orientation.
class ConformalMap {
public:
    ConformalMap(const AssembledSystem* sys, const Eigen::VectorXd* u,
                 const Eigen::VectorXd* v, double M)
        : sys_(sys), u_(u), v_(v), M_(M) {}

    Vec2 eval(int element, const Vec2& ref) const;
    double modulus() const { return M_; }
    const AssembledSystem& system() const { return *sys_; }

    // Locates the element containing a parameter-plane point (linear scan
    // with barycentric tests) and evaluates there.
    Vec2 eval_point(const Vec2& parameter_point) const;

private:
    const AssembledSystem* sys_;
    const Eigen::VectorXd* u_;
    const Eigen::VectorXd* v_;
    double M_;
};

// Boundary samples of one hole: (element, reference point) pairs walking the
// hole's boundary edges (both sides of a cut).
struct BoundarySample {
    int element;
    Vec2 ref;
};
std::vector<BoundarySample> sample_hole_boundary(const AssembledSystem& sys, int hole,
                                                 int samples_per_hole);

CanonicalDomain extract_canonical(const ConformalMap& map, const ConjugateSetup& setup,
                                  int samples_per_hole = 200);

struct MapSample {
    int element;
    Vec2 ref;
    Vec2 domain;     // parameter-plane point
    Vec2 canonical;  // Phi image
    int checker;     // parity of (floor(k u) + floor(k v / M))
};

// Deterministic per-element tensor sampling, cut-aware because each element
// carries its own side of a cut.
std::vector<MapSample> sample_map(const ConformalMap& map, int density, int checker_k);

ModulusReport build_report(const AssembledSystem& sys, const Solution& u,
                           const Solution& v, const ConjugateSetup& setup,
                           int samples_per_hole = 200);

}  // namespace cfm
