#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cfm/common.hpp"

namespace cfm {

// ---------------------------------------------------------------------------
// Surface charts
// ---------------------------------------------------------------------------

// Parameterized surface patch x_S : (u,v) -> R^3 with an analytically coded
// Jacobian. Charts are immutable after construction and safe for concurrent
// read-only evaluation.
class SurfaceChart {
public:
    virtual ~SurfaceChart() = default;

    virtual Eigen::Vector3d position(double u, double v) const = 0;
    virtual Eigen::Matrix<double, 3, 2> jacobian(double u, double v) const = 0;

    // True only for the planar chart; assembly then bypasses per-point
    // metric evaluation and uses the exact identity coefficient.
    virtual bool is_identity() const { return false; }

    virtual std::string name() const = 0;

    // First fundamental form G_S = J^T J.
    Eigen::Matrix2d first_fundamental(double u, double v) const;
};

// Symmetric positive definite coefficient matrix G_S^{-1} sqrt(det G_S) of
// the planar-equivalent variable-coefficient problem. Throws
// "metric-degenerate" with the location if G_S is singular there.
Eigen::Matrix2d metric_coefficient(const SurfaceChart& chart, const Vec2& p);

class PlaneChart final : public SurfaceChart {
public:
    Eigen::Vector3d position(double u, double v) const override;
    Eigen::Matrix<double, 3, 2> jacobian(double u, double v) const override;
    bool is_identity() const override { return true; }
    std::string name() const override { return "plane"; }
};

// Torus of revolution described by its inner and outer radii. The tube
// radius is (R-r)/2 and the center-line radius (R+r)/2, so (r,R) = (1/2,3/2)
// gives T(u,v) = ((1 + cos(u)/2) cos v, (1 + cos(u)/2) sin v, sin(u)/2).
class TorusChart final : public SurfaceChart {
public:
    TorusChart(double inner_radius, double outer_radius);
    Eigen::Vector3d position(double u, double v) const override;
    Eigen::Matrix<double, 3, 2> jacobian(double u, double v) const override;
    std::string name() const override { return "torus"; }

    double tube_radius() const { return tube_; }
    double center_radius() const { return center_; }

private:
    double tube_;
    double center_;
};

// Hemisphere over the circumscribed sphere of a rectangle: (u,v) maps to
// (u, v, sqrt(R^2 - |(u,v)-c|^2)) with c the rectangle center and R the
// center-to-corner distance, so all four corners sit at height zero.
class HemisphereChart final : public SurfaceChart {
public:
    HemisphereChart(const Vec2& rect_min, const Vec2& rect_max);
    Eigen::Vector3d position(double u, double v) const override;
    Eigen::Matrix<double, 3, 2> jacobian(double u, double v) const override;
    std::string name() const override { return "hemisphere"; }

    double sphere_radius() const { return radius_; }
    Vec2 center() const { return center_; }

private:
    Vec2 center_;
    double radius_;
};

std::shared_ptr<const SurfaceChart> make_plane_chart();
std::shared_ptr<const SurfaceChart> make_torus_chart(double inner_radius,
                                                     double outer_radius);
std::shared_ptr<const SurfaceChart> make_hemisphere_chart(const Vec2& rect_min,
                                                          const Vec2& rect_max);

// ---------------------------------------------------------------------------
// Planar domain description
// ---------------------------------------------------------------------------

enum class SegmentKind { Polyline, Arc };

// One boundary piece: either an open polyline (>= 2 distinct points) or a
// circular arc (center, radius, start/end angles; positive sweep is CCW).
struct CurveSegment {
    SegmentKind kind = SegmentKind::Polyline;

    // Polyline data.
    std::vector<Vec2> points;

    // Arc data.
    Vec2 center;
    double radius = 0.0;
    double theta0 = 0.0;
    double theta1 = 0.0;

    static CurveSegment polyline(std::vector<Vec2> pts);
    static CurveSegment arc(Vec2 center, double radius, double theta0, double theta1);

    Vec2 start() const;
    Vec2 end() const;
    double length() const;
    // Unit tangent at the start/end point, in traversal direction.
    Vec2 start_tangent() const;
    Vec2 end_tangent() const;
    void validate() const;
};

// Multiply connected quadrilateral: outer boundary chain split into four arcs
// gamma_1..gamma_4 by the corner points, plus hole chains and open slit
// polylines, on an optional surface chart (plane if unset).
struct DomainSpec {
    std::vector<CurveSegment> outer;   // closed positively oriented chain
    std::array<int, 4> corners{};      // outer segment indices; z_k starts segment corners[k]
    std::vector<std::vector<CurveSegment>> holes;  // closed chains strictly inside
    std::vector<std::vector<Vec2>> slits;          // open polylines strictly inside
    std::shared_ptr<const SurfaceChart> chart;     // nullptr means plane
    std::vector<Vec2> extra_singular_points;       // user-added grading centers

    const SurfaceChart& chart_or_plane() const;
    Vec2 corner_point(int k) const;  // k in 0..3
    // Index of the gamma arc (1..4) that outer segment `seg` belongs to.
    int gamma_of_segment(int seg) const;
    int hole_count() const { return static_cast<int>(holes.size() + slits.size()); }
    void validate() const;
};

// Reads a domain configuration file (schema in README). Seeded random slit
// batches are expanded here so the result is fully concrete. `seed_override`
// replaces the seed stored in the file when nonnegative.
DomainSpec load_domain_spec(const std::string& path, long seed_override = -1);
DomainSpec parse_domain_spec(const std::string& json_text, long seed_override = -1);

// Deterministic random slit placement (documented in README): mt19937_64
// stream mapped to [0,1) via the 53-bit ladder, rejection sampling keeps
// slits inside `box` with pairwise clearance.
std::vector<std::vector<Vec2>> generate_random_slits(int count, std::uint64_t seed,
                                                     Vec2 box_min, Vec2 box_max,
                                                     double len_min, double len_max);

}  // namespace cfm
