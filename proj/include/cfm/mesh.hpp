#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "cfm/geometry.hpp"

namespace cfm {

// Exact circular-arc geometry attached to a boundary edge whose endpoints lie
// on the arc. Used by the blended element maps; split exactly under grading.
struct ArcGeom {
    Vec2 center;
    double radius = 0.0;
    double theta0 = 0.0;  // angle of the edge's first node
    double theta1 = 0.0;  // angle of the second node (signed sweep)

    Vec2 point(double t) const {
        double th = theta0 + t * (theta1 - theta0);
        return center + radius * Vec2{std::cos(th), std::sin(th)};
    }
    Vec2 derivative(double t) const {
        double th = theta0 + t * (theta1 - theta0);
        double s = radius * (theta1 - theta0);
        return {-s * std::sin(th), s * std::cos(th)};
    }
    // Signed area between the chord and the arc as a boundary correction for
    // domain-on-the-left traversal.
    double segment_area() const;
};

struct BoundaryTag {
    enum class Kind { Gamma, Hole, Cut };
    Kind kind = Kind::Gamma;
    int id = 0;    // gamma number 1..4, or hole id (slits continue hole ids)
    int side = 0;  // cuts only: 0 = side A, 1 = side B

    bool operator==(const BoundaryTag&) const = default;
};

std::string tag_to_string(const BoundaryTag& tag);
BoundaryTag tag_from_string(const std::string& s);

// Boundary edge stored in traversal order: the domain lies on the left of
// nodes[0] -> nodes[1].
struct BoundaryEdge {
    std::array<int, 2> nodes{};
    BoundaryTag tag;
    std::optional<ArcGeom> arc;
};

struct GradingRule {
    double q = 0.15;
    int levels = 0;

    void validate() const {
        if (!(q > 0.0) || !(q < 1.0)) throw Error("invalid-parameter", "grading ratio q must be in (0,1)");
        if (levels < 0) throw Error("invalid-parameter", "grading levels must be >= 0");
    }
};

// Conforming triangular mesh with cut (zero-area slit) topology. Nodes along
// a cut are duplicated except the two tip nodes, which both sides share.
struct Mesh {
    std::vector<Vec2> nodes;
    std::vector<std::array<int, 3>> elements;  // positively oriented
    std::vector<BoundaryEdge> boundary;
    std::vector<std::array<int, 2>> cut_pairs;  // (side A, side B) boundary indices
    std::array<int, 4> corner_nodes{-1, -1, -1, -1};
    std::vector<int> singular_nodes;
    int num_holes = 0;  // geometric holes plus slits

    int node_count() const { return static_cast<int>(nodes.size()); }
    int element_count() const { return static_cast<int>(elements.size()); }

    double element_area(int t) const;
    // Sum of straight element areas plus exact circular-segment corrections,
    // i.e. the area of the curved computational domain.
    double domain_area() const;

    // Structural checks: positive orientation, conformity (interior edges
    // shared by exactly 2 elements, boundary/cut edges by 1), one tag per
    // boundary edge, cut pairing. Throws on violation.
    void validate() const;
};

// Derived edge table: unique undirected node-pair edges with element counts.
struct EdgeTable {
    std::vector<std::array<int, 2>> edges;          // sorted pairs
    std::vector<std::array<int, 2>> edge_elements;  // adjacent elements, -1 if none
    std::vector<std::array<int, 3>> element_edges;  // per element, edge ids
    int find(int a, int b) const;                   // -1 if absent
};
EdgeTable build_edge_table(const Mesh& mesh);

// --- generation and grading ------------------------------------------------

Mesh generate_mesh(const DomainSpec& spec, double target_h);
Mesh grade_toward_singularities(const Mesh& mesh, const GradingRule& rule);

// --- Euler defect arithmetic -------------------------------------------------

struct EulerReport {
    long long lhs = 0;
    long long rhs = 0;
    bool valid = false;
};

// Vertex/face defect balance 4*chi for a closed orientable polygonal surface
// of genus g. Inputs failing the handshake sum(val) == sum(k_f) == 2E are
// rejected as malformed.
EulerReport euler_defect_check(const std::vector<int>& valences,
                               const std::vector<int>& face_sizes, int genus);

// --- file format -------------------------------------------------------------

void save_mesh(const Mesh& mesh, const std::string& path);
Mesh load_mesh(const std::string& path);
std::string mesh_to_json(const Mesh& mesh);
Mesh mesh_from_json(const std::string& text);

}  // namespace cfm
