#include <algorithm>
#include <cmath>
#include <map>

#include "cfm/mesh.hpp"

namespace cfm {

namespace {

// Split position on edge (s, x) a fraction q away from the singular end s.
// Boundary edges carrying arc geometry are split on the arc so curved
// elements keep representing the true boundary exactly.
struct EdgeSplit {
    int node;                          // new node id
    std::optional<ArcGeom> arc_to_s;   // sub-arc between s and the new node
    std::optional<ArcGeom> arc_to_x;   // sub-arc between the new node and x
};

}  // namespace

Mesh grade_toward_singularities(const Mesh& input, const GradingRule& rule) {
    rule.validate();
    Mesh mesh = input;
    if (rule.levels == 0 || mesh.singular_nodes.empty()) return mesh;

    // Two flagged vertices sharing an element cannot both be graded.
    {
        std::vector<char> flagged(static_cast<size_t>(mesh.node_count()), 0);
        for (int s : mesh.singular_nodes) flagged[static_cast<size_t>(s)] = 1;
        for (const auto& el : mesh.elements) {
            std::vector<int> hits;
            for (int k = 0; k < 3; ++k)
                if (flagged[static_cast<size_t>(el[static_cast<size_t>(k)])])
                    hits.push_back(el[static_cast<size_t>(k)]);
            if (hits.size() >= 2)
                throw Error("grading-conflict",
                            "singular vertices " + std::to_string(hits[0]) + " and " +
                                std::to_string(hits[1]) + " share an element; reduce h");
        }
    }

    const double q = rule.q;

    for (int s : mesh.singular_nodes) {
        for (int level = 0; level < rule.levels; ++level) {
            // Boundary lookup for this pass.
            std::map<std::pair<int, int>, int> boundary_index;
            for (int b = 0; b < static_cast<int>(mesh.boundary.size()); ++b) {
                const auto& be = mesh.boundary[static_cast<size_t>(b)];
                std::pair<int, int> key{std::min(be.nodes[0], be.nodes[1]),
                                        std::max(be.nodes[0], be.nodes[1])};
                boundary_index[key] = b;
            }

            std::map<std::pair<int, int>, EdgeSplit> split_cache;
            auto split_edge = [&](int x) -> EdgeSplit {
                std::pair<int, int> key{std::min(s, x), std::max(s, x)};
                auto it = split_cache.find(key);
                if (it != split_cache.end()) return it->second;
                EdgeSplit sp;
                auto bit = boundary_index.find(key);
                const ArcGeom* arc = nullptr;
                bool s_first = true;
                if (bit != boundary_index.end()) {
                    const auto& be = mesh.boundary[static_cast<size_t>(bit->second)];
                    if (be.arc) {
                        arc = &*be.arc;
                        s_first = be.nodes[0] == s;
                    }
                }
                Vec2 p;
                if (arc) {
                    double t = s_first ? q : 1.0 - q;
                    p = arc->point(t);
                    ArcGeom first = *arc, second = *arc;
                    double tm = arc->theta0 + t * (arc->theta1 - arc->theta0);
                    first.theta1 = tm;
                    second.theta0 = tm;
                    // first covers [node0, split], second [split, node1].
                    if (s_first) {
                        sp.arc_to_s = first;
                        sp.arc_to_x = second;
                    } else {
                        sp.arc_to_x = first;
                        sp.arc_to_s = second;
                    }
                } else {
                    const Vec2& ps = mesh.nodes[static_cast<size_t>(s)];
                    const Vec2& px = mesh.nodes[static_cast<size_t>(x)];
                    p = ps + q * (px - ps);
                }
                sp.node = mesh.node_count();
                mesh.nodes.push_back(p);
                split_cache.emplace(key, sp);

                // Replace a split boundary edge by its two halves.
                if (bit != boundary_index.end()) {
                    int b = bit->second;
                    BoundaryEdge be = mesh.boundary[static_cast<size_t>(b)];
                    BoundaryEdge first = be, second = be;
                    if (be.nodes[0] == s) {
                        first.nodes = {s, sp.node};
                        second.nodes = {sp.node, be.nodes[1]};
                        if (be.arc) {
                            first.arc = sp.arc_to_s;
                            second.arc = sp.arc_to_x;
                        }
                    } else {
                        first.nodes = {be.nodes[0], sp.node};
                        second.nodes = {sp.node, s};
                        if (be.arc) {
                            first.arc = sp.arc_to_x;
                            second.arc = sp.arc_to_s;
                        }
                    }
                    mesh.boundary[static_cast<size_t>(b)] = first;
                    mesh.boundary.push_back(second);
                }
                return sp;
            };

            int ne = mesh.element_count();
            for (int t = 0; t < ne; ++t) {
                auto el = mesh.elements[static_cast<size_t>(t)];
                int rot = -1;
                for (int k = 0; k < 3; ++k)
                    if (el[static_cast<size_t>(k)] == s) rot = k;
                if (rot < 0) continue;
                std::array<int, 3> o{el[static_cast<size_t>(rot)],
                                     el[static_cast<size_t>((rot + 1) % 3)],
                                     el[static_cast<size_t>((rot + 2) % 3)]};
                int a = o[1], b = o[2];
                EdgeSplit pa = split_edge(a);
                EdgeSplit pb = split_edge(b);
                mesh.elements[static_cast<size_t>(t)] = {s, pa.node, pb.node};
                mesh.elements.push_back({pa.node, a, b});
                mesh.elements.push_back({pa.node, b, pb.node});
            }
        }
    }

    // Cut twins may both have been split; re-pair by exact coordinates.
    if (!mesh.cut_pairs.empty()) {
        mesh.cut_pairs.clear();
        std::map<std::pair<std::pair<double, double>, std::pair<double, double>>, int> a_side;
        for (int b = 0; b < static_cast<int>(mesh.boundary.size()); ++b) {
            const auto& be = mesh.boundary[static_cast<size_t>(b)];
            if (be.tag.kind != BoundaryTag::Kind::Cut || be.tag.side != 0) continue;
            const Vec2& p0 = mesh.nodes[static_cast<size_t>(be.nodes[0])];
            const Vec2& p1 = mesh.nodes[static_cast<size_t>(be.nodes[1])];
            a_side[{{p0.x, p0.y}, {p1.x, p1.y}}] = b;
        }
        for (int b = 0; b < static_cast<int>(mesh.boundary.size()); ++b) {
            const auto& be = mesh.boundary[static_cast<size_t>(b)];
            if (be.tag.kind != BoundaryTag::Kind::Cut || be.tag.side != 1) continue;
            const Vec2& p0 = mesh.nodes[static_cast<size_t>(be.nodes[0])];
            const Vec2& p1 = mesh.nodes[static_cast<size_t>(be.nodes[1])];
            auto it = a_side.find({{p1.x, p1.y}, {p0.x, p0.y}});
            if (it == a_side.end()) throw Error("internal", "cut twin lost during grading");
            mesh.cut_pairs.push_back({it->second, b});
        }
    }

    mesh.validate();
    return mesh;
}

}  // namespace cfm
