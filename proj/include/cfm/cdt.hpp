#pragma once

#include <cstdint>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cfm/common.hpp"

namespace cfm {

// Constrained Delaunay triangulation by incremental insertion with Lawson
// flips and Sloan-style constraint recovery. Intended for the benign inputs
// produced by boundary sampling: no vertex lies in the interior of a
// constraint segment, constraints do not cross.
class Triangulator {
public:
    struct Tri {
        std::array<int, 3> v{};    // CCW vertices
        std::array<int, 3> adj{};  // adj[i] is across edge (v[i+1], v[i+2]); -1 at hull
        bool alive = false;
    };

    // `lo`/`hi` must bound every point inserted later.
    Triangulator(Vec2 lo, Vec2 hi);

    int insert_point(const Vec2& p);
    // Recovers edge a-b and marks it constrained; `key` identifies the source
    // segment for conflict reporting.
    void insert_constraint(int a, int b, int key,
                           const std::vector<std::string>& key_names);
    // Lawson sweeps until every non-constrained edge is locally Delaunay.
    void make_delaunay();
    // Averages each movable vertex into its neighbors while keeping all
    // incident triangles positively oriented.
    void smooth(const std::unordered_set<int>& fixed_vertices, int passes);

    // Flood fill bounded by constrained edges: label 0 contains the enclosing
    // box corners (the outside); labels 1.. are interior regions.
    std::vector<int> classify_regions(int* num_regions) const;

    bool edge_exists(int a, int b) const;
    bool is_constrained(int a, int b) const;
    int constraint_key(int a, int b) const;  // -1 if not constrained

    const std::vector<Vec2>& points() const { return pts_; }
    const std::vector<Tri>& triangles() const { return tris_; }
    int super_vertex_count() const { return 4; }

private:
    std::vector<Vec2> pts_;
    std::vector<Tri> tris_;
    std::vector<int> vertex_tri_;  // one live triangle containing the vertex
    std::unordered_set<std::uint64_t> constrained_;
    std::unordered_map<std::uint64_t, int> constraint_keys_;
    double scale_ = 1.0;
    int last_tri_ = 0;

    static std::uint64_t pack(int a, int b);
    double orient(int a, int b, int c) const;
    double orient(const Vec2& a, const Vec2& b, const Vec2& c) const;
    bool in_circle(int a, int b, int c, int d) const;
    int locate(const Vec2& p, int* on_edge) const;
    void legalize(int t, int edge);
    bool flip(int t, int edge);
    int tri_with_edge(int a, int b, int* edge_out) const;
    int vertex_index(const Tri& t, int v) const;
    void set_adj(int t, int edge, int n);
    void link(int t, int edge, int n);
};

}  // namespace cfm
