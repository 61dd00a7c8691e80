#include "cfm/cdt.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

namespace cfm {

namespace {
constexpr int kNoTri = -1;
}

std::uint64_t Triangulator::pack(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
}

Triangulator::Triangulator(Vec2 lo, Vec2 hi) {
    double w = std::max(hi.x - lo.x, hi.y - lo.y);
    if (!(w > 0)) throw Error("invalid-parameter", "triangulator bounding box is degenerate");
    scale_ = w;
    double m = 10.0 * w;
    Vec2 c{0.5 * (lo.x + hi.x), 0.5 * (lo.y + hi.y)};
    // Four square corners well outside all inputs keep every real point
    // strictly interior.
    pts_ = {{c.x - m, c.y - m}, {c.x + m, c.y - m}, {c.x + m, c.y + m}, {c.x - m, c.y + m}};
    vertex_tri_ = {0, 0, 1, 1};
    Tri t0, t1;
    t0.v = {0, 1, 2};
    t0.adj = {kNoTri, 1, kNoTri};
    t0.alive = true;
    t1.v = {0, 2, 3};
    t1.adj = {kNoTri, kNoTri, 0};
    t1.alive = true;
    tris_ = {t0, t1};
    // t0 edge1 = (2,0) faces t1; t1 edge2 = (0,2) faces t0.
}

double Triangulator::orient(const Vec2& a, const Vec2& b, const Vec2& c) const {
    return (b - a).cross(c - a);
}

double Triangulator::orient(int a, int b, int c) const {
    return orient(pts_[static_cast<size_t>(a)], pts_[static_cast<size_t>(b)], pts_[static_cast<size_t>(c)]);
}

bool Triangulator::in_circle(int a, int b, int c, int d) const {
    const Vec2& pa = pts_[static_cast<size_t>(a)];
    const Vec2& pb = pts_[static_cast<size_t>(b)];
    const Vec2& pc = pts_[static_cast<size_t>(c)];
    const Vec2& pd = pts_[static_cast<size_t>(d)];
    double ax = pa.x - pd.x, ay = pa.y - pd.y;
    double bx = pb.x - pd.x, by = pb.y - pd.y;
    double cx = pc.x - pd.x, cy = pc.y - pd.y;
    double a2 = ax * ax + ay * ay;
    double b2 = bx * bx + by * by;
    double c2 = cx * cx + cy * cy;
    double det = ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) + a2 * (bx * cy - by * cx);
    double mag = (std::abs(ax) + std::abs(ay)) * (std::abs(bx) + std::abs(by)) *
                 (std::abs(cx) + std::abs(cy));
    return det > 1e-12 * mag * scale_;
}

int Triangulator::vertex_index(const Tri& t, int v) const {
    for (int i = 0; i < 3; ++i)
        if (t.v[static_cast<size_t>(i)] == v) return i;
    return -1;
}

void Triangulator::set_adj(int t, int edge, int n) {
    tris_[static_cast<size_t>(t)].adj[static_cast<size_t>(edge)] = n;
}

// Makes `n` point back at `t` across the shared edge (a,b).
void Triangulator::link(int t, int edge, int n) {
    set_adj(t, edge, n);
    if (n == kNoTri) return;
    Tri& tn = tris_[static_cast<size_t>(n)];
    int a = tris_[static_cast<size_t>(t)].v[static_cast<size_t>((edge + 1) % 3)];
    int b = tris_[static_cast<size_t>(t)].v[static_cast<size_t>((edge + 2) % 3)];
    for (int i = 0; i < 3; ++i) {
        int u = tn.v[static_cast<size_t>((i + 1) % 3)];
        int w = tn.v[static_cast<size_t>((i + 2) % 3)];
        if ((u == a && w == b) || (u == b && w == a)) {
            tn.adj[static_cast<size_t>(i)] = t;
            return;
        }
    }
    throw Error("internal", "adjacency link failed");
}

int Triangulator::locate(const Vec2& p, int* on_edge) const {
    int t = last_tri_;
    if (t < 0 || t >= static_cast<int>(tris_.size()) || !tris_[static_cast<size_t>(t)].alive)
        t = 0;
    int guard = 4 * static_cast<int>(tris_.size()) + 64;
    while (guard-- > 0) {
        const Tri& tri = tris_[static_cast<size_t>(t)];
        if (!tri.alive) throw Error("internal", "walk entered a dead triangle");
        int worst = -1;
        double worst_val = 0.0;
        double eps[3];
        double o[3];
        for (int i = 0; i < 3; ++i) {
            int a = tri.v[static_cast<size_t>((i + 1) % 3)];
            int b = tri.v[static_cast<size_t>((i + 2) % 3)];
            const Vec2& pa = pts_[static_cast<size_t>(a)];
            const Vec2& pb = pts_[static_cast<size_t>(b)];
            o[i] = orient(pa, pb, p);
            eps[i] = 1e-13 * (dist(pa, pb) + 1.0e-300) * (dist(pa, p) + dist(pb, p) + scale_ * 1e-9);
            if (o[i] < worst_val) {
                worst_val = o[i];
                worst = i;
            }
        }
        if (worst >= 0 && worst_val < -eps[worst]) {
            int next = tri.adj[static_cast<size_t>(worst)];
            if (next == kNoTri) throw Error("internal", "point outside the bounding triangulation");
            t = next;
            continue;
        }
        // Inside or on an edge.
        *on_edge = -1;
        for (int i = 0; i < 3; ++i)
            if (std::abs(o[i]) <= eps[i]) *on_edge = i;
        return t;
    }
    throw Error("internal", "point location did not terminate");
}

int Triangulator::insert_point(const Vec2& p) {
    int on_edge = -1;
    int t = locate(p, &on_edge);
    const Tri tri = tris_[static_cast<size_t>(t)];
    // Coincident with an existing vertex: reuse it.
    for (int i = 0; i < 3; ++i) {
        int v = tri.v[static_cast<size_t>(i)];
        if (dist(pts_[static_cast<size_t>(v)], p) <= 1e-12 * scale_) return v;
    }
    int np = static_cast<int>(pts_.size());
    pts_.push_back(p);
    vertex_tri_.push_back(kNoTri);

    if (on_edge < 0) {
        // 1 -> 3 split.
        int a = tri.v[0], b = tri.v[1], c = tri.v[2];
        int t0 = t;
        int t1 = static_cast<int>(tris_.size());
        int t2 = t1 + 1;
        tris_.push_back({});
        tris_.push_back({});
        tris_[static_cast<size_t>(t0)] = {{np, a, b}, {tri.adj[2], t1, t2}, true};
        tris_[static_cast<size_t>(t1)] = {{np, b, c}, {tri.adj[0], t2, t0}, true};
        tris_[static_cast<size_t>(t2)] = {{np, c, a}, {tri.adj[1], t0, t1}, true};
        link(t0, 0, tri.adj[2]);
        link(t1, 0, tri.adj[0]);
        link(t2, 0, tri.adj[1]);
        vertex_tri_[static_cast<size_t>(np)] = t0;
        vertex_tri_[static_cast<size_t>(a)] = t0;
        vertex_tri_[static_cast<size_t>(b)] = t0;
        vertex_tri_[static_cast<size_t>(c)] = t1;
        last_tri_ = t0;
        legalize(t0, 0);
        legalize(t1, 0);
        legalize(t2, 0);
        return np;
    }

    // 2 -> 4 split across edge `on_edge` of t.
    int e = on_edge;
    int s = tri.adj[static_cast<size_t>(e)];
    if (s == kNoTri) throw Error("internal", "point on hull edge of the bounding box");
    int a = tri.v[static_cast<size_t>(e)];
    int u = tri.v[static_cast<size_t>((e + 1) % 3)];
    int w = tri.v[static_cast<size_t>((e + 2) % 3)];
    const Tri stri = tris_[static_cast<size_t>(s)];
    int si = -1;
    for (int i = 0; i < 3; ++i) {
        int vv = stri.v[static_cast<size_t>(i)];
        if (vv != u && vv != w) si = i;
    }
    int b = stri.v[static_cast<size_t>(si)];
    // Neighbors of t: across (w,a) and (a,u); of s: across (u,b) and (b,w).
    int t_wa = tri.adj[static_cast<size_t>((e + 1) % 3)];
    int t_au = tri.adj[static_cast<size_t>((e + 2) % 3)];
    int s_ub = kNoTri, s_bw = kNoTri;
    for (int i = 0; i < 3; ++i) {
        int p1 = stri.v[static_cast<size_t>((i + 1) % 3)];
        int p2 = stri.v[static_cast<size_t>((i + 2) % 3)];
        if ((p1 == u && p2 == b) || (p1 == b && p2 == u)) s_ub = stri.adj[static_cast<size_t>(i)];
        if ((p1 == b && p2 == w) || (p1 == w && p2 == b)) s_bw = stri.adj[static_cast<size_t>(i)];
    }
    bool was_constrained = is_constrained(u, w);
    int ckey = was_constrained ? constraint_key(u, w) : -1;
    if (was_constrained) {
        constrained_.erase(pack(u, w));
        constraint_keys_.erase(pack(u, w));
    }

    int t1 = t;
    int t2 = s;
    int t3 = static_cast<int>(tris_.size());
    int t4 = t3 + 1;
    tris_.push_back({});
    tris_.push_back({});
    tris_[static_cast<size_t>(t1)] = {{a, u, np}, {kNoTri, kNoTri, kNoTri}, true};
    tris_[static_cast<size_t>(t2)] = {{a, np, w}, {kNoTri, kNoTri, kNoTri}, true};
    tris_[static_cast<size_t>(t3)] = {{b, np, u}, {kNoTri, kNoTri, kNoTri}, true};
    tris_[static_cast<size_t>(t4)] = {{b, w, np}, {kNoTri, kNoTri, kNoTri}, true};
    // t1=(a,u,p): e0=(u,p)->t3, e1=(p,a)->t2, e2=(a,u)->t_au
    set_adj(t1, 0, t3); set_adj(t1, 1, t2); link(t1, 2, t_au);
    // t2=(a,p,w): e0=(p,w)->t4, e1=(w,a)->t_wa, e2=(a,p)->t1
    set_adj(t2, 0, t4); link(t2, 1, t_wa); set_adj(t2, 2, t1);
    // t3=(b,p,u): e0=(p,u)->t1, e1=(u,b)->s_ub, e2=(b,p)->t4
    set_adj(t3, 0, t1); link(t3, 1, s_ub); set_adj(t3, 2, t4);
    // t4=(b,w,p): e0=(w,p)->t2, e1=(p,b)->t3, e2=(b,w)->s_bw
    set_adj(t4, 0, t2); set_adj(t4, 1, t3); link(t4, 2, s_bw);

    vertex_tri_[static_cast<size_t>(np)] = t1;
    vertex_tri_[static_cast<size_t>(a)] = t1;
    vertex_tri_[static_cast<size_t>(u)] = t1;
    vertex_tri_[static_cast<size_t>(w)] = t2;
    vertex_tri_[static_cast<size_t>(b)] = t3;
    last_tri_ = t1;

    if (was_constrained) {
        constrained_.insert(pack(u, np));
        constrained_.insert(pack(np, w));
        constraint_keys_[pack(u, np)] = ckey;
        constraint_keys_[pack(np, w)] = ckey;
    }
    legalize(t1, 2);
    legalize(t2, 1);
    legalize(t3, 1);
    legalize(t4, 2);
    return np;
}

bool Triangulator::flip(int t, int edge) {
    Tri tri = tris_[static_cast<size_t>(t)];
    int s = tri.adj[static_cast<size_t>(edge)];
    if (s == kNoTri) return false;
    int a = tri.v[static_cast<size_t>(edge)];
    int u = tri.v[static_cast<size_t>((edge + 1) % 3)];
    int w = tri.v[static_cast<size_t>((edge + 2) % 3)];
    Tri stri = tris_[static_cast<size_t>(s)];
    int si = -1;
    for (int i = 0; i < 3; ++i)
        if (stri.v[static_cast<size_t>(i)] != u && stri.v[static_cast<size_t>(i)] != w) si = i;
    int b = stri.v[static_cast<size_t>(si)];
    // Strict convexity of quad a-u-b-w.
    double e1 = orient(a, u, b);
    double e2 = orient(b, w, a);
    double m = scale_ * scale_ * 1e-13;
    if (!(e1 > m && e2 > m)) return false;

    int t_au = tri.adj[static_cast<size_t>((edge + 2) % 3)];
    int t_wa = tri.adj[static_cast<size_t>((edge + 1) % 3)];
    int s_ub = kNoTri, s_bw = kNoTri;
    for (int i = 0; i < 3; ++i) {
        int p1 = stri.v[static_cast<size_t>((i + 1) % 3)];
        int p2 = stri.v[static_cast<size_t>((i + 2) % 3)];
        if ((p1 == u && p2 == b) || (p1 == b && p2 == u)) s_ub = stri.adj[static_cast<size_t>(i)];
        if ((p1 == b && p2 == w) || (p1 == w && p2 == b)) s_bw = stri.adj[static_cast<size_t>(i)];
    }
    // t := (a,u,b), s := (a,b,w)
    tris_[static_cast<size_t>(t)] = {{a, u, b}, {kNoTri, kNoTri, kNoTri}, true};
    tris_[static_cast<size_t>(s)] = {{a, b, w}, {kNoTri, kNoTri, kNoTri}, true};
    // t edges: e0=(u,b)->s_ub, e1=(b,a)->s, e2=(a,u)->t_au
    link(t, 0, s_ub); set_adj(t, 1, s); link(t, 2, t_au);
    // s edges: e0=(b,w)->s_bw, e1=(w,a)->t_wa, e2=(a,b)->t
    link(s, 0, s_bw); link(s, 1, t_wa); set_adj(s, 2, t);
    vertex_tri_[static_cast<size_t>(a)] = t;
    vertex_tri_[static_cast<size_t>(b)] = t;
    vertex_tri_[static_cast<size_t>(u)] = t;
    vertex_tri_[static_cast<size_t>(w)] = s;
    return true;
}

void Triangulator::legalize(int t0, int e0) {
    std::vector<std::pair<int, int>> stack{{t0, e0}};
    int guard = 64 * static_cast<int>(tris_.size()) + 1024;
    while (!stack.empty()) {
        if (guard-- <= 0) throw Error("internal", "legalization did not terminate");
        auto [t, e] = stack.back();
        stack.pop_back();
        if (!tris_[static_cast<size_t>(t)].alive) continue;
        const Tri& tri = tris_[static_cast<size_t>(t)];
        int s = tri.adj[static_cast<size_t>(e)];
        if (s == kNoTri) continue;
        int u = tri.v[static_cast<size_t>((e + 1) % 3)];
        int w = tri.v[static_cast<size_t>((e + 2) % 3)];
        if (is_constrained(u, w)) continue;
        const Tri& stri = tris_[static_cast<size_t>(s)];
        int b = -1;
        for (int i = 0; i < 3; ++i)
            if (stri.v[static_cast<size_t>(i)] != u && stri.v[static_cast<size_t>(i)] != w)
                b = stri.v[static_cast<size_t>(i)];
        if (!in_circle(tri.v[0], tri.v[1], tri.v[2], b)) continue;
        int a = tri.v[static_cast<size_t>(e)];
        if (!flip(t, e)) continue;
        // After the flip t=(a,u,b), s=(a,b,w); re-check their outer edges.
        int ti = vertex_index(tris_[static_cast<size_t>(t)], a);
        int si = vertex_index(tris_[static_cast<size_t>(s)], a);
        stack.push_back({t, ti});  // edge (u,b)
        stack.push_back({s, si});  // edge (b,w)
    }
}

bool Triangulator::edge_exists(int a, int b) const {
    int dummy;
    return tri_with_edge(a, b, &dummy) != kNoTri;
}

bool Triangulator::is_constrained(int a, int b) const {
    return constrained_.count(pack(a, b)) > 0;
}

int Triangulator::constraint_key(int a, int b) const {
    auto it = constraint_keys_.find(pack(a, b));
    return it == constraint_keys_.end() ? -1 : it->second;
}

int Triangulator::tri_with_edge(int a, int b, int* edge_out) const {
    // Circulate the fan of `a`.
    int t0 = vertex_tri_[static_cast<size_t>(a)];
    if (t0 == kNoTri) return kNoTri;
    int t = t0;
    bool reversed = false;
    int guard = 2 * static_cast<int>(tris_.size()) + 16;
    while (guard-- > 0) {
        const Tri& tri = tris_[static_cast<size_t>(t)];
        int i = vertex_index(tri, a);
        if (i < 0) throw Error("internal", "fan walk lost its vertex");
        for (int k = 0; k < 3; ++k) {
            int u = tri.v[static_cast<size_t>((k + 1) % 3)];
            int w = tri.v[static_cast<size_t>((k + 2) % 3)];
            if ((u == a && w == b) || (u == b && w == a)) {
                *edge_out = k;
                return t;
            }
        }
        int next = tri.adj[static_cast<size_t>(reversed ? (i + 2) % 3 : (i + 1) % 3)];
        if (next == kNoTri) {
            if (reversed) return kNoTri;
            reversed = true;
            t = t0;
            continue;
        }
        t = next;
        if (t == t0) return kNoTri;
    }
    throw Error("internal", "fan walk did not terminate");
}

namespace {
bool proper_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d, double scale) {
    auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
        return (q - p).cross(r - p);
    };
    double eps = 1e-13 * scale * scale;
    double o1 = orient(a, b, c), o2 = orient(a, b, d);
    double o3 = orient(c, d, a), o4 = orient(c, d, b);
    return ((o1 > eps && o2 < -eps) || (o1 < -eps && o2 > eps)) &&
           ((o3 > eps && o4 < -eps) || (o3 < -eps && o4 > eps));
}
}  // namespace

void Triangulator::insert_constraint(int a, int b, int key,
                                     const std::vector<std::string>& key_names) {
    if (a == b) throw Error("invalid-parameter", "constraint is a single point");
    auto mark = [&]() {
        constrained_.insert(pack(a, b));
        constraint_keys_[pack(a, b)] = key;
    };
    if (edge_exists(a, b)) {
        mark();
        return;
    }
    const Vec2& pa = pts_[static_cast<size_t>(a)];
    const Vec2& pb = pts_[static_cast<size_t>(b)];

    auto name_of = [&](int k) -> std::string {
        if (k >= 0 && k < static_cast<int>(key_names.size())) return key_names[static_cast<size_t>(k)];
        return "segment " + std::to_string(k);
    };

    int guard = 200 * static_cast<int>(tris_.size()) + 4096;
    while (!edge_exists(a, b)) {
        if (guard-- <= 0) throw Error("internal", "constraint recovery did not terminate");
        // Find the triangle in a's fan whose opposite edge crosses a-b.
        int t0 = vertex_tri_[static_cast<size_t>(a)];
        int t = t0;
        bool reversed = false;
        int found = kNoTri, fedge = -1;
        int fan_guard = 2 * static_cast<int>(tris_.size()) + 16;
        while (fan_guard-- > 0) {
            const Tri& tri = tris_[static_cast<size_t>(t)];
            int i = vertex_index(tri, a);
            int u = tri.v[static_cast<size_t>((i + 1) % 3)];
            int w = tri.v[static_cast<size_t>((i + 2) % 3)];
            if (proper_cross(pa, pb, pts_[static_cast<size_t>(u)], pts_[static_cast<size_t>(w)], scale_)) {
                found = t;
                fedge = i;
                break;
            }
            int next = tri.adj[static_cast<size_t>(reversed ? (i + 2) % 3 : (i + 1) % 3)];
            if (next == kNoTri) {
                if (reversed) break;
                reversed = true;
                t = t0;
                continue;
            }
            t = next;
            if (t == t0) break;
        }
        if (found == kNoTri)
            throw Error("internal", "constraint recovery found no crossing edge");
        int u = tris_[static_cast<size_t>(found)].v[static_cast<size_t>((fedge + 1) % 3)];
        int w = tris_[static_cast<size_t>(found)].v[static_cast<size_t>((fedge + 2) % 3)];
        if (is_constrained(u, w)) {
            int other = constraint_key(u, w);
            throw Error("geometry-conflict",
                        name_of(key) + " intersects " + name_of(other));
        }
        if (!flip(found, fedge)) {
            // Not convex here; flip a crossing edge further along the segment.
            int t2 = tris_[static_cast<size_t>(found)].adj[static_cast<size_t>(fedge)];
            bool advanced = false;
            int march_guard = static_cast<int>(tris_.size()) + 8;
            int prev_u = u, prev_w = w;
            while (t2 != kNoTri && march_guard-- > 0) {
                const Tri& tri2 = tris_[static_cast<size_t>(t2)];
                if (vertex_index(tri2, b) >= 0) break;
                int nedge = -1;
                for (int k = 0; k < 3; ++k) {
                    int u2 = tri2.v[static_cast<size_t>((k + 1) % 3)];
                    int w2 = tri2.v[static_cast<size_t>((k + 2) % 3)];
                    if ((u2 == prev_u && w2 == prev_w) || (u2 == prev_w && w2 == prev_u)) continue;
                    if (proper_cross(pa, pb, pts_[static_cast<size_t>(u2)], pts_[static_cast<size_t>(w2)], scale_)) {
                        nedge = k;
                        break;
                    }
                }
                if (nedge < 0) break;
                int u2 = tri2.v[static_cast<size_t>((nedge + 1) % 3)];
                int w2 = tri2.v[static_cast<size_t>((nedge + 2) % 3)];
                if (is_constrained(u2, w2)) {
                    int other = constraint_key(u2, w2);
                    throw Error("geometry-conflict", name_of(key) + " intersects " + name_of(other));
                }
                if (flip(t2, nedge)) {
                    advanced = true;
                    break;
                }
                prev_u = u2;
                prev_w = w2;
                t2 = tri2.adj[static_cast<size_t>(nedge)];
            }
            if (!advanced && !edge_exists(a, b)) {
                // A later pass usually unlocks the quad; retry from scratch.
                continue;
            }
        }
    }
    mark();
}

void Triangulator::make_delaunay() {
    for (int pass = 0; pass < 200; ++pass) {
        bool changed = false;
        for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
            if (!tris_[static_cast<size_t>(t)].alive) continue;
            for (int e = 0; e < 3; ++e) {
                const Tri& tri = tris_[static_cast<size_t>(t)];
                int s = tri.adj[static_cast<size_t>(e)];
                if (s == kNoTri || s < t) continue;
                int u = tri.v[static_cast<size_t>((e + 1) % 3)];
                int w = tri.v[static_cast<size_t>((e + 2) % 3)];
                if (is_constrained(u, w)) continue;
                const Tri& stri = tris_[static_cast<size_t>(s)];
                int bb = -1;
                for (int i = 0; i < 3; ++i)
                    if (stri.v[static_cast<size_t>(i)] != u && stri.v[static_cast<size_t>(i)] != w)
                        bb = stri.v[static_cast<size_t>(i)];
                if (in_circle(tri.v[0], tri.v[1], tri.v[2], bb) && flip(t, e)) changed = true;
            }
        }
        if (!changed) return;
    }
}

void Triangulator::smooth(const std::unordered_set<int>& fixed_vertices, int passes) {
    for (int pass = 0; pass < passes; ++pass) {
        for (int v = super_vertex_count(); v < static_cast<int>(pts_.size()); ++v) {
            if (fixed_vertices.count(v)) continue;
            // Collect the fan.
            int t0 = vertex_tri_[static_cast<size_t>(v)];
            if (t0 == kNoTri) continue;
            std::vector<int> fan;
            Vec2 sum{0, 0};
            int cnt = 0;
            int t = t0;
            int guard = 2 * static_cast<int>(tris_.size()) + 8;
            bool closed = true;
            while (guard-- > 0) {
                fan.push_back(t);
                const Tri& tri = tris_[static_cast<size_t>(t)];
                int i = vertex_index(tri, v);
                int u = tri.v[static_cast<size_t>((i + 1) % 3)];
                sum = sum + pts_[static_cast<size_t>(u)];
                ++cnt;
                int next = tri.adj[static_cast<size_t>((i + 1) % 3)];
                if (next == kNoTri) {
                    closed = false;
                    break;
                }
                t = next;
                if (t == t0) break;
            }
            if (!closed || cnt < 3) continue;
            Vec2 target = sum * (1.0 / cnt);
            Vec2 old = pts_[static_cast<size_t>(v)];
            pts_[static_cast<size_t>(v)] = target;
            bool ok = true;
            for (int ft : fan) {
                const Tri& tri = tris_[static_cast<size_t>(ft)];
                if (orient(tri.v[0], tri.v[1], tri.v[2]) <= 1e-13 * scale_ * scale_) {
                    ok = false;
                    break;
                }
            }
            if (!ok) pts_[static_cast<size_t>(v)] = old;
        }
        make_delaunay();
    }
}

std::vector<int> Triangulator::classify_regions(int* num_regions) const {
    std::vector<int> label(tris_.size(), -1);
    int next_label = 0;
    auto bfs = [&](int seed, int lab) {
        std::vector<int> stack{seed};
        label[static_cast<size_t>(seed)] = lab;
        while (!stack.empty()) {
            int t = stack.back();
            stack.pop_back();
            const Tri& tri = tris_[static_cast<size_t>(t)];
            for (int e = 0; e < 3; ++e) {
                int s = tri.adj[static_cast<size_t>(e)];
                if (s == kNoTri || label[static_cast<size_t>(s)] >= 0) continue;
                int u = tri.v[static_cast<size_t>((e + 1) % 3)];
                int w = tri.v[static_cast<size_t>((e + 2) % 3)];
                if (is_constrained(u, w)) continue;
                label[static_cast<size_t>(s)] = lab;
                stack.push_back(s);
            }
        }
    };
    // Seed the outside from a triangle touching a super vertex.
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
        const Tri& tri = tris_[static_cast<size_t>(t)];
        if (!tri.alive) continue;
        if (tri.v[0] < 4 || tri.v[1] < 4 || tri.v[2] < 4) {
            bfs(t, next_label++);
            break;
        }
    }
    for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
        if (!tris_[static_cast<size_t>(t)].alive || label[static_cast<size_t>(t)] >= 0) continue;
        bfs(t, next_label++);
    }
    *num_regions = next_label;
    return label;
}

}  // namespace cfm
