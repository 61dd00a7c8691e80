#include "cfm/modulus.hpp"

#include <algorithm>
#include <cmath>

namespace cfm {

double reciprocal_error(double M, double Mt) {
    if (!(M > 0.0) || !(Mt > 0.0))
        throw Error("invalid-parameter", "moduli must be positive");
    return std::abs(M * Mt - 1.0);
}

Vec2 ConformalMap::eval(int element, const Vec2& ref) const {
    EvalResult ru = evaluate(*sys_, *u_, element, ref);
    EvalResult rv = evaluate(*sys_, *v_, element, ref);
    return {ru.value, M_ * rv.value};
}

Vec2 ConformalMap::eval_point(const Vec2& p) const {
    const Mesh& mesh = *sys_->mesh;
    for (int t = 0; t < mesh.element_count(); ++t) {
        const auto& el = mesh.elements[static_cast<size_t>(t)];
        const Vec2& a = mesh.nodes[static_cast<size_t>(el[0])];
        const Vec2& b = mesh.nodes[static_cast<size_t>(el[1])];
        const Vec2& c = mesh.nodes[static_cast<size_t>(el[2])];
        double det = (b - a).cross(c - a);
        double xi = (p - a).cross(c - a) / det;
        double eta = (b - a).cross(p - a) / det;
        if (xi >= -1e-12 && eta >= -1e-12 && xi + eta <= 1.0 + 1e-12)
            return eval(t, {xi, eta});
    }
    throw Error("domain-error", "point outside the mesh");
}

std::vector<BoundarySample> sample_hole_boundary(const AssembledSystem& sys, int hole,
                                                 int samples_per_hole) {
    const Mesh& mesh = *sys.mesh;
    const EdgeTable& et = sys.kernel->dofmap().edges;

    // Boundary edges of this hole in stored order, with adjacent element and
    // the orientation of the local edge.
    struct EdgeRef {
        int element;
        int local_edge;  // basis convention
        bool forward;    // boundary nodes run with the local edge direction
        double length;
    };
    std::vector<EdgeRef> refs;
    double total_len = 0;
    for (const auto& be : mesh.boundary) {
        bool on_hole = (be.tag.kind == BoundaryTag::Kind::Hole && be.tag.id == hole) ||
                       (be.tag.kind == BoundaryTag::Kind::Cut && be.tag.id == hole);
        if (!on_hole) continue;
        int e = et.find(be.nodes[0], be.nodes[1]);
        if (e < 0) throw Error("internal", "boundary edge missing from edge table");
        int t = et.edge_elements[static_cast<size_t>(e)][0];
        const auto& el = mesh.elements[static_cast<size_t>(t)];
        int local = -1;
        bool forward = true;
        for (int le = 0; le < 3; ++le) {
            int a = el[static_cast<size_t>(HierarchicBasis::kEdgeVertices[le][0])];
            int b = el[static_cast<size_t>(HierarchicBasis::kEdgeVertices[le][1])];
            if (a == be.nodes[0] && b == be.nodes[1]) { local = le; forward = true; }
            if (a == be.nodes[1] && b == be.nodes[0]) { local = le; forward = false; }
        }
        if (local < 0) throw Error("internal", "boundary edge not found in its element");
        double len = dist(mesh.nodes[static_cast<size_t>(be.nodes[0])],
                          mesh.nodes[static_cast<size_t>(be.nodes[1])]);
        refs.push_back({t, local, forward, len});
        total_len += len;
    }
    if (refs.empty()) throw Error("invalid-parameter", "hole has no boundary edges");

    static const Vec2 ref_vertex[3] = {{0, 0}, {1, 0}, {0, 1}};
    std::vector<BoundarySample> out;
    for (const auto& r : refs) {
        int ns = std::max(2, static_cast<int>(std::round(samples_per_hole * r.length / total_len)) + 1);
        for (int i = 0; i <= ns; ++i) {
            double t = static_cast<double>(i) / ns;
            double tt = r.forward ? t : 1.0 - t;
            Vec2 a = ref_vertex[HierarchicBasis::kEdgeVertices[r.local_edge][0]];
            Vec2 b = ref_vertex[HierarchicBasis::kEdgeVertices[r.local_edge][1]];
            out.push_back({r.element, a + tt * (b - a)});
        }
    }
    return out;
}

CanonicalDomain extract_canonical(const ConformalMap& map, const ConjugateSetup& setup,
                                  int samples_per_hole) {
    const AssembledSystem& sys = map.system();
    CanonicalDomain cd;
    cd.h = map.modulus();
    int n = static_cast<int>(setup.partition.E.size());
    for (int hole = 0; hole < n; ++hole) {
        auto samples = sample_hole_boundary(sys, hole, samples_per_hole);
        double umin = 1e300, umax = -1e300, vmin = 1e300, vmax = -1e300;
        for (const auto& s : samples) {
            Vec2 phi = map.eval(s.element, s.ref);
            umin = std::min(umin, phi.x);
            umax = std::max(umax, phi.x);
            vmin = std::min(vmin, phi.y);
            vmax = std::max(vmax, phi.y);
        }
        CanonicalSlit slit;
        slit.hole = hole;
        slit.height = map.modulus() * setup.delta[hole];
        slit.zeta = {umin, slit.height};
        slit.length = umax - umin;
        slit.spread = vmax - vmin;
        cd.slits.push_back(slit);
    }
    return cd;
}

std::vector<MapSample> sample_map(const ConformalMap& map, int density, int checker_k) {
    if (density < 1) throw Error("invalid-parameter", "sampling density must be >= 1");
    const AssembledSystem& sys = map.system();
    const Mesh& mesh = *sys.mesh;
    std::vector<MapSample> out;
    double M = map.modulus();
    for (int t = 0; t < mesh.element_count(); ++t) {
        for (int i = 0; i <= density; ++i)
            for (int j = 0; j <= density - i; ++j) {
                Vec2 ref{static_cast<double>(i) / density, static_cast<double>(j) / density};
                MapSample s;
                s.element = t;
                s.ref = ref;
                Vec2 z;
                sys.kernel->geometry(t).eval(ref, &z, nullptr);
                s.domain = z;
                s.canonical = map.eval(t, ref);
                double un = std::clamp(s.canonical.x, 0.0, 1.0 - 1e-12);
                double vn = std::clamp(s.canonical.y / M, 0.0, 1.0 - 1e-12);
                s.checker = (static_cast<int>(std::floor(checker_k * un)) +
                             static_cast<int>(std::floor(checker_k * vn))) % 2;
                out.push_back(s);
            }
    }
    return out;
}

ModulusReport build_report(const AssembledSystem& sys, const Solution& u,
                           const Solution& v, const ConjugateSetup& setup,
                           int samples_per_hole) {
    ModulusReport rep;
    rep.M = u.energy;
    rep.Mt = v.energy;
    rep.reci = reciprocal_error(rep.M, rep.Mt);
    rep.h = rep.M;
    rep.delta = setup.delta;
    rep.delta_in_range = setup.delta_in_range;

    ConformalMap map(&sys, &u.x, &v.x, rep.M);
    rep.canonical = extract_canonical(map, setup, samples_per_hole);

    // Corner images: corner nodes are vertices of some element; evaluate there.
    const Mesh& mesh = *sys.mesh;
    for (int k = 0; k < 4; ++k) {
        int node = mesh.corner_nodes[static_cast<size_t>(k)];
        static const Vec2 ref_vertex[3] = {{0, 0}, {1, 0}, {0, 1}};
        bool found = false;
        for (int t = 0; t < mesh.element_count() && !found; ++t) {
            const auto& el = mesh.elements[static_cast<size_t>(t)];
            for (int i = 0; i < 3; ++i)
                if (el[static_cast<size_t>(i)] == node) {
                    rep.corner_images[static_cast<size_t>(k)] = map.eval(t, ref_vertex[i]);
                    found = true;
                    break;
                }
        }
        if (!found) throw Error("internal", "corner node not referenced by any element");
    }
    return rep;
}

}  // namespace cfm
