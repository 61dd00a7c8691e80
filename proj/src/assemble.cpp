#include "cfm/assemble.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cfm {

// ---------------------------------------------------------------------------
// Dof map and partition
// ---------------------------------------------------------------------------

DofMap build_dof_map(const Mesh& mesh, int p) {
    DofMap d;
    d.p = p;
    d.n_nodes = mesh.node_count();
    d.bubble_per_element = (p - 1) * (p - 2) / 2;
    d.edges = build_edge_table(mesh);
    d.count = d.n_nodes + static_cast<int>(d.edges.edges.size()) * (p - 1) +
              mesh.element_count() * d.bubble_per_element;
    return d;
}

std::vector<int> DofPartition::free_ids() const {
    std::vector<int> out;
    out.insert(out.end(), B.begin(), B.end());
    out.insert(out.end(), N1.begin(), N1.end());
    out.insert(out.end(), N0.begin(), N0.end());
    if (!holes_fixed)
        for (const auto& e : E) out.insert(out.end(), e.begin(), e.end());
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<int> DofPartition::fixed_ids() const {
    std::vector<int> out;
    out.insert(out.end(), D1.begin(), D1.end());
    out.insert(out.end(), D0.begin(), D0.end());
    if (holes_fixed)
        for (const auto& e : E) out.insert(out.end(), e.begin(), e.end());
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

// Gamma index whose role is Neumann and which carries the unit Dirichlet
// value in the companion problem (N1 label); its opposite gets N0.
void neumann_labels(const RoleAssignment& roles, int* n1_gamma, int* n0_gamma) {
    std::vector<int> neumann;
    for (int g = 0; g < 4; ++g)
        if (roles.gamma[static_cast<size_t>(g)] == GammaRole::Neumann) neumann.push_back(g + 1);
    if (neumann.size() != 2)
        throw Error("invalid-parameter", "role assignment must leave exactly two Neumann arcs");
    // gamma_4 pairs with Dirichlet-1 in the conjugate problem and gamma_3
    // carried the unit value in the primary; prefer those as N1.
    *n1_gamma = neumann[1];
    *n0_gamma = neumann[0];
    if (neumann[0] == 2 && neumann[1] == 4) {
        *n1_gamma = 4;
        *n0_gamma = 2;
    } else if (neumann[0] == 1 && neumann[1] == 3) {
        *n1_gamma = 3;
        *n0_gamma = 1;
    }
}

}  // namespace

DofPartition build_partition(const Mesh& mesh, const DofMap& dofs,
                             const RoleAssignment& roles,
                             const std::vector<int>* entity_to_matrix) {
    int n1_gamma = 0, n0_gamma = 0;
    neumann_labels(roles, &n1_gamma, &n0_gamma);

    DofPartition part;
    part.holes_fixed = roles.holes_fixed;
    part.dof_count = dofs.count;
    part.E.resize(static_cast<size_t>(mesh.num_holes));
    part.E_vertex.resize(static_cast<size_t>(mesh.num_holes));

    // Tags per node and per mesh edge.
    std::vector<std::vector<BoundaryTag>> node_tags(static_cast<size_t>(mesh.node_count()));
    std::map<std::pair<int, int>, BoundaryTag> edge_tags;
    for (const auto& be : mesh.boundary) {
        node_tags[static_cast<size_t>(be.nodes[0])].push_back(be.tag);
        node_tags[static_cast<size_t>(be.nodes[1])].push_back(be.tag);
        edge_tags[{std::min(be.nodes[0], be.nodes[1]), std::max(be.nodes[0], be.nodes[1])}] = be.tag;
    }

    auto remap = [&](int entity_dof) {
        return entity_to_matrix ? (*entity_to_matrix)[static_cast<size_t>(entity_dof)] : entity_dof;
    };

    // kind: 0 vertex, 1 edge mode, 2 bubble
    auto classify = [&](const std::vector<BoundaryTag>& tags, int dof, bool vertex) {
        int hole_id = -1;
        int dirichlet_gamma = 0;
        int neumann_gamma = 0;
        for (const auto& tag : tags) {
            if (tag.kind == BoundaryTag::Kind::Gamma) {
                GammaRole role = roles.gamma[static_cast<size_t>(tag.id - 1)];
                if (role == GammaRole::Neumann)
                    neumann_gamma = tag.id;
                else
                    dirichlet_gamma = tag.id;
            } else {
                hole_id = tag.id;
            }
        }
        int id = remap(dof);
        if (dirichlet_gamma != 0) {
            // Dirichlet wins at corners.
            if (roles.gamma[static_cast<size_t>(dirichlet_gamma - 1)] == GammaRole::Dirichlet1) {
                part.D1.push_back(id);
                if (vertex) part.D1_vertex.push_back(id);
            } else {
                part.D0.push_back(id);
            }
            return;
        }
        if (hole_id >= 0) {
            part.E[static_cast<size_t>(hole_id)].push_back(id);
            if (vertex) part.E_vertex[static_cast<size_t>(hole_id)].push_back(id);
            return;
        }
        if (neumann_gamma == n1_gamma) {
            part.N1.push_back(id);
            return;
        }
        if (neumann_gamma == n0_gamma) {
            part.N0.push_back(id);
            return;
        }
        part.B.push_back(id);
    };

    for (int v = 0; v < mesh.node_count(); ++v)
        classify(node_tags[static_cast<size_t>(v)], dofs.vertex_dof(v), true);

    std::vector<BoundaryTag> none;
    for (int e = 0; e < static_cast<int>(dofs.edges.edges.size()); ++e) {
        auto key = std::make_pair(dofs.edges.edges[static_cast<size_t>(e)][0],
                                  dofs.edges.edges[static_cast<size_t>(e)][1]);
        auto it = edge_tags.find(key);
        for (int k = 2; k <= dofs.p; ++k) {
            if (it == edge_tags.end())
                classify(none, dofs.edge_dof(e, k), false);
            else
                classify({it->second}, dofs.edge_dof(e, k), false);
        }
    }
    for (int t = 0; t < mesh.element_count(); ++t)
        for (int b = 0; b < dofs.bubble_per_element; ++b)
            classify(none, dofs.bubble_dof(t, b), false);

    for (size_t i = 0; i < part.E.size(); ++i)
        if (part.E[i].empty())
            throw Error("malformed-partition",
                        "hole " + std::to_string(i) + " has no boundary dofs");
    return part;
}

// ---------------------------------------------------------------------------
// Element geometry
// ---------------------------------------------------------------------------

void ElementGeometry::eval(const Vec2& ref, Vec2* z, Eigen::Matrix2d* J) const {
    double xi = ref.x, eta = ref.y;
    Vec2 p{v[0].x + xi * (v[1].x - v[0].x) + eta * (v[2].x - v[0].x),
           v[0].y + xi * (v[1].y - v[0].y) + eta * (v[2].y - v[0].y)};
    Eigen::Matrix2d Jm = J_affine;
    if (curved) {
        const double lambda[3] = {1.0 - xi - eta, xi, eta};
        static const Vec2 dl[3] = {{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}};
        for (const auto& ce : curved_edges) {
            int a = HierarchicBasis::kEdgeVertices[ce.local_edge][0];
            int b = HierarchicBasis::kEdgeVertices[ce.local_edge][1];
            double la = lambda[a], lb = lambda[b];
            double beta = la + lb;
            if (beta < 1e-12) continue;  // correction and its gradient vanish at the opposite vertex
            double t = lb / beta;
            Vec2 c = ce.arc.point(t);
            Vec2 dc = ce.arc.derivative(t);
            Vec2 lin = v[a] + t * (v[b] - v[a]);
            Vec2 dev = c - lin;
            Vec2 dlin = v[b] - v[a];
            Vec2 grad_beta = dl[a] + dl[b];
            Vec2 grad_t{(la * dl[b].x - lb * dl[a].x) / (beta * beta),
                        (la * dl[b].y - lb * dl[a].y) / (beta * beta)};
            p = p + beta * dev;
            Vec2 dgt = dc - dlin;
            Jm(0, 0) += dev.x * grad_beta.x + beta * dgt.x * grad_t.x;
            Jm(0, 1) += dev.x * grad_beta.y + beta * dgt.x * grad_t.y;
            Jm(1, 0) += dev.y * grad_beta.x + beta * dgt.y * grad_t.x;
            Jm(1, 1) += dev.y * grad_beta.y + beta * dgt.y * grad_t.y;
        }
    }
    if (z) *z = p;
    if (J) *J = Jm;
}

// ---------------------------------------------------------------------------
// Assembly kernel
// ---------------------------------------------------------------------------

AssemblyKernel::AssemblyKernel(std::shared_ptr<const Mesh> mesh,
                               std::shared_ptr<const SurfaceChart> chart, int p,
                               const AssembleOptions& opts)
    : mesh_(std::move(mesh)), chart_(std::move(chart)), basis_(p) {
    dofs_ = build_dof_map(*mesh_, p);
    order_straight_ = opts.quad_order_override > 0 ? opts.quad_order_override
                                                   : 2 * p + 4 + opts.extra_quad_order;
    order_curved_ = order_straight_ + 2;
    table_straight_ = basis_.tabulate(triangle_rule(order_straight_));
    table_curved_ = basis_.tabulate(triangle_rule(order_curved_));

    // Arc geometry per (sorted) boundary node pair, normalized to run from
    // the lower node id to the higher.
    std::map<std::pair<int, int>, ArcGeom> arcs;
    for (const auto& be : mesh_->boundary) {
        if (!be.arc) continue;
        ArcGeom g = *be.arc;
        if (be.nodes[0] > be.nodes[1]) std::swap(g.theta0, g.theta1);
        arcs[{std::min(be.nodes[0], be.nodes[1]), std::max(be.nodes[0], be.nodes[1])}] = g;
    }

    geom_.resize(static_cast<size_t>(mesh_->element_count()));
    edge_flipped_.resize(static_cast<size_t>(mesh_->element_count()));
    for (int t = 0; t < mesh_->element_count(); ++t) {
        const auto& el = mesh_->elements[static_cast<size_t>(t)];
        ElementGeometry g;
        for (int i = 0; i < 3; ++i) g.v[i] = mesh_->nodes[static_cast<size_t>(el[static_cast<size_t>(i)])];
        g.J_affine << g.v[1].x - g.v[0].x, g.v[2].x - g.v[0].x,
                      g.v[1].y - g.v[0].y, g.v[2].y - g.v[0].y;
        for (int e = 0; e < 3; ++e) {
            int la = HierarchicBasis::kEdgeVertices[e][0];
            int lb = HierarchicBasis::kEdgeVertices[e][1];
            int ga = el[static_cast<size_t>(la)], gb = el[static_cast<size_t>(lb)];
            edge_flipped_[static_cast<size_t>(t)][static_cast<size_t>(e)] = ga > gb ? 1 : 0;
            auto it = arcs.find({std::min(ga, gb), std::max(ga, gb)});
            if (it != arcs.end()) {
                ArcGeom arc = it->second;
                if (ga > gb) std::swap(arc.theta0, arc.theta1);  // parameterize from local first vertex
                g.curved_edges.push_back({e, arc});
                g.curved = true;
            }
        }
        geom_[static_cast<size_t>(t)] = g;
    }
}

void AssemblyKernel::element_entity_dofs(int t, std::vector<int>* dofs,
                                         std::vector<double>* signs) const {
    const auto& el = mesh_->elements[static_cast<size_t>(t)];
    const auto& modes = basis_.modes();
    dofs->resize(modes.size());
    signs->resize(modes.size());
    for (size_t m = 0; m < modes.size(); ++m) {
        const auto& mode = modes[m];
        switch (mode.kind) {
            case HierarchicBasis::ModeKind::Vertex:
                (*dofs)[m] = dofs_.vertex_dof(el[static_cast<size_t>(mode.entity)]);
                (*signs)[m] = 1.0;
                break;
            case HierarchicBasis::ModeKind::Edge: {
                int e = dofs_.edges.element_edges[static_cast<size_t>(t)][0];
                // element_edges is stored by the mesh convention (edge k
                // opposite vertex k); translate from the basis convention.
                static const int opposite[3] = {2, 0, 1};  // basis edge -> mesh edge index
                e = dofs_.edges.element_edges[static_cast<size_t>(t)]
                                             [static_cast<size_t>(opposite[mode.entity])];
                (*dofs)[m] = dofs_.edge_dof(e, mode.degree);
                bool flip = edge_flipped_[static_cast<size_t>(t)][static_cast<size_t>(mode.entity)] != 0;
                (*signs)[m] = HierarchicBasis::orientation_sign(flip, mode.degree);
                break;
            }
            case HierarchicBasis::ModeKind::Bubble:
                (*dofs)[m] = dofs_.bubble_dof(t, mode.index);
                (*signs)[m] = 1.0;
                break;
        }
    }
}

void AssemblyKernel::element_matrix(int t, Eigen::MatrixXd& Ke) const {
    const ElementGeometry& g = geom_[static_cast<size_t>(t)];
    const TriangleRule& rule = triangle_rule(g.curved ? order_curved_ : order_straight_);
    const HierarchicBasis::Table& tab = g.curved ? table_curved_ : table_straight_;
    int n = basis_.dim();
    int nq = static_cast<int>(rule.points.size());
    bool identity = chart_->is_identity();

    Eigen::MatrixXd W(2 * nq, n);
    Eigen::Matrix2d J = g.J_affine;
    Vec2 z{0, 0};
    for (int q = 0; q < nq; ++q) {
        if (g.curved || !identity) g.eval(rule.points[static_cast<size_t>(q)], &z, &J);
        double det = J(0, 0) * J(1, 1) - J(0, 1) * J(1, 0);
        if (!(det > 0))
            throw Error("element-map",
                        "inverted element map at a quadrature point of element " +
                            std::to_string(t));
        Eigen::Matrix2d Jinv;
        Jinv << J(1, 1) / det, -J(0, 1) / det, -J(1, 0) / det, J(0, 0) / det;
        Eigen::Matrix2d M = identity ? Eigen::Matrix2d::Identity()
                                     : metric_coefficient(*chart_, z);
        Eigen::Matrix2d C = (Jinv * M * Jinv.transpose()) * det;
        // 2x2 Cholesky of the SPD coefficient.
        double l11 = std::sqrt(C(0, 0));
        double l21 = C(1, 0) / l11;
        double d22 = C(1, 1) - l21 * l21;
        if (!(d22 > 0))
            throw Error("element-map",
                        "degenerate coefficient matrix in element " + std::to_string(t));
        double l22 = std::sqrt(d22);
        double sw = std::sqrt(rule.weights[static_cast<size_t>(q)]);
        for (int i = 0; i < n; ++i) {
            double gx = tab.dxi(q, i), gy = tab.deta(q, i);
            W(2 * q, i) = sw * (l11 * gx + l21 * gy);
            W(2 * q + 1, i) = sw * (l22 * gy);
        }
    }
    Ke.resize(n, n);
    Ke.setZero();
    Ke.selfadjointView<Eigen::Lower>().rankUpdate(W.transpose());
    Ke.triangularView<Eigen::StrictlyUpper>() = Ke.transpose();
}

// ---------------------------------------------------------------------------
// Global assembly
// ---------------------------------------------------------------------------

namespace {

AssembledSystem assemble_impl(std::shared_ptr<const Mesh> mesh,
                              std::shared_ptr<const SurfaceChart> chart,
                              const BasisSpec& basis, const AssembleOptions& opts) {
    if (!mesh) throw Error("invalid-parameter", "assemble needs a mesh");
    if (!chart) chart = make_plane_chart();
    AssembledSystem sys;
    sys.mesh = mesh;
    sys.chart = chart;
    sys.basis = basis;
    sys.kernel = std::make_shared<AssemblyKernel>(mesh, chart, basis.p, opts);
    const AssemblyKernel& kern = *sys.kernel;
    sys.quadrature_order = kern.quad_order();

    // Primary-role partition defines the matrix ordering: B, N1, N0, D1, D0, E.
    DofPartition entity_part =
        build_partition(*mesh, kern.dofmap(), RoleAssignment::primary(), nullptr);
    int n = kern.dofmap().count;
    sys.entity_to_matrix.assign(static_cast<size_t>(n), -1);
    {
        int next = 0;
        auto number = [&](const std::vector<int>& ids) {
            for (int id : ids) sys.entity_to_matrix[static_cast<size_t>(id)] = next++;
        };
        number(entity_part.B);
        number(entity_part.N1);
        number(entity_part.N0);
        number(entity_part.D1);
        number(entity_part.D0);
        for (const auto& e : entity_part.E) number(e);
        if (next != n) throw Error("internal", "partition does not cover all dofs");
    }
    sys.partition = build_partition(*mesh, kern.dofmap(), RoleAssignment::primary(),
                                    &sys.entity_to_matrix);

    // Per-element matrix ids and orientation signs.
    int ne = mesh->element_count();
    int nl = kern.dim();
    sys.element_dofs.resize(static_cast<size_t>(ne));
    sys.element_signs.resize(static_cast<size_t>(ne));
    {
        std::vector<int> ed;
        std::vector<double> es;
        for (int t = 0; t < ne; ++t) {
            kern.element_entity_dofs(t, &ed, &es);
            auto& dst = sys.element_dofs[static_cast<size_t>(t)];
            dst.resize(ed.size());
            for (size_t i = 0; i < ed.size(); ++i)
                dst[i] = sys.entity_to_matrix[static_cast<size_t>(ed[i])];
            sys.element_signs[static_cast<size_t>(t)] = es;
        }
    }

    ScopedTimer timer(sys.timings, "integration");

    // Sparsity pattern.
    std::vector<int> row_ptr(static_cast<size_t>(n) + 1, 0);
    std::vector<int> col_idx;
    {
        std::vector<std::vector<int>> rows(static_cast<size_t>(n));
        for (int t = 0; t < ne; ++t) {
            const auto& dl = sys.element_dofs[static_cast<size_t>(t)];
            for (int i : dl) {
                auto& r = rows[static_cast<size_t>(i)];
                r.insert(r.end(), dl.begin(), dl.end());
            }
        }
        std::int64_t nnz = 0;
        for (auto& r : rows) {
            std::sort(r.begin(), r.end());
            r.erase(std::unique(r.begin(), r.end()), r.end());
            nnz += static_cast<std::int64_t>(r.size());
        }
        col_idx.reserve(static_cast<size_t>(nnz));
        for (int i = 0; i < n; ++i) {
            row_ptr[static_cast<size_t>(i)] = static_cast<int>(col_idx.size());
            col_idx.insert(col_idx.end(), rows[static_cast<size_t>(i)].begin(),
                           rows[static_cast<size_t>(i)].end());
            rows[static_cast<size_t>(i)].clear();
            rows[static_cast<size_t>(i)].shrink_to_fit();
        }
        row_ptr[static_cast<size_t>(n)] = static_cast<int>(col_idx.size());
    }
    std::vector<double> values(col_idx.size(), 0.0);

    auto accumulate = [&](int t, const Eigen::MatrixXd& Ke) {
        const auto& dl = sys.element_dofs[static_cast<size_t>(t)];
        const auto& sl = sys.element_signs[static_cast<size_t>(t)];
        for (int i = 0; i < nl; ++i) {
            int gi = dl[static_cast<size_t>(i)];
            const int* begin = col_idx.data() + row_ptr[static_cast<size_t>(gi)];
            const int* end = col_idx.data() + row_ptr[static_cast<size_t>(gi) + 1];
            for (int j = 0; j < nl; ++j) {
                int gj = dl[static_cast<size_t>(j)];
                const int* pos = std::lower_bound(begin, end, gj);
                values[static_cast<size_t>(pos - col_idx.data())] +=
                    sl[static_cast<size_t>(i)] * sl[static_cast<size_t>(j)] * Ke(i, j);
            }
        }
    };

    // Element matrices are computed in parallel chunks and accumulated in
    // element order, so the result is independent of the worker count.
    const int chunk = 64;
    std::vector<Eigen::MatrixXd> buffer(static_cast<size_t>(std::min(chunk, ne)));
    for (int begin = 0; begin < ne; begin += chunk) {
        int count = std::min(chunk, ne - begin);
        if (opts.parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
            for (int i = 0; i < count; ++i) kern.element_matrix(begin + i, buffer[static_cast<size_t>(i)]);
        } else {
            for (int i = 0; i < count; ++i) kern.element_matrix(begin + i, buffer[static_cast<size_t>(i)]);
        }
        for (int i = 0; i < count; ++i) accumulate(begin + i, buffer[static_cast<size_t>(i)]);
    }

    sys.A = SparseSym(n, std::move(row_ptr), std::move(col_idx), std::move(values));
    return sys;
}

}  // namespace

AssembledSystem assemble(std::shared_ptr<const Mesh> mesh,
                         std::shared_ptr<const SurfaceChart> chart,
                         const BasisSpec& basis, const AssembleOptions& opts) {
    return assemble_impl(std::move(mesh), std::move(chart), basis, opts);
}

AssembledSystem assemble_serial(std::shared_ptr<const Mesh> mesh,
                                std::shared_ptr<const SurfaceChart> chart,
                                const BasisSpec& basis, AssembleOptions opts) {
    opts.parallel = false;
    return assemble_impl(std::move(mesh), std::move(chart), basis, opts);
}

DofPartition AssembledSystem::partition_for(const RoleAssignment& roles) const {
    return build_partition(*mesh, kernel->dofmap(), roles, &entity_to_matrix);
}

}  // namespace cfm
