#include "cfm/errorest.hpp"

#include <algorithm>
#include <map>

namespace cfm {

namespace {

struct ModeKey {
    int kind;
    int entity;
    int degree;
    int index;
    bool operator<(const ModeKey& o) const {
        return std::tie(kind, entity, degree, index) <
               std::tie(o.kind, o.entity, o.degree, o.index);
    }
};

ModeKey key_of(const HierarchicBasis::Mode& m) {
    return {static_cast<int>(m.kind), m.entity, m.degree,
            m.kind == HierarchicBasis::ModeKind::Bubble ? -1 : m.index};
}

}  // namespace

ErrorEstimate estimate(const AssembledSystem& sys, const Solution& sol,
                       const RoleAssignment& roles, SolveContext& ctx) {
    const int p = sys.basis.p;
    if (p + 2 > HierarchicBasis::kMaxDegree)
        throw Error("capability", "auxiliary space needs degree p+2 <= " +
                                      std::to_string(HierarchicBasis::kMaxDegree));
    ScopedTimer timer(ctx.timings, "estimation");

    const Mesh& mesh = *sys.mesh;
    AssembleOptions opts;
    opts.quad_order_override = sys.kernel->quad_order() + 4;  // degree p+2 modes
    AssemblyKernel aux(sys.mesh, sys.chart, p + 2, opts);
    const DofMap& adofs = aux.dofmap();

    // Mesh edges on Dirichlet boundaries of these roles: their auxiliary edge
    // modes are constrained to zero and excluded from the space.
    std::vector<char> edge_dirichlet(adofs.edges.edges.size(), 0);
    for (const auto& be : mesh.boundary) {
        bool dirichlet = false;
        if (be.tag.kind == BoundaryTag::Kind::Gamma)
            dirichlet = roles.gamma[static_cast<size_t>(be.tag.id - 1)] != GammaRole::Neumann;
        else
            dirichlet = roles.holes_fixed;
        if (!dirichlet) continue;
        int e = adofs.edges.find(be.nodes[0], be.nodes[1]);
        if (e >= 0) edge_dirichlet[static_cast<size_t>(e)] = 1;
    }

    // Auxiliary dofs: edge modes of degree exactly p+1 on admissible edges,
    // bubbles of degree p+1 and p+2. Compact W numbering in entity order.
    std::map<int, int> w_index;  // aux entity dof -> W index
    {
        int w = 0;
        for (int e = 0; e < static_cast<int>(adofs.edges.edges.size()); ++e) {
            if (edge_dirichlet[static_cast<size_t>(e)]) continue;
            w_index[adofs.edge_dof(e, p + 1)] = w++;
        }
        const auto& modes = aux.basis().modes();
        std::vector<int> bubble_degrees;
        for (const auto& m : modes)
            if (m.kind == HierarchicBasis::ModeKind::Bubble)
                bubble_degrees.push_back(m.degree);
        for (int t = 0; t < mesh.element_count(); ++t)
            for (size_t b = 0; b < bubble_degrees.size(); ++b)
                if (bubble_degrees[b] >= p + 1)
                    w_index[adofs.bubble_dof(t, static_cast<int>(b))] = w++;
    }
    int nw = static_cast<int>(w_index.size());

    // Local mode correspondence between the degree-p basis and the auxiliary
    // basis, and the list of local auxiliary-mode positions.
    const auto& p_modes = sys.kernel->basis().modes();
    const auto& a_modes = aux.basis().modes();
    std::map<ModeKey, int> a_pos;
    for (size_t i = 0; i < a_modes.size(); ++i) {
        ModeKey k = key_of(a_modes[i]);
        if (a_modes[i].kind == HierarchicBasis::ModeKind::Bubble) {
            // Distinguish bubbles of the same degree by their in-degree index.
            int seen = 0;
            for (size_t j = 0; j < i; ++j)
                if (a_modes[j].kind == HierarchicBasis::ModeKind::Bubble &&
                    a_modes[j].degree == a_modes[i].degree)
                    ++seen;
            k.index = seen;
        }
        a_pos[k] = static_cast<int>(i);
    }
    std::vector<int> p_to_a(p_modes.size());
    {
        std::map<int, int> bubble_seen;
        for (size_t i = 0; i < p_modes.size(); ++i) {
            ModeKey k = key_of(p_modes[i]);
            if (p_modes[i].kind == HierarchicBasis::ModeKind::Bubble)
                k.index = bubble_seen[p_modes[i].degree]++;
            auto it = a_pos.find(k);
            if (it == a_pos.end()) throw Error("internal", "basis embedding failed");
            p_to_a[i] = it->second;
        }
    }

    // One pass: residual restricted to W and the W-block element matrices.
    int na = aux.dim();
    Eigen::VectorXd rW = Eigen::VectorXd::Zero(nw);
    std::vector<Eigen::Triplet<double>> trips;
    struct ElementW {
        std::vector<int> w_ids;          // compact W indices
        std::vector<int> local_pos;      // positions in the aux local basis
        Eigen::MatrixXd Kww;
    };
    std::vector<ElementW> ew(static_cast<size_t>(mesh.element_count()));

    Eigen::MatrixXd Ke;
    std::vector<int> a_dofs;
    std::vector<double> a_signs;
    Eigen::VectorXd xloc(na);
    for (int t = 0; t < mesh.element_count(); ++t) {
        aux.element_matrix(t, Ke);
        aux.element_entity_dofs(t, &a_dofs, &a_signs);

        // Embedded local coefficients of the solved degree-p solution.
        xloc.setZero();
        const auto& pd = sys.element_dofs[static_cast<size_t>(t)];
        const auto& ps = sys.element_signs[static_cast<size_t>(t)];
        for (size_t i = 0; i < pd.size(); ++i)
            xloc[p_to_a[i]] = ps[i] * sol.x[pd[i]];

        Eigen::VectorXd rloc = Ke * xloc;

        ElementW& w = ew[static_cast<size_t>(t)];
        for (int i = 0; i < na; ++i) {
            auto it = w_index.find(a_dofs[static_cast<size_t>(i)]);
            if (it == w_index.end()) continue;
            w.w_ids.push_back(it->second);
            w.local_pos.push_back(i);
        }
        int m = static_cast<int>(w.w_ids.size());
        w.Kww.resize(m, m);
        for (int i = 0; i < m; ++i) {
            int li = w.local_pos[static_cast<size_t>(i)];
            double si = a_signs[static_cast<size_t>(li)];
            rW[w.w_ids[static_cast<size_t>(i)]] -= si * rloc[li];
            for (int j = 0; j < m; ++j) {
                int lj = w.local_pos[static_cast<size_t>(j)];
                double v = si * a_signs[static_cast<size_t>(lj)] * Ke(li, lj);
                w.Kww(i, j) = v;
                trips.emplace_back(w.w_ids[static_cast<size_t>(i)], w.w_ids[static_cast<size_t>(j)], v);
            }
        }
    }

    Eigen::SparseMatrix<double> Aww(nw, nw);
    Aww.setFromTriplets(trips.begin(), trips.end());
    auto fact = factor(Aww, &ctx.stats, "estimation");
    Eigen::MatrixXd e = fact->solve(rW);

    ErrorEstimate est;
    est.element_contributions.resize(static_cast<size_t>(mesh.element_count()), 0.0);
    double eta2_sum = 0.0;
    for (int t = 0; t < mesh.element_count(); ++t) {
        const ElementW& w = ew[static_cast<size_t>(t)];
        int m = static_cast<int>(w.w_ids.size());
        Eigen::VectorXd el(m);
        for (int i = 0; i < m; ++i) el[i] = e(w.w_ids[static_cast<size_t>(i)], 0);
        // Kww carries the orientation signs, so plain global coefficients apply.
        double c = el.dot(w.Kww * el);
        est.element_contributions[static_cast<size_t>(t)] = c;
        eta2_sum += c;
    }
    double eta2 = e.col(0).dot(rW);
    est.eta = std::sqrt(std::max(eta2, 0.0));
    (void)eta2_sum;  // equals eta2 up to roundoff; asserted in tests
    return est;
}

}  // namespace cfm
