#include "cfm/solve.hpp"

#include <algorithm>

namespace cfm {

Solution solve_dirichlet(const AssembledSystem& sys, const std::vector<int>& free,
                         const std::vector<int>& fixed, const Eigen::VectorXd& fixed_values,
                         SolveContext& ctx, std::shared_ptr<Factorization> reuse) {
    if (static_cast<int>(fixed.size()) != fixed_values.size())
        throw Error("dimension-mismatch", "fixed ids and values differ in length");
    Solution sol;
    sol.free_ids = free;
    sol.x = Eigen::VectorXd::Zero(sys.A.dim());
    for (size_t i = 0; i < fixed.size(); ++i) sol.x[fixed[i]] = fixed_values[i];

    std::vector<int> free_map(static_cast<size_t>(sys.A.dim()), -1);
    for (size_t i = 0; i < free.size(); ++i) free_map[static_cast<size_t>(free[i])] = static_cast<int>(i);

    if (reuse && reuse->dim() == static_cast<int>(free.size())) {
        sol.factorization = std::move(reuse);
    } else {
        ScopedTimer timer(ctx.timings, "factorization");
        Eigen::SparseMatrix<double> A_II = sys.A.extract(free);
        sol.factorization = factor(A_II, &ctx.stats, "solve");
    }

    {
        ScopedTimer timer(ctx.timings, "solve");
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<int>(free.size()));
        for (size_t i = 0; i < fixed.size(); ++i) {
            double v = fixed_values[static_cast<int>(i)];
            if (v != 0.0) sys.A.accumulate_row(fixed[i], -v, free_map, rhs);
        }
        Eigen::MatrixXd xI = sol.factorization->solve(rhs);
        for (size_t i = 0; i < free.size(); ++i) sol.x[free[i]] = xI(static_cast<int>(i), 0);
    }
    sol.energy = sys.A.quad_form(sol.x);
    return sol;
}

Solution solve_primary(const AssembledSystem& sys, SolveContext& ctx) {
    const DofPartition& part = sys.partition;
    std::vector<int> free = part.free_ids();
    std::vector<int> fixed = part.fixed_ids();
    Eigen::VectorXd vals = Eigen::VectorXd::Zero(static_cast<int>(fixed.size()));
    std::vector<char> is_one(static_cast<size_t>(sys.A.dim()), 0);
    for (int d : part.D1_vertex) is_one[static_cast<size_t>(d)] = 1;
    for (size_t i = 0; i < fixed.size(); ++i)
        if (is_one[static_cast<size_t>(fixed[i])]) vals[static_cast<int>(i)] = 1.0;
    return solve_dirichlet(sys, free, fixed, vals, ctx);
}

EvalResult evaluate(const AssembledSystem& sys, const Eigen::VectorXd& x, int element,
                    const Vec2& ref_point) {
    if (element < 0 || element >= sys.mesh->element_count())
        throw Error("domain-error", "element id out of range");
    if (ref_point.x < -1e-12 || ref_point.y < -1e-12 ||
        ref_point.x + ref_point.y > 1.0 + 1e-12)
        throw Error("domain-error", "reference point outside the element");
    const AssemblyKernel& kern = *sys.kernel;
    int n = kern.dim();
    std::vector<double> vals(static_cast<size_t>(n));
    std::vector<Vec2> grads(static_cast<size_t>(n));
    kern.basis().eval(ref_point.x, ref_point.y, vals.data());
    kern.basis().eval_grad(ref_point.x, ref_point.y, grads.data());

    const auto& dl = sys.element_dofs[static_cast<size_t>(element)];
    const auto& sl = sys.element_signs[static_cast<size_t>(element)];
    EvalResult out;
    Vec2 gref{0, 0};
    for (int i = 0; i < n; ++i) {
        double c = sl[static_cast<size_t>(i)] * x[dl[static_cast<size_t>(i)]];
        out.value += c * vals[static_cast<size_t>(i)];
        gref = gref + c * grads[static_cast<size_t>(i)];
    }
    Vec2 z;
    Eigen::Matrix2d J;
    kern.geometry(element).eval(ref_point, &z, &J);
    double det = J(0, 0) * J(1, 1) - J(0, 1) * J(1, 0);
    // grad_param = J^{-T} grad_ref
    out.grad_param = {(J(1, 1) * gref.x - J(1, 0) * gref.y) / det,
                      (-J(0, 1) * gref.x + J(0, 0) * gref.y) / det};
    Eigen::Matrix<double, 3, 2> Jx = sys.chart->jacobian(z.x, z.y);
    Eigen::Matrix2d G = Jx.transpose() * Jx;
    Eigen::Vector2d gp(out.grad_param.x, out.grad_param.y);
    out.grad_surface = Jx * G.inverse() * gp;
    return out;
}

}  // namespace cfm
