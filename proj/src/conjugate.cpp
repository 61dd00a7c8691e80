#include "cfm/conjugate.hpp"

#include <algorithm>

namespace cfm {

Eigen::MatrixXd ReductionMatrix::to_dense() const {
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(rows(), cols());
    int row = 0;
    for (int j = 0; j < cols(); ++j)
        for (int k = 0; k < block_sizes[static_cast<size_t>(j)]; ++k) R(row++, j) = 1.0;
    return R;
}

ReductionMatrix build_reduction(const DofPartition& conjugate_partition) {
    if (!conjugate_partition.holes_fixed)
        throw Error("malformed-partition", "reduction needs the conjugate-role partition");
    ReductionMatrix R;
    R.block_sizes.push_back(static_cast<int>(conjugate_partition.D1_vertex.size()));
    for (const auto& ev : conjugate_partition.E_vertex) {
        if (ev.empty()) throw Error("malformed-partition", "hole block has no vertex dofs");
        R.block_sizes.push_back(static_cast<int>(ev.size()));
    }
    if (R.block_sizes[0] == 0)
        throw Error("malformed-partition", "Dirichlet-1 block has no vertex dofs");
    return R;
}

ConjugateSetup solve_hole_potentials(const AssembledSystem& sys, SolveContext& ctx) {
    ConjugateSetup setup;
    setup.partition = sys.partition_for(RoleAssignment::conjugate());
    setup.R = build_reduction(setup.partition);

    std::vector<int> free = setup.partition.free_ids();
    {
        ScopedTimer timer(ctx.timings, "factorization");
        Eigen::SparseMatrix<double> A_II = sys.A.extract(free);
        setup.factorization = factor(A_II, &ctx.stats, "conjugate");
    }

    {
        ScopedTimer timer(ctx.timings, "conjugate_construction");
        std::vector<std::vector<int>> blocks;
        blocks.push_back(setup.partition.D1_vertex);
        for (const auto& ev : setup.partition.E_vertex) blocks.push_back(ev);
        SchurReduced red = schur_reduced(sys.A, free, *setup.factorization, blocks);
        setup.K0 = red.K0;
        setup.K1 = red.K1;
        setup.S = red.S;

        int n = static_cast<int>(setup.partition.E.size());
        if (n > 0) {
            Eigen::MatrixXd K = setup.S.bottomRightCorner(n, n);
            Eigen::VectorXd b = -setup.S.block(1, 0, n, 1);
            Eigen::LDLT<Eigen::MatrixXd> ldlt(K);
            if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().minCoeff() > 0))
                throw Error("degenerate-configuration",
                            "reduced hole system is singular; a hole may touch a "
                            "Dirichlet boundary");
            setup.delta = ldlt.solve(b);
            for (int i = 0; i < n; ++i)
                if (!(setup.delta[i] > 0.0 && setup.delta[i] < 1.0)) setup.delta_in_range = false;
        } else {
            setup.delta.resize(0);
        }
    }
    return setup;
}

namespace {

Eigen::VectorXd conjugate_fixed_values(const AssembledSystem& sys,
                                       const DofPartition& part,
                                       const std::vector<int>& fixed,
                                       const Eigen::VectorXd& delta) {
    std::vector<double> value_of(static_cast<size_t>(sys.A.dim()), 0.0);
    for (int d : part.D1_vertex) value_of[static_cast<size_t>(d)] = 1.0;
    for (size_t i = 0; i < part.E_vertex.size(); ++i)
        for (int d : part.E_vertex[i])
            value_of[static_cast<size_t>(d)] = delta[static_cast<int>(i)];
    Eigen::VectorXd vals(static_cast<int>(fixed.size()));
    for (size_t i = 0; i < fixed.size(); ++i)
        vals[static_cast<int>(i)] = value_of[static_cast<size_t>(fixed[i])];
    return vals;
}

}  // namespace

ConjugateProblem build_conjugate_system(const AssembledSystem& sys,
                                        const ConjugateSetup& setup) {
    ConjugateProblem prob;
    prob.free = setup.partition.free_ids();
    prob.fixed = setup.partition.fixed_ids();
    prob.fixed_values = conjugate_fixed_values(sys, setup.partition, prob.fixed, setup.delta);
    return prob;
}

Solution solve_conjugate(const AssembledSystem& sys, const ConjugateSetup& setup,
                         SolveContext& ctx) {
    ConjugateProblem prob = build_conjugate_system(sys, setup);
    return solve_dirichlet(sys, prob.free, prob.fixed, prob.fixed_values, ctx,
                           setup.factorization);
}

double conjugate_energy_for(const AssembledSystem& sys, const ConjugateSetup& setup,
                            const Eigen::VectorXd& delta, SolveContext& ctx) {
    std::vector<int> free = setup.partition.free_ids();
    std::vector<int> fixed = setup.partition.fixed_ids();
    Eigen::VectorXd vals = conjugate_fixed_values(sys, setup.partition, fixed, delta);
    Solution s = solve_dirichlet(sys, free, fixed, vals, ctx, setup.factorization);
    return s.energy;
}

}  // namespace cfm
