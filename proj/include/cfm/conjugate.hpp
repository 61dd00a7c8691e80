#pragma once

#include "cfm/solve.hpp"

namespace cfm {

// 0/1 block-summing reduction: column 0 collapses the Dirichlet-1 vertex
// block, column i+1 collapses hole i's vertex block. Only vertex dofs carry
// boundary constants in the hierarchic basis, so higher modes are excluded
// before the reduction.
struct ReductionMatrix {
    std::vector<int> block_sizes;  // k_0 .. k_n

    int rows() const {
        int m = 0;
        for (int k : block_sizes) m += k;
        return m;
    }
    int cols() const { return static_cast<int>(block_sizes.size()); }
    Eigen::MatrixXd to_dense() const;
};

ReductionMatrix build_reduction(const DofPartition& conjugate_partition);

// Reduced Schur energy and the hole potentials that make it stationary.
struct ConjugateSetup {
    DofPartition partition;  // conjugate-role partition
    ReductionMatrix R;
    Eigen::MatrixXd K0;  // R^T A_DD R
    Eigen::MatrixXd K1;  // R^T A_DI A_II^{-1} A_ID R
    Eigen::MatrixXd S;   // K0 - K1, reduced energy form
    Eigen::VectorXd delta;
    bool delta_in_range = true;  // all potentials strictly inside (0,1)
    std::shared_ptr<Factorization> factorization;  // conjugate free block
};

// Builds the conjugate partition, factors its free block once, forms
// S = R^T (A_DD - A_DI A_II^{-1} A_ID) R via multi-solves against that
// factorization, and solves the stationarity system
// S[2:,2:] delta = -S[2:,1]. The factorization is retained for the conjugate
// solve. The hole potentials minimize the reduced quadratic; the linear-term
// convention follows from stationarity of y^T S y at y = (1, delta).
ConjugateSetup solve_hole_potentials(const AssembledSystem& sys, SolveContext& ctx);

// Dirichlet data of the conjugate problem: v = 0 on gamma_2, v = 1 on
// gamma_4, v = delta_i on each hole boundary (both sides of a cut), Neumann
// on gamma_1 and gamma_3.
struct ConjugateProblem {
    std::vector<int> free;
    std::vector<int> fixed;
    Eigen::VectorXd fixed_values;
};

ConjugateProblem build_conjugate_system(const AssembledSystem& sys,
                                        const ConjugateSetup& setup);

// Full conjugate solve, reusing the setup's factorization.
Solution solve_conjugate(const AssembledSystem& sys, const ConjugateSetup& setup,
                         SolveContext& ctx);

// Energy of the conjugate problem for explicitly prescribed hole potentials;
// the brute-force oracle in the tests minimizes this by search.
double conjugate_energy_for(const AssembledSystem& sys, const ConjugateSetup& setup,
                            const Eigen::VectorXd& delta, SolveContext& ctx);

}  // namespace cfm
