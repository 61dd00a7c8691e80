#pragma once

#include "cfm/assemble.hpp"

namespace cfm {

struct Solution {
    Eigen::VectorXd x;  // full coefficient vector in matrix ids
    double energy = 0.0;
    std::shared_ptr<Factorization> factorization;  // free-block factors, reusable
    std::vector<int> free_ids;
};

struct SolveContext {
    SolverStats stats;
    Timings timings;
};

// Solves A_II x_I = -A_IF x_F for the given free/fixed split and fixed
// values, reusing `reuse` as the free-block factorization when provided.
Solution solve_dirichlet(const AssembledSystem& sys, const std::vector<int>& free,
                         const std::vector<int>& fixed, const Eigen::VectorXd& fixed_values,
                         SolveContext& ctx,
                         std::shared_ptr<Factorization> reuse = nullptr);

// Mixed problem under the system's primary partition: unit value on the
// Dirichlet-1 vertex dofs, zero elsewhere fixed, holes free.
Solution solve_primary(const AssembledSystem& sys, SolveContext& ctx);

struct EvalResult {
    double value = 0.0;
    Vec2 grad_param;               // gradient in the parameter plane
    Eigen::Vector3d grad_surface;  // tangential gradient on the chart image
};

// Evaluates a coefficient vector at a reference point of one element.
EvalResult evaluate(const AssembledSystem& sys, const Eigen::VectorXd& x, int element,
                    const Vec2& ref_point);

}  // namespace cfm
