#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "cfm/common.hpp"

namespace cfm {

// Counters shared by one pipeline run; the solve path asserts factorization
// reuse through them.
struct SolverStats {
    int factorizations = 0;
    std::map<std::string, int> by_phase;

    void count(const std::string& phase) {
        ++factorizations;
        ++by_phase[phase];
    }
};

// Symmetric sparse matrix in full (both triangles) CSR form. Rows double as
// columns, which keeps block extraction and column accumulation simple.
class SparseSym {
public:
    SparseSym() = default;
    SparseSym(int n, std::vector<int> row_ptr, std::vector<int> col_idx,
              std::vector<double> values);

    int dim() const { return n_; }
    std::int64_t nnz() const { return static_cast<std::int64_t>(col_idx_.size()); }
    const std::vector<int>& row_ptr() const { return row_ptr_; }
    const std::vector<int>& col_idx() const { return col_idx_; }
    const std::vector<double>& values() const { return values_; }

    double quad_form(const Eigen::VectorXd& x) const;  // x^T A x
    Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;
    double max_abs() const;
    double max_asymmetry() const;  // max |A - A^T|, 0 by construction

    // Principal submatrix on `ids` (new contiguous numbering in `ids` order).
    Eigen::SparseMatrix<double> extract(const std::vector<int>& ids) const;

    // out[map[c]] += w * A(row, c) for every entry of `row` with map[c] >= 0.
    void accumulate_row(int row, double w, const std::vector<int>& map,
                        Eigen::Ref<Eigen::VectorXd> out) const;

private:
    int n_ = 0;
    std::vector<int> row_ptr_;
    std::vector<int> col_idx_;
    std::vector<double> values_;
};

// Cached symmetric factorization (simplicial LDLT with fill-reducing
// ordering). Failure reports the first nonpositive pivot.
class Factorization {
public:
    explicit Factorization(const Eigen::SparseMatrix<double>& A);

    int dim() const { return n_; }
    // Column-wise solves against the cached factors; each column is refined
    // until its residual is <= 1e-13 * |rhs|.
    Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;

private:
    int n_ = 0;
    Eigen::SparseMatrix<double> A_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
};

std::shared_ptr<Factorization> factor(const Eigen::SparseMatrix<double>& A,
                                      SolverStats* stats, const std::string& phase);

// Jacobi-preconditioned conjugate gradients; fallback when a factorization is
// unavailable. Relative residual target 1e-13.
Eigen::VectorXd solve_cg(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b);

// Reduced quadratic form S = R^T (A_DD - A_DI A_II^{-1} A_ID) R for the 0/1
// block-summing reduction R defined by `blocks` (lists of dof ids). Also
// returns the two parts K0 = R^T A_DD R and K1 = R^T A_DI A_II^{-1} A_ID R.
struct SchurReduced {
    Eigen::MatrixXd S;
    Eigen::MatrixXd K0;
    Eigen::MatrixXd K1;
};
SchurReduced schur_reduced(const SparseSym& A, const std::vector<int>& free_ids,
                           const Factorization& f_free,
                           const std::vector<std::vector<int>>& blocks);

}  // namespace cfm
