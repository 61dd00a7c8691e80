#include "cfm/sparse.hpp"

#include <algorithm>
#include <cmath>

namespace cfm {

SparseSym::SparseSym(int n, std::vector<int> row_ptr, std::vector<int> col_idx,
                     std::vector<double> values)
    : n_(n), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
    if (static_cast<int>(row_ptr_.size()) != n_ + 1)
        throw Error("internal", "CSR row pointer size mismatch");
}

double SparseSym::quad_form(const Eigen::VectorXd& x) const {
    double total = 0;
    for (int r = 0; r < n_; ++r) {
        double xr = x[r];
        if (xr == 0.0) continue;
        double row = 0;
        for (int k = row_ptr_[static_cast<size_t>(r)]; k < row_ptr_[static_cast<size_t>(r) + 1]; ++k)
            row += values_[static_cast<size_t>(k)] * x[col_idx_[static_cast<size_t>(k)]];
        total += xr * row;
    }
    return total;
}

Eigen::VectorXd SparseSym::multiply(const Eigen::VectorXd& x) const {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(n_);
    for (int r = 0; r < n_; ++r) {
        double acc = 0;
        for (int k = row_ptr_[static_cast<size_t>(r)]; k < row_ptr_[static_cast<size_t>(r) + 1]; ++k)
            acc += values_[static_cast<size_t>(k)] * x[col_idx_[static_cast<size_t>(k)]];
        y[r] = acc;
    }
    return y;
}

double SparseSym::max_abs() const {
    double m = 0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

double SparseSym::max_asymmetry() const {
    double m = 0;
    for (int r = 0; r < n_; ++r) {
        for (int k = row_ptr_[static_cast<size_t>(r)]; k < row_ptr_[static_cast<size_t>(r) + 1]; ++k) {
            int c = col_idx_[static_cast<size_t>(k)];
            if (c < r) continue;
            // locate (c, r)
            double vt = 0;
            for (int k2 = row_ptr_[static_cast<size_t>(c)]; k2 < row_ptr_[static_cast<size_t>(c) + 1]; ++k2)
                if (col_idx_[static_cast<size_t>(k2)] == r) {
                    vt = values_[static_cast<size_t>(k2)];
                    break;
                }
            m = std::max(m, std::abs(values_[static_cast<size_t>(k)] - vt));
        }
    }
    return m;
}

Eigen::SparseMatrix<double> SparseSym::extract(const std::vector<int>& ids) const {
    std::vector<int> map(static_cast<size_t>(n_), -1);
    for (size_t i = 0; i < ids.size(); ++i) map[static_cast<size_t>(ids[i])] = static_cast<int>(i);
    int m = static_cast<int>(ids.size());
    std::vector<Eigen::Triplet<double>> trips;
    for (int li = 0; li < m; ++li) {
        int r = ids[static_cast<size_t>(li)];
        for (int k = row_ptr_[static_cast<size_t>(r)]; k < row_ptr_[static_cast<size_t>(r) + 1]; ++k) {
            int lc = map[static_cast<size_t>(col_idx_[static_cast<size_t>(k)])];
            if (lc >= 0) trips.emplace_back(li, lc, values_[static_cast<size_t>(k)]);
        }
    }
    Eigen::SparseMatrix<double> out(m, m);
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

void SparseSym::accumulate_row(int row, double w, const std::vector<int>& map,
                               Eigen::Ref<Eigen::VectorXd> out) const {
    for (int k = row_ptr_[static_cast<size_t>(row)]; k < row_ptr_[static_cast<size_t>(row) + 1]; ++k) {
        int lc = map[static_cast<size_t>(col_idx_[static_cast<size_t>(k)])];
        if (lc >= 0) out[lc] += w * values_[static_cast<size_t>(k)];
    }
}

Factorization::Factorization(const Eigen::SparseMatrix<double>& A) : n_(static_cast<int>(A.rows())), A_(A) {
    ldlt_.compute(A_);
    bool bad = ldlt_.info() != Eigen::Success;
    int pivot = -1;
    if (!bad) {
        const auto& D = ldlt_.vectorD();
        for (int i = 0; i < D.size(); ++i)
            if (!(D[i] > 0)) {
                bad = true;
                pivot = i;
                break;
            }
    }
    if (bad)
        throw Error("indefinite-matrix",
                    "factorization failed" +
                        (pivot >= 0 ? " at pivot " + std::to_string(pivot) : std::string()));
}

Eigen::MatrixXd Factorization::solve(const Eigen::MatrixXd& rhs) const {
    if (rhs.rows() != n_) throw Error("dimension-mismatch", "rhs rows do not match the matrix");
    Eigen::MatrixXd x = ldlt_.solve(rhs);
    for (int c = 0; c < rhs.cols(); ++c) {
        double bnorm = rhs.col(c).norm();
        if (bnorm == 0.0) {
            x.col(c).setZero();
            continue;
        }
        for (int pass = 0; pass < 3; ++pass) {
            Eigen::VectorXd r = rhs.col(c) - A_ * x.col(c);
            if (r.norm() <= 1e-13 * bnorm) break;
            x.col(c) += ldlt_.solve(r);
        }
        Eigen::VectorXd r = rhs.col(c) - A_ * x.col(c);
        if (!(r.norm() <= 1e-12 * bnorm))
            throw Error("solver", "multi-solve residual stalled at " +
                                      std::to_string(r.norm() / bnorm));
    }
    return x;
}

std::shared_ptr<Factorization> factor(const Eigen::SparseMatrix<double>& A,
                                      SolverStats* stats, const std::string& phase) {
    if (stats) stats->count(phase);
    return std::make_shared<Factorization>(A);
}

Eigen::VectorXd solve_cg(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b) {
    Eigen::VectorXd inv_diag = A.diagonal().cwiseInverse();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
    Eigen::VectorXd r = b;
    Eigen::VectorXd z = inv_diag.cwiseProduct(r);
    Eigen::VectorXd p = z;
    double rz = r.dot(z);
    double bnorm = b.norm();
    if (bnorm == 0) return x;
    for (int it = 0; it < 20 * b.size(); ++it) {
        Eigen::VectorXd Ap = A * p;
        double alpha = rz / p.dot(Ap);
        x += alpha * p;
        r -= alpha * Ap;
        if (r.norm() <= 1e-13 * bnorm) return x;
        z = inv_diag.cwiseProduct(r);
        double rz_new = r.dot(z);
        p = z + (rz_new / rz) * p;
        rz = rz_new;
    }
    throw Error("solver", "conjugate gradient fallback did not converge");
}

SchurReduced schur_reduced(const SparseSym& A, const std::vector<int>& free_ids,
                           const Factorization& f_free,
                           const std::vector<std::vector<int>>& blocks) {
    int nb = static_cast<int>(blocks.size());
    int nf = static_cast<int>(free_ids.size());
    std::vector<int> free_map(static_cast<size_t>(A.dim()), -1);
    for (size_t i = 0; i < free_ids.size(); ++i)
        free_map[static_cast<size_t>(free_ids[i])] = static_cast<int>(i);
    std::vector<int> block_of(static_cast<size_t>(A.dim()), -1);
    for (int j = 0; j < nb; ++j)
        for (int d : blocks[static_cast<size_t>(j)]) block_of[static_cast<size_t>(d)] = j;

    // B = A_{I,D} R, one dense column per block.
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(nf, nb);
    SchurReduced out;
    out.K0 = Eigen::MatrixXd::Zero(nb, nb);
    for (int j = 0; j < nb; ++j) {
        for (int d : blocks[static_cast<size_t>(j)]) {
            A.accumulate_row(d, 1.0, free_map, B.col(j));
            // K0(j, j2) += sum of A(d, c) over c in block j2
            for (int k = A.row_ptr()[static_cast<size_t>(d)]; k < A.row_ptr()[static_cast<size_t>(d) + 1]; ++k) {
                int bj = block_of[static_cast<size_t>(A.col_idx()[static_cast<size_t>(k)])];
                if (bj >= 0) out.K0(j, bj) += A.values()[static_cast<size_t>(k)];
            }
        }
    }
    Eigen::MatrixXd X = f_free.solve(B);
    out.K1 = B.transpose() * X;
    out.K1 = 0.5 * (out.K1 + out.K1.transpose()).eval();  // symmetrize roundoff
    out.S = out.K0 - out.K1;
    return out;
}

}  // namespace cfm
