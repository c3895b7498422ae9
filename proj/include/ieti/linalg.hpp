/** @file linalg.hpp

    @brief Sparse storage, sparse direct factorizations and the symmetric
    tridiagonal eigensolver used for Lanczos condition estimates.
*/
#pragma once

#include <Eigen/Core>
#include <Eigen/Sparse>

#include <memory>
#include <vector>

namespace ieti {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

enum class FactorKind { SPD, SymmetricIndefinite };

/// Reusable sparse factorization. Solves are const and may be issued
/// concurrently against one instance.
class Factorization {
public:
    Factorization() = default;

    /// Cholesky (AMD ordering) for SPD, threshold-pivoted LU (COLAMD
    /// ordering) for symmetric indefinite.
    static Factorization factorize(const SparseMatrix& a, FactorKind kind);

    FactorKind kind() const { return kind_; }
    Eigen::Index rows() const { return rows_; }
    bool empty() const { return !llt_ && !lu_; }

    Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
    Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const;

private:
    struct Llt;
    struct Lu;
    FactorKind kind_ = FactorKind::SPD;
    Eigen::Index rows_ = 0;
    std::shared_ptr<const Llt> llt_;
    std::shared_ptr<const Lu> lu_;
};

/// Eigenvalues, ascending, of the symmetric tridiagonal matrix with
/// diagonal `alpha` and off-diagonal `beta` (beta.size() == alpha.size()-1).
std::vector<double> tridiag_eigenvalues(const std::vector<double>& alpha,
                                        const std::vector<double>& beta);

/// Rows/columns `rows` x `cols` of a sparse matrix.
SparseMatrix submatrix(const SparseMatrix& a, const std::vector<int>& rows,
                       const std::vector<int>& cols);

Eigen::VectorXd gather(const Eigen::VectorXd& x, const std::vector<int>& idx);

} // namespace ieti
