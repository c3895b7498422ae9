/** @file linalg.cpp

    @brief Eigen-backed sparse factorizations.
*/
#include "ieti/linalg.hpp"

#include "ieti/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <cstdint>
#include <sstream>

namespace ieti {

struct Factorization::Llt {
    Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> solver;
};

struct Factorization::Lu {
    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> solver;
};

Factorization Factorization::factorize(const SparseMatrix& a, FactorKind kind)
{
    if (a.rows() != a.cols())
        throw Error(ErrorKind::DimensionMismatch, "factorize needs a square matrix");
    Factorization f;
    f.kind_ = kind;
    f.rows_ = a.rows();
    if (a.rows() == 0)
        return f;
    if (kind == FactorKind::SPD) {
        auto llt = std::make_shared<Llt>();
        llt->solver.compute(a);
        if (llt->solver.info() != Eigen::Success)
            throw Error(ErrorKind::SingularMatrix,
                        "Cholesky factorization failed (matrix not positive definite)");
        f.llt_ = std::move(llt);
    } else {
        auto lu = std::make_shared<Lu>();
        SparseMatrix c = a;
        c.makeCompressed();
        lu->solver.setPivotThreshold(0.01);
        lu->solver.analyzePattern(c);
        lu->solver.factorize(c);
        if (lu->solver.info() != Eigen::Success) {
            std::ostringstream os;
            os << "LU factorization failed: " << lu->solver.lastErrorMessage();
            throw Error(ErrorKind::SingularMatrix, os.str());
        }
        // SparseLU reports exact zero pivots only; a single solve against a
        // fixed pseudo-random vector exposes numerically singular matrices
        const double norm_a = (c.cwiseAbs() * Eigen::VectorXd::Ones(c.cols())).maxCoeff();
        Eigen::VectorXd b(c.rows());
        std::uint64_t state = 0x9E3779B97F4A7C15ull;
        for (Eigen::Index i = 0; i < b.size(); ++i) {
            state = state * 6364136223846793005ull + 1442695040888963407ull;
            b[i] = static_cast<double>(state >> 11) * 0x1.0p-53 - 0.5;
        }
        const Eigen::VectorXd x = lu->solver.solve(b);
        const double growth = norm_a * x.lpNorm<Eigen::Infinity>() / b.lpNorm<Eigen::Infinity>();
        if (!x.allFinite() || !(growth < 1e13)) {
            std::ostringstream os;
            os << "LU factorization is numerically singular (condition estimate " << growth
               << ")";
            throw Error(ErrorKind::SingularMatrix, os.str());
        }
        f.lu_ = std::move(lu);
    }
    return f;
}

Eigen::VectorXd Factorization::solve(const Eigen::VectorXd& b) const
{
    if (b.size() != rows_)
        throw Error(ErrorKind::DimensionMismatch, "right-hand side size does not match");
    if (rows_ == 0)
        return Eigen::VectorXd();
    if (llt_)
        return llt_->solver.solve(b);
    return lu_->solver.solve(b);
}

Eigen::MatrixXd Factorization::solve(const Eigen::MatrixXd& b) const
{
    if (b.rows() != rows_)
        throw Error(ErrorKind::DimensionMismatch, "right-hand side size does not match");
    if (rows_ == 0 || b.cols() == 0)
        return Eigen::MatrixXd(rows_, b.cols());
    if (llt_)
        return llt_->solver.solve(b);
    return lu_->solver.solve(b);
}

std::vector<double> tridiag_eigenvalues(const std::vector<double>& alpha,
                                        const std::vector<double>& beta)
{
    const auto n = static_cast<Eigen::Index>(alpha.size());
    if (n == 0)
        return {};
    if (static_cast<Eigen::Index>(beta.size()) != n - 1)
        throw Error(ErrorKind::DimensionMismatch, "off-diagonal must have n-1 entries");
    Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(alpha.data(), n);
    Eigen::VectorXd e(n > 1 ? n - 1 : 0);
    for (Eigen::Index i = 0; i + 1 < n; ++i)
        e[i] = beta[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd& ev = es.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

SparseMatrix submatrix(const SparseMatrix& a, const std::vector<int>& rows,
                       const std::vector<int>& cols)
{
    std::vector<int> row_pos(a.rows(), -1), col_pos(a.cols(), -1);
    for (std::size_t i = 0; i < rows.size(); ++i)
        row_pos[rows[i]] = static_cast<int>(i);
    for (std::size_t j = 0; j < cols.size(); ++j)
        col_pos[cols[j]] = static_cast<int>(j);
    std::vector<Triplet> t;
    for (int c = 0; c < a.outerSize(); ++c) {
        if (col_pos[c] < 0)
            continue;
        for (SparseMatrix::InnerIterator it(a, c); it; ++it)
            if (row_pos[it.row()] >= 0)
                t.emplace_back(row_pos[it.row()], col_pos[c], it.value());
    }
    SparseMatrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    out.setFromTriplets(t.begin(), t.end());
    return out;
}

Eigen::VectorXd gather(const Eigen::VectorXd& x, const std::vector<int>& idx)
{
    Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i)
        out[static_cast<Eigen::Index>(i)] = x[idx[i]];
    return out;
}

} // namespace ieti
