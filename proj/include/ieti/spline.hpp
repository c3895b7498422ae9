/** @file spline.hpp

    @brief Univariate and tensor-product B-spline spaces on [0,1].

    Knot vectors are open (clamped). Spaces built by make_space place their
    breakpoints at i / (n 2^level), which is exact in binary floating point
    for the element counts used here, so knots are compared exactly.
*/
#pragma once

#include <Eigen/Core>

#include <array>
#include <vector>

namespace ieti {

class KnotVector {
public:
    KnotVector(int degree, std::vector<double> knots);

    int degree() const { return degree_; }
    const std::vector<double>& knots() const { return knots_; }
    int dimension() const { return static_cast<int>(knots_.size()) - degree_ - 1; }

    /// Distinct knot values, ascending (element break points).
    std::vector<double> breaks() const;
    int num_elements() const { return static_cast<int>(breaks().size()) - 1; }

    /// Index mu with knots[mu] <= t < knots[mu+1]; t = 1 maps to the last
    /// non-empty span.
    int find_span(double t) const;

    bool operator==(const KnotVector& other) const = default;

private:
    int degree_;
    std::vector<double> knots_;
};

/// Uniform open knot vector with `base_elements * 2^level` elements and
/// interior multiplicity `degree - smoothness`.
KnotVector make_space(int degree, int smoothness, int level, int base_elements = 1);

/// Values and derivatives of the degree+1 functions active at a parameter.
struct BasisValues {
    int first = 0;          ///< global index of the first active function
    Eigen::MatrixXd values; ///< (max_deriv+1) x (degree+1), row d = d-th derivative
};

BasisValues eval_basis(const KnotVector& kv, double t, int max_deriv);

std::vector<double> greville_points(const KnotVector& kv);

class TensorSplineSpace {
public:
    TensorSplineSpace(KnotVector u, KnotVector v);

    const KnotVector& factor(int dir) const { return dir == 0 ? u_ : v_; }
    int size(int dir) const { return factor(dir).dimension(); }
    int dimension() const { return u_.dimension() * v_.dimension(); }

    /// Lexicographic index, u index running fastest.
    int index(int i, int j) const { return j * u_.dimension() + i; }
    std::array<int, 2> multi_index(int k) const
    {
        return {k % u_.dimension(), k / u_.dimension()};
    }

    bool operator==(const TensorSplineSpace& other) const = default;

private:
    KnotVector u_;
    KnotVector v_;
};

/// Gauss-Legendre rule mapped to [0,1].
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

QuadratureRule gauss_legendre(int num_points);

} // namespace ieti
