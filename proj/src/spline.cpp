/** @file spline.cpp

    @brief B-spline knot vectors, Cox-de Boor evaluation and Gauss rules.
*/
#include "ieti/spline.hpp"

#include "ieti/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace ieti {

const char* to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::InvalidSmoothness: return "invalid smoothness";
    case ErrorKind::InvalidKnotVector: return "invalid knot vector";
    case ErrorKind::OutOfDomain: return "out of domain";
    case ErrorKind::Geometry: return "geometry error";
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::NonMatchingInterface: return "non-matching interface";
    case ErrorKind::Conformity: return "conformity error";
    case ErrorKind::FullyMatching: return "fully-matching violation";
    case ErrorKind::Multiplicity: return "multiplicity error";
    case ErrorKind::UnknownVariant: return "unknown variant";
    case ErrorKind::SingularMatrix: return "singular matrix";
    case ErrorKind::DimensionMismatch: return "dimension mismatch";
    case ErrorKind::Configuration: return "configuration error";
    case ErrorKind::SizeGuard: return "size guard exceeded";
    case ErrorKind::Io: return "i/o error";
    }
    return "error";
}

KnotVector::KnotVector(int degree, std::vector<double> knots)
    : degree_(degree), knots_(std::move(knots))
{
    if (degree_ < 1)
        throw Error(ErrorKind::InvalidKnotVector, "degree must be at least 1");
    if (!std::is_sorted(knots_.begin(), knots_.end()))
        throw Error(ErrorKind::InvalidKnotVector, "knots must be nondecreasing");
    if (static_cast<int>(knots_.size()) < 2 * (degree_ + 1))
        throw Error(ErrorKind::InvalidKnotVector, "too few knots for the degree");
    const double a = knots_.front();
    const double b = knots_.back();
    if (a != 0.0 || b != 1.0)
        throw Error(ErrorKind::InvalidKnotVector, "parameter domain must be [0,1]");
    for (int i = 0; i <= degree_; ++i) {
        if (knots_[i] != a || knots_[knots_.size() - 1 - i] != b)
            throw Error(ErrorKind::InvalidKnotVector, "knot vector is not open");
    }
    // interior multiplicities
    std::size_t i = degree_ + 1;
    while (i < knots_.size() - degree_ - 1) {
        std::size_t j = i;
        while (j < knots_.size() && knots_[j] == knots_[i])
            ++j;
        if (knots_[i] != b && static_cast<int>(j - i) > degree_)
            throw Error(ErrorKind::InvalidKnotVector,
                        "interior multiplicity exceeds the degree");
        i = j;
    }
}

std::vector<double> KnotVector::breaks() const
{
    std::vector<double> out;
    for (double k : knots_)
        if (out.empty() || out.back() != k)
            out.push_back(k);
    return out;
}

int KnotVector::find_span(double t) const
{
    const int n = dimension();
    if (t >= knots_[n])
        return n - 1;
    // last mu with knots[mu] <= t
    const auto it = std::upper_bound(knots_.begin() + degree_, knots_.begin() + n + 1, t);
    return static_cast<int>(it - knots_.begin()) - 1;
}

KnotVector make_space(int degree, int smoothness, int level, int base_elements)
{
    if (smoothness < 0 || smoothness >= degree) {
        std::ostringstream os;
        os << "smoothness " << smoothness << " not in [0, " << degree << ")";
        throw Error(ErrorKind::InvalidSmoothness, os.str());
    }
    if (level < 0 || base_elements < 1)
        throw Error(ErrorKind::InvalidKnotVector, "level must be >= 0 and element count >= 1");
    const int n_el = base_elements << level;
    const int mult = degree - smoothness;
    std::vector<double> knots(degree + 1, 0.0);
    for (int i = 1; i < n_el; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(n_el);
        knots.insert(knots.end(), mult, t);
    }
    knots.insert(knots.end(), degree + 1, 1.0);
    return KnotVector(degree, std::move(knots));
}

BasisValues eval_basis(const KnotVector& kv, double t, int max_deriv)
{
    if (!(t >= 0.0 && t <= 1.0)) {
        std::ostringstream os;
        os << "parameter " << t << " outside [0,1]";
        throw Error(ErrorKind::OutOfDomain, os.str());
    }
    const int p = kv.degree();
    const auto& U = kv.knots();
    const int span = kv.find_span(t);

    // triangular table: ndu(j, r) holds basis values (upper) and knot
    // differences (lower)
    Eigen::MatrixXd ndu(p + 1, p + 1);
    std::vector<double> left(p + 1), right(p + 1);
    ndu(0, 0) = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = t - U[span + 1 - j];
        right[j] = U[span + j] - t;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            ndu(j, r) = right[r + 1] + left[j - r];
            const double temp = ndu(r, j - 1) / ndu(j, r);
            ndu(r, j) = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu(j, j) = saved;
    }

    BasisValues out;
    out.first = span - p;
    out.values = Eigen::MatrixXd::Zero(max_deriv + 1, p + 1);
    for (int j = 0; j <= p; ++j)
        out.values(0, j) = ndu(j, p);

    const int nd = std::min(max_deriv, p);
    Eigen::MatrixXd a(2, p + 1);
    for (int r = 0; r <= p; ++r) {
        int s1 = 0, s2 = 1;
        a(0, 0) = 1.0;
        for (int k = 1; k <= nd; ++k) {
            double d = 0.0;
            const int rk = r - k;
            const int pk = p - k;
            if (r >= k) {
                a(s2, 0) = a(s1, 0) / ndu(pk + 1, rk);
                d = a(s2, 0) * ndu(rk, pk);
            }
            const int j1 = rk >= -1 ? 1 : -rk;
            const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
            for (int j = j1; j <= j2; ++j) {
                a(s2, j) = (a(s1, j) - a(s1, j - 1)) / ndu(pk + 1, rk + j);
                d += a(s2, j) * ndu(rk + j, pk);
            }
            if (r <= pk) {
                a(s2, k) = -a(s1, k - 1) / ndu(pk + 1, r);
                d += a(s2, k) * ndu(r, pk);
            }
            out.values(k, r) = d;
            std::swap(s1, s2);
        }
    }
    double factor = p;
    for (int k = 1; k <= nd; ++k) {
        out.values.row(k) *= factor;
        factor *= (p - k);
    }
    return out;
}

std::vector<double> greville_points(const KnotVector& kv)
{
    const int p = kv.degree();
    const auto& U = kv.knots();
    std::vector<double> g(kv.dimension());
    for (int i = 0; i < kv.dimension(); ++i) {
        double s = 0.0;
        for (int k = 1; k <= p; ++k)
            s += U[i + k];
        g[i] = s / p;
    }
    // exact end values despite rounding in the sums
    g.front() = 0.0;
    g.back() = 1.0;
    return g;
}

TensorSplineSpace::TensorSplineSpace(KnotVector u, KnotVector v) : u_(std::move(u)), v_(std::move(v)) {}

QuadratureRule gauss_legendre(int num_points)
{
    if (num_points < 1)
        throw Error(ErrorKind::DimensionMismatch, "quadrature needs at least one point");
    const int n = num_points;
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Newton on P_n from the Chebyshev-like initial guess
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        // map [-1,1] -> [0,1]; x is the larger root of the pair
        rule.nodes[i] = 0.5 * (1.0 - x);
        rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
        rule.weights[i] = 0.5 * w;
        rule.weights[n - 1 - i] = 0.5 * w;
    }
    if (n % 2 == 1)
        rule.nodes[n / 2] = 0.5;
    return rule;
}

} // namespace ieti
