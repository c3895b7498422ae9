/** @file test_spline.cpp

    @brief Knot vectors, basis evaluation, Greville points, quadrature.
*/
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ieti/error.hpp"
#include "ieti/spline.hpp"

#include <cmath>
#include <random>

using namespace ieti;

namespace {

// dimension by explicit knot insertion into the Bernstein knot vector
int enumerate_dimension(int p, int alpha, int level)
{
    std::vector<double> knots(p + 1, 0.0);
    const int n = 1 << level;
    for (int i = 1; i < n; ++i)
        for (int m = 0; m < p - alpha; ++m)
            knots.push_back(static_cast<double>(i) / n);
    knots.insert(knots.end(), p + 1, 1.0);
    return static_cast<int>(knots.size()) - p - 1;
}

} // namespace

TEST_CASE("make_space dimensions")
{
    CHECK(make_space(3, 1, 2).dimension() == 10);
    CHECK(make_space(2, 1, 2).dimension() == 6);
    const KnotVector b = make_space(1, 0, 0);
    CHECK(b.knots() == std::vector<double>{0, 0, 1, 1});
    CHECK(b.dimension() == 2);

    for (int p = 1; p <= 7; ++p)
        for (int a = 0; a < p; ++a)
            for (int l = 0; l <= 5; ++l) {
                const KnotVector kv = make_space(p, a, l);
                CHECK(kv.dimension() == enumerate_dimension(p, a, l));
                CHECK(kv.num_elements() == (1 << l));
            }
}

TEST_CASE("invalid spaces")
{
    CHECK_THROWS_AS(make_space(2, 2, 1), Error);
    try {
        make_space(3, 5, 0);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidSmoothness);
    }
    CHECK_THROWS_AS(make_space(2, -1, 1), Error);
    CHECK_THROWS_AS(KnotVector(2, {0, 0, 1, 1}), Error);        // not clamped
    CHECK_THROWS_AS(KnotVector(1, {0, 0, 0.5, 0.5, 1, 1}), Error); // multiplicity > degree
}

TEST_CASE("hat functions")
{
    const BasisValues b = eval_basis(make_space(1, 0, 0), 0.5, 1);
    CHECK(b.first == 0);
    CHECK(b.values(0, 0) == doctest::Approx(0.5));
    CHECK(b.values(0, 1) == doctest::Approx(0.5));
    CHECK(b.values(1, 0) == doctest::Approx(-1.0));
    CHECK(b.values(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("quadratic C1 basis against closed form")
{
    // knots 0,0,0,1/2,1,1,1; polynomial pieces on [0,1/2]
    const double t = 0.3;
    const double expected[4] = {(1 - 2 * t) * (1 - 2 * t), 4 * t - 6 * t * t, 2 * t * t, 0.0};
    const double dexpected[4] = {-4 * (1 - 2 * t), 4 - 12 * t, 4 * t, 0.0};
    const KnotVector kv = make_space(2, 1, 1);
    const BasisValues b = eval_basis(kv, t, 1);
    for (int a = 0; a <= 2; ++a) {
        CHECK(b.values(0, a) == doctest::Approx(expected[b.first + a]).epsilon(1e-14));
        CHECK(b.values(1, a) == doctest::Approx(dexpected[b.first + a]).epsilon(1e-13));
    }
    // second piece at t = 0.8
    const double s = 0.8;
    const BasisValues c = eval_basis(kv, s, 0);
    CHECK(c.first == 1);
    CHECK(c.values(0, 0) == doctest::Approx(2 * (s - 1) * (s - 1)));
    CHECK(c.values(0, 1) == doctest::Approx(-2 * (s - 1) * (3 * s - 1)));
    CHECK(c.values(0, 2) == doctest::Approx((2 * s - 1) * (2 * s - 1)));
}

TEST_CASE("partition of unity and derivative consistency")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int p = 1; p <= 7; ++p)
        for (int l = 0; l <= 5; ++l) {
            const KnotVector kv = make_space(p, p - 1, l);
            const KnotVector kv0 = make_space(p, 0, l);
            for (int r = 0; r < 1000; ++r) {
                const double t = u01(rng);
                for (const KnotVector* k : {&kv, &kv0}) {
                    const BasisValues b = eval_basis(*k, t, 1);
                    REQUIRE(b.values.cols() == p + 1);
                    CHECK(std::abs(b.values.row(0).sum() - 1.0) <= 1e-12);
                    CHECK(std::abs(b.values.row(1).sum()) <= 1e-9 * (1 << l) * p);
                }
            }
        }

    // central differences, step 1e-6, away from knots
    const double h = 1e-6;
    for (int p = 2; p <= 6; ++p) {
        const KnotVector kv = make_space(p, p - 1, 2);
        for (int r = 0; r < 50; ++r) {
            double t = u01(rng);
            const double cell = t * 4.0 - std::floor(t * 4.0);
            if (cell < 1e-3 || cell > 1 - 1e-3)
                continue;
            const BasisValues b = eval_basis(kv, t, 1);
            const BasisValues bp = eval_basis(kv, t + h, 0);
            const BasisValues bm = eval_basis(kv, t - h, 0);
            REQUIRE(bp.first == b.first);
            REQUIRE(bm.first == b.first);
            for (int a = 0; a <= p; ++a) {
                const double fd = (bp.values(0, a) - bm.values(0, a)) / (2 * h);
                const double d = b.values(1, a);
                CHECK(std::abs(fd - d) <= 1e-6 * std::max(1.0, std::abs(d)));
            }
        }
    }
}

TEST_CASE("interface trace identity")
{
    const KnotVector a = make_space(3, 2, 3);
    const KnotVector b = make_space(3, 2, 3);
    for (double t : {0.0, 0.1, 0.125, 0.33, 0.5, 0.9, 1.0}) {
        const BasisValues x = eval_basis(a, t, 2), y = eval_basis(b, t, 2);
        CHECK(x.first == y.first);
        CHECK((x.values.array() == y.values.array()).all());
    }
}

TEST_CASE("evaluation outside the unit interval")
{
    const KnotVector kv = make_space(2, 1, 1);
    CHECK_THROWS_AS(eval_basis(kv, -1e-3, 0), Error);
    CHECK_THROWS_AS(eval_basis(kv, 1.5, 0), Error);
    // end points are valid
    CHECK(eval_basis(kv, 1.0, 0).values(0, 2) == doctest::Approx(1.0));
}

TEST_CASE("greville points")
{
    CHECK(greville_points(make_space(1, 0, 0)) == std::vector<double>{0, 1});
    const auto g2 = greville_points(KnotVector(2, {0, 0, 0, 1, 1, 1}));
    REQUIRE(g2.size() == 3);
    CHECK(g2[1] == doctest::Approx(0.5));
    const KnotVector kv = make_space(3, 1, 1);
    const auto g = greville_points(kv);
    REQUIRE(g.size() == 6);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == 1.0);
    // direct averaging of knots
    for (std::size_t i = 0; i < g.size(); ++i) {
        double s = 0.0;
        for (int j = 1; j <= 3; ++j)
            s += kv.knots()[i + j];
        CHECK(g[i] == doctest::Approx(s / 3.0));
        CHECK(g[i] == doctest::Approx(1.0 - g[g.size() - 1 - i]));
        if (i > 0)
            CHECK(g[i] >= g[i - 1]);
    }
}

TEST_CASE("tensor index bijection")
{
    const TensorSplineSpace s(make_space(3, 2, 2), make_space(2, 1, 1));
    CHECK(s.dimension() == s.size(0) * s.size(1));
    for (int k = 0; k < s.dimension(); ++k) {
        const auto ij = s.multi_index(k);
        CHECK(s.index(ij[0], ij[1]) == k);
    }
}

TEST_CASE("gauss legendre exactness")
{
    for (int n = 1; n <= 10; ++n) {
        const QuadratureRule q = gauss_legendre(n);
        REQUIRE(q.nodes.size() == static_cast<std::size_t>(n));
        for (int d = 0; d <= 2 * n - 1; ++d) {
            double s = 0.0;
            for (int i = 0; i < n; ++i)
                s += q.weights[i] * std::pow(q.nodes[i], d);
            CHECK(s == doctest::Approx(1.0 / (d + 1)).epsilon(1e-13));
        }
    }
}
