/** @file test_bench.cpp

    @brief Manufactured problem, sweep driver, report formats and the
    monolithic reference solve.
*/
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ieti/bench.hpp"
#include "ieti/error.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace ieti;

namespace {

std::vector<std::string> lines(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string l;
    while (std::getline(ss, l))
        out.push_back(l);
    return out;
}

std::vector<std::string> fields(const std::string& line, char sep = ',')
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, sep))
        out.push_back(f);
    if (!line.empty() && line.back() == sep)
        out.push_back("");
    return out;
}

// sixth-order central differences
template <class F>
double d1(F f, double h)
{
    return (-f(-3 * h) + 9 * f(-2 * h) - 45 * f(-h) + 45 * f(h) - 9 * f(2 * h) + f(3 * h)) / (60 * h);
}

template <class F>
double d2(F f, double h)
{
    return (2 * f(-3 * h) - 27 * f(-2 * h) + 270 * f(-h) - 490 * f(0) + 270 * f(h) - 27 * f(2 * h) +
            2 * f(3 * h)) /
           (180 * h * h);
}

ResultRow row(int l, int p, PrimalVariant v, Preconditioner m, int it, std::optional<double> k,
              std::string status = "ok")
{
    ResultRow r;
    r.domain = "unit-square";
    r.level = l;
    r.degree = p;
    r.variant = v;
    r.precond = m;
    r.iterations = it;
    r.kappa = k;
    r.seconds = 0.25;
    r.status = std::move(status);
    return r;
}

} // namespace

TEST_CASE("integer lists")
{
    CHECK(parse_int_list("2..5") == std::vector<int>{2, 3, 4, 5});
    CHECK(parse_int_list("2,3") == std::vector<int>{2, 3});
    CHECK(parse_int_list("4") == std::vector<int>{4});
    CHECK_THROWS_AS(parse_int_list(""), Error);
    CHECK_THROWS_AS(parse_int_list("5..2"), Error);
    CHECK_THROWS_AS(parse_int_list("a"), Error);
}

TEST_CASE("configuration validation")
{
    ExperimentConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.levels = {0};
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg.levels = {1};
    cfg.degrees = {1};
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg.degrees = {2};
    cfg.variants.clear();
    CHECK_THROWS_AS(cfg.validate(), Error);
    CHECK(parse_format("markdown") == ReportFormat::Markdown);
    CHECK_THROWS_AS(parse_format("xml"), Error);
    CHECK_THROWS_AS(make_domain("yeti"), Error);
    CHECK_THROWS_AS(make_domain("circle"), Error);
}

TEST_CASE("manufactured solution satisfies the strong form")
{
    const BenchmarkProblem bp = benchmark_problem();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u01(0.05, 0.95);
    const double h = 1e-2;
    for (int t = 0; t < 20; ++t) {
        const Point x{u01(rng), u01(rng)};
        const auto ux = [&](int c, int dir) {
            return [&, c, dir](double s) {
                Point y = x;
                y[dir] += s;
                return bp.u(y)[c];
            };
        };
        const auto px = [&](int dir) {
            return [&, dir](double s) {
                Point y = x;
                y[dir] += s;
                return bp.p(y);
            };
        };
        const double div = d1(ux(0, 0), h) + d1(ux(1, 1), h);
        CHECK(std::abs(div) <= 1e-10);
        for (int c = 0; c < 2; ++c) {
            const double lap = d2(ux(c, 0), h) + d2(ux(c, 1), h);
            const double res = -lap - d1(px(c), h) - bp.f(x)[c];
            CHECK(std::abs(res) <= 1e-10 * 20.0);
        }
    }
}

TEST_CASE("pressure shift gives zero mean")
{
    for (const std::string name : {"unit-square", "quarter-annulus"}) {
        const Domain d = make_domain(name);
        const BenchmarkProblem bp = benchmark_problem(&d.mp);
        CHECK(std::abs(domain_mean(d.mp, bp.p)) <= 1e-12);
    }
    // sin(pi x) on the unit square has mean 2/pi
    const Domain sq = make_domain("unit-square");
    CHECK(benchmark_problem(&sq.mp).pressure_shift == doctest::Approx(-2.0 / 3.14159265358979323846));
}

TEST_CASE("csv report")
{
    const std::vector<ResultRow> rows{
        row(2, 2, PrimalVariant::CornersEdges, Preconditioner::PoissonDirichlet, 11, 3.5),
        row(2, 3, PrimalVariant::CornersEdges, Preconditioner::PoissonDirichlet, 12, std::nullopt,
            "kappa-nan")};
    std::ostringstream os;
    emit_csv(rows, os);
    const auto ls = lines(os.str());
    REQUIRE(ls.size() == 3);
    CHECK(ls[0] == "domain,level,degree,variant,precond,iterations,kappa,seconds,status");
    const auto f1 = fields(ls[1]);
    REQUIRE(f1.size() == 9);
    CHECK(f1[0] == "unit-square");
    CHECK(f1[3] == "ce");
    CHECK(f1[4] == "sd2");
    CHECK(f1[5] == "11");
    CHECK(std::stod(f1[6]) == 3.5);
    CHECK(f1[8] == "ok");
    const auto f2 = fields(ls[2]);
    REQUIRE(f2.size() == 9);
    CHECK(f2[6].empty());
    CHECK(f2[8] == "kappa-nan");
    CHECK(!all_ok(rows));
}

TEST_CASE("markdown report shape")
{
    std::vector<ResultRow> rows;
    for (int l = 2; l <= 5; ++l)
        for (int p = 2; p <= 6; ++p)
            rows.push_back(row(l, p, PrimalVariant::Corners, Preconditioner::StokesDirichlet, 10 * l + p, 1.0));
    rows[7].status = "no-converge";
    rows[8].status = "error:boom";
    std::ostringstream os;
    emit_markdown(rows, os);
    const auto ls = lines(os.str());
    REQUIRE(ls.size() == 2 + 2 + 4);
    CHECK(ls[0] == "### unit-square: variant c, preconditioner sd1");
    CHECK(ls[2] == "| l \\ p | 2 | 3 | 4 | 5 | 6 |");
    CHECK(ls[4] == "| 2 | 22 | 23 | 24 | 25 | 26 |");
    CHECK(ls[5] == "| 3 | 32 | 33 | no-converge | error | 36 |");
    for (std::size_t i = 4; i < ls.size(); ++i)
        CHECK(fields(ls[i], '|').size() == 8); // empty fields before the first and after the last bar
}

TEST_CASE("sweep rows and determinism")
{
    ExperimentConfig cfg;
    cfg.domain = "unit-square";
    cfg.levels = {1};
    cfg.degrees = {2, 3};
    cfg.variants = {PrimalVariant::Corners, PrimalVariant::CornersNormals};
    cfg.preconditioners = {Preconditioner::PoissonDirichlet};
    const auto a = run_experiment(cfg);
    REQUIRE(a.size() == 4);
    CHECK(all_ok(a));
    CHECK(a[0].degree == 2);
    CHECK(a[1].variant == PrimalVariant::CornersNormals);
    CHECK(a[2].degree == 3);
    const auto b = run_experiment(cfg);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].iterations == b[i].iterations);
        CHECK(a[i].kappa == b[i].kappa);
        CHECK(a[i].status == b[i].status);
    }
    cfg.levels = {};
    CHECK_THROWS_AS(run_experiment(cfg), Error);
}

TEST_CASE("unwritable report path")
{
    const std::vector<ResultRow> rows{row(1, 2, PrimalVariant::Corners, Preconditioner::StokesDirichlet, 3, 1.0)};
    CHECK_THROWS_AS(emit_report(rows, ReportFormat::Csv, std::filesystem::path("/nonexistent/dir/out.csv")),
                    Error);
    const auto tmp = std::filesystem::temp_directory_path() / "ieti_bench_report.md";
    emit_report(rows, ReportFormat::Markdown, tmp);
    std::ifstream in(tmp);
    std::string first;
    std::getline(in, first);
    CHECK(first.rfind("### ", 0) == 0);
    std::filesystem::remove(tmp);
}

TEST_CASE("monolithic reference")
{
    const Domain d = make_domain("quarter-annulus");
    const DiscreteStokes ds = discretize_benchmark(d, 2, 1);
    const MonolithicSolution ref = monolithic_oracle(d.mp, ds);
    const SolutionCheck chk = check_solution(d.mp, ds, ref.patches);
    CHECK(chk.max_jump <= 1e-14);
    CHECK(std::abs(chk.pressure_mean) <= 1e-12);
    CHECK(relative_difference(ref.patches, ref.patches) == 0.0);
    const BenchmarkProblem bp = benchmark_problem(&d.mp);
    const auto err = solution_errors(d.mp, ds, ref.patches, bp);
    const DiscreteStokes fine = discretize_benchmark(d, 2, 2);
    const auto err_fine = solution_errors(d.mp, fine, monolithic_oracle(d.mp, fine).patches, bp);
    // velocity converges with order p + 2 = 4, pressure with p + 1 = 3
    CHECK(err[0] / err_fine[0] > 8.0);
    CHECK(err[1] / err_fine[1] > 4.0);
    CHECK_THROWS_AS(monolithic_oracle(d.mp, ds, 100), Error);
    try {
        monolithic_oracle(d.mp, ds, 100);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SizeGuard);
    }
}
