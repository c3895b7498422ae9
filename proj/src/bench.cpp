/** @file bench.cpp

    @brief Sweep runner, reference solve and report emission.
*/
#include "ieti/bench.hpp"

#include "ieti/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>

namespace ieti {

namespace {

constexpr double pi = 3.14159265358979323846;

std::string sanitize(std::string s)
{
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r' || c == '|')
            c = ';';
    return s;
}

std::string kappa_cell(const std::optional<double>& k)
{
    if (!k)
        return "";
    std::ostringstream os;
    os << std::setprecision(6) << *k;
    return os.str();
}

} // namespace

ReportFormat parse_format(const std::string& name)
{
    if (name == "csv")
        return ReportFormat::Csv;
    if (name == "markdown" || name == "md")
        return ReportFormat::Markdown;
    throw Error(ErrorKind::Configuration, "unknown format '" + name + "' (expected csv or markdown)");
}

void ExperimentConfig::validate() const
{
    if (levels.empty() || degrees.empty() || variants.empty() || preconditioners.empty())
        throw Error(ErrorKind::Configuration, "sweep lists must not be empty");
    for (int l : levels)
        if (l < 1)
            throw Error(ErrorKind::Configuration, "levels must be >= 1");
    for (int p : degrees)
        if (p < 2)
            throw Error(ErrorKind::Configuration, "degrees must be >= 2");
    if (!(tolerance > 0.0 && tolerance < 1.0))
        throw Error(ErrorKind::Configuration, "tolerance must lie in (0, 1)");
    if (domain != "unit-square" && domain != "quarter-annulus" && domain != "yeti")
        throw Error(ErrorKind::Configuration, "unknown domain '" + domain + "'");
    if (domain == "yeti" && geometry.empty())
        throw Error(ErrorKind::Configuration, "domain yeti needs a geometry file");
}

std::vector<int> parse_int_list(const std::string& text)
{
    std::vector<int> out;
    const auto dots = text.find("..");
    try {
        if (dots != std::string::npos) {
            const int a = std::stoi(text.substr(0, dots));
            const int b = std::stoi(text.substr(dots + 2));
            if (b < a)
                throw Error(ErrorKind::Parse, "empty range '" + text + "'");
            for (int i = a; i <= b; ++i)
                out.push_back(i);
            return out;
        }
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty())
                out.push_back(std::stoi(item));
    } catch (const std::logic_error&) {
        throw Error(ErrorKind::Parse, "cannot parse integer list '" + text + "'");
    }
    if (out.empty())
        throw Error(ErrorKind::Parse, "empty integer list");
    return out;
}

double domain_mean(const MultiPatch& mp, const ScalarField& q, int points)
{
    const QuadratureRule g = gauss_legendre(points);
    constexpr int cells = 8;
    double integral = 0.0, area = 0.0;
    for (const auto& patch : mp.patches())
        for (int ci = 0; ci < cells; ++ci)
            for (int cj = 0; cj < cells; ++cj)
                for (std::size_t a = 0; a < g.nodes.size(); ++a)
                    for (std::size_t b = 0; b < g.nodes.size(); ++b) {
                        const double u = (ci + g.nodes[a]) / cells;
                        const double v = (cj + g.nodes[b]) / cells;
                        Point x;
                        Eigen::Matrix2d jac;
                        patch.eval_with_jacobian(u, v, x, jac);
                        const double w =
                            g.weights[a] * g.weights[b] * std::abs(jac.determinant()) / (cells * cells);
                        integral += w * q(x);
                        area += w;
                    }
    return integral / area;
}

BenchmarkProblem benchmark_problem(const MultiPatch* mp)
{
    BenchmarkProblem bp;
    bp.f = [](const Point& x) {
        return Eigen::Vector2d(
            -pi * std::cos(pi * x[0]) - 2 * pi * pi * std::sin(pi * x[0]) * std::cos(pi * x[1]),
            2 * pi * pi * std::cos(pi * x[0]) * std::sin(pi * x[1]));
    };
    bp.u = [](const Point& x) {
        return Eigen::Vector2d(-std::sin(pi * x[0]) * std::cos(pi * x[1]),
                               std::cos(pi * x[0]) * std::sin(pi * x[1]));
    };
    if (mp)
        bp.pressure_shift = -domain_mean(*mp, [](const Point& x) { return std::sin(pi * x[0]); });
    const double c = bp.pressure_shift;
    bp.p = [c](const Point& x) { return std::sin(pi * x[0]) + c; };
    return bp;
}

Domain make_domain(const std::string& name, const std::filesystem::path& geometry)
{
    if (name == "unit-square") {
        MultiPatch mp = unit_square(8);
        ElementLayout layout = uniform_layout(mp);
        return {name, std::move(mp), std::move(layout)};
    }
    if (name == "quarter-annulus") {
        MultiPatch mp = quarter_annulus(8, 8);
        ElementLayout layout = uniform_layout(mp);
        return {name, std::move(mp), std::move(layout)};
    }
    if (name == "yeti") {
        MultiPatch mp = load_multipatch(geometry);
        ElementLayout layout = layout_from_geometry(mp);
        return {name, std::move(mp), std::move(layout)};
    }
    throw Error(ErrorKind::Configuration, "unknown domain '" + name + "'");
}

DiscreteStokes discretize_benchmark(const Domain& d, int p, int level)
{
    const BenchmarkProblem bp = benchmark_problem();
    return discretize(d.mp, d.layout, p, level, bp.f, bp.u);
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg)
{
    cfg.validate();
    std::vector<ResultRow> rows;
    std::optional<Domain> domain;
    std::string domain_error;
    try {
        domain.emplace(make_domain(cfg.domain, cfg.geometry));
    } catch (const std::exception& e) {
        domain_error = e.what();
    }

    for (int level : cfg.levels)
        for (int p : cfg.degrees) {
            std::optional<DiscreteStokes> ds;
            std::string ds_error = domain_error;
            if (domain && ds_error.empty()) {
                try {
                    ds.emplace(discretize_benchmark(*domain, p, level));
                } catch (const std::exception& e) {
                    ds_error = e.what();
                }
            }
            for (PrimalVariant v : cfg.variants)
                for (Preconditioner m : cfg.preconditioners) {
                    ResultRow row;
                    row.domain = cfg.domain;
                    row.level = level;
                    row.degree = p;
                    row.variant = v;
                    row.precond = m;
                    if (!ds) {
                        row.status = "error:" + sanitize(ds_error);
                        rows.push_back(row);
                        continue;
                    }
                    try {
                        IetiDpSolver solver(domain->mp, *ds, v, m);
                        const SolveReport rep = solver.solve(cfg.tolerance, cfg.seed);
                        row.iterations = rep.iterations;
                        row.kappa = rep.kappa;
                        row.seconds = rep.seconds;
                        if (!rep.converged)
                            row.status = "no-converge";
                        else if (!rep.kappa)
                            row.status = "kappa-nan";
                        else
                            row.status = "ok";
                    } catch (const std::exception& e) {
                        row.status = "error:" + sanitize(e.what());
                    }
                    rows.push_back(row);
                }
        }
    return rows;
}

bool all_ok(const std::vector<ResultRow>& rows)
{
    return std::all_of(rows.begin(), rows.end(), [](const ResultRow& r) { return r.status == "ok"; });
}

void emit_csv(const std::vector<ResultRow>& rows, std::ostream& os)
{
    os << "domain,level,degree,variant,precond,iterations,kappa,seconds,status\n";
    for (const auto& r : rows)
        os << r.domain << ',' << r.level << ',' << r.degree << ',' << to_string(r.variant) << ','
           << to_string(r.precond) << ',' << r.iterations << ',' << kappa_cell(r.kappa) << ','
           << std::fixed << std::setprecision(4) << r.seconds << std::defaultfloat << ','
           << r.status << '\n';
}

void emit_markdown(const std::vector<ResultRow>& rows, std::ostream& os)
{
    // one table per (variant, preconditioner), in first-appearance order
    std::vector<std::pair<PrimalVariant, Preconditioner>> keys;
    std::vector<int> levels, degrees;
    for (const auto& r : rows) {
        const auto key = std::make_pair(r.variant, r.precond);
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            keys.push_back(key);
        if (std::find(levels.begin(), levels.end(), r.level) == levels.end())
            levels.push_back(r.level);
        if (std::find(degrees.begin(), degrees.end(), r.degree) == degrees.end())
            degrees.push_back(r.degree);
    }
    std::sort(levels.begin(), levels.end());
    std::sort(degrees.begin(), degrees.end());

    bool first = true;
    for (const auto& [v, m] : keys) {
        if (!first)
            os << '\n';
        first = false;
        const std::string dom = rows.empty() ? "" : rows.front().domain;
        os << "### " << dom << ": variant " << to_string(v) << ", preconditioner " << to_string(m)
           << "\n\n";
        os << "| l \\ p |";
        for (int p : degrees)
            os << ' ' << p << " |";
        os << "\n|---|";
        for (std::size_t i = 0; i < degrees.size(); ++i)
            os << "---|";
        os << '\n';
        for (int l : levels) {
            os << "| " << l << " |";
            for (int p : degrees) {
                auto it = std::find_if(rows.begin(), rows.end(), [&](const ResultRow& r) {
                    return r.variant == v && r.precond == m && r.level == l && r.degree == p;
                });
                os << ' ';
                if (it != rows.end()) {
                    if (it->status == "ok" || it->status == "kappa-nan")
                        os << it->iterations;
                    else
                        os << (it->status.rfind("error", 0) == 0 ? "error" : it->status);
                }
                os << " |";
            }
            os << '\n';
        }
    }
}

void emit_report(const std::vector<ResultRow>& rows, ReportFormat format, std::ostream& os)
{
    if (format == ReportFormat::Csv)
        emit_csv(rows, os);
    else
        emit_markdown(rows, os);
}

void emit_report(const std::vector<ResultRow>& rows, ReportFormat format,
                 const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
    emit_report(rows, format, out);
    if (!out)
        throw Error(ErrorKind::Io, "write to '" + path.string() + "' failed");
}

MonolithicSolution monolithic_oracle(const MultiPatch& mp, const DiscreteStokes& ds, int max_dofs)
{
    const int K = static_cast<int>(ds.locals.size());
    std::vector<int> offset(K + 1, 0);
    for (int k = 0; k < K; ++k)
        offset[k + 1] = offset[k] + ds.spaces[k].num_velocity();

    std::vector<int> parent(offset[K]);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    };
    auto unite = [&](int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b)
            parent[std::max(a, b)] = std::min(a, b);
    };
    const InterfaceDofMap map = build_interface_map(mp, ds.spaces);
    for (const auto& pairs : map.pairs)
        for (const auto& pr : pairs)
            unite(offset[pr.a.patch] + pr.a.dof, offset[pr.b.patch] + pr.b.dof);
    for (const auto& cc : map.corners)
        for (const auto& m : cc.members)
            unite(offset[cc.members[0].patch] + cc.members[0].dof, offset[m.patch] + m.dof);

    // global velocity numbering over retained DOFs
    std::vector<int> gid(offset[K], -1);
    int nv = 0;
    for (int k = 0; k < K; ++k)
        for (int full : ds.locals[k].retained) {
            const int root = find(offset[k] + full);
            if (gid[root] < 0)
                gid[root] = nv++;
            gid[offset[k] + full] = gid[root];
        }
    std::vector<int> poff(K + 1, nv);
    for (int k = 0; k < K; ++k)
        poff[k + 1] = poff[k] + ds.locals[k].num_pressure();
    const int n = poff[K] + 1;
    if (n > max_dofs) {
        std::ostringstream os;
        os << "monolithic system has " << n << " unknowns (limit " << max_dofs << ")";
        throw Error(ErrorKind::SizeGuard, os.str());
    }

    std::vector<Triplet> t;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < K; ++k) {
        const auto& loc = ds.locals[k];
        auto g = [&](int r) { return gid[offset[k] + loc.retained[r]]; };
        for (int c = 0; c < loc.K.outerSize(); ++c)
            for (SparseMatrix::InnerIterator it(loc.K, c); it; ++it)
                t.emplace_back(g(static_cast<int>(it.row())), g(c), it.value());
        for (int c = 0; c < loc.D.outerSize(); ++c)
            for (SparseMatrix::InnerIterator it(loc.D, c); it; ++it) {
                const int row = poff[k] + static_cast<int>(it.row());
                t.emplace_back(row, g(c), it.value());
                t.emplace_back(g(c), row, it.value());
            }
        for (int r = 0; r < loc.num_retained(); ++r)
            rhs[g(r)] += loc.f[r];
        rhs.segment(poff[k], loc.num_pressure()) = loc.g;
        for (int i = 0; i < loc.num_pressure(); ++i)
            if (ds.moments[k][i] != 0.0) {
                t.emplace_back(n - 1, poff[k] + i, ds.moments[k][i]);
                t.emplace_back(poff[k] + i, n - 1, ds.moments[k][i]);
            }
    }
    SparseMatrix a(n, n);
    a.setFromTriplets(t.begin(), t.end());
    const Factorization lu = Factorization::factorize(a, FactorKind::SymmetricIndefinite);
    const Eigen::VectorXd x = lu.solve(rhs);

    MonolithicSolution out;
    out.num_dofs = n;
    for (int k = 0; k < K; ++k) {
        const auto& loc = ds.locals[k];
        PatchSolution s;
        s.velocity = loc.lift;
        for (int full : loc.retained)
            s.velocity[full] += x[gid[offset[k] + full]];
        s.pressure = x.segment(poff[k], loc.num_pressure());
        out.patches.push_back(std::move(s));
    }
    return out;
}

double relative_difference(const std::vector<PatchSolution>& a, const std::vector<PatchSolution>& b)
{
    if (a.size() != b.size())
        throw Error(ErrorKind::DimensionMismatch, "solutions have different patch counts");
    double diff = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k].velocity.size() != b[k].velocity.size() || a[k].pressure.size() != b[k].pressure.size())
            throw Error(ErrorKind::DimensionMismatch, "solutions have different layouts");
        diff = std::max({diff, (a[k].velocity - b[k].velocity).cwiseAbs().maxCoeff(),
                         (a[k].pressure - b[k].pressure).cwiseAbs().maxCoeff()});
        scale = std::max({scale, b[k].velocity.cwiseAbs().maxCoeff(),
                          b[k].pressure.cwiseAbs().maxCoeff()});
    }
    return scale > 0.0 ? diff / scale : diff;
}

SolutionCheck check_solution(const MultiPatch& mp, const DiscreteStokes& ds,
                             const std::vector<PatchSolution>& sol)
{
    SolutionCheck chk;
    const InterfaceDofMap map = build_interface_map(mp, ds.spaces);
    for (const auto& pairs : map.pairs)
        for (const auto& pr : pairs)
            chk.max_jump = std::max(chk.max_jump, std::abs(sol[pr.a.patch].velocity[pr.a.dof] -
                                                           sol[pr.b.patch].velocity[pr.b.dof]));
    for (const auto& cc : map.corners)
        for (const auto& m : cc.members)
            chk.max_jump = std::max(chk.max_jump,
                                    std::abs(sol[m.patch].velocity[m.dof] -
                                             sol[cc.members[0].patch].velocity[cc.members[0].dof]));
    double integral = 0.0, area = 0.0;
    for (std::size_t k = 0; k < sol.size(); ++k) {
        integral += ds.moments[k].dot(sol[k].pressure);
        area += ds.moments[k].sum();
    }
    chk.pressure_mean = integral / area;
    return chk;
}

std::array<double, 2> solution_errors(const MultiPatch& mp, const DiscreteStokes& ds,
                                      const std::vector<PatchSolution>& sol,
                                      const BenchmarkProblem& bp)
{
    double eu = 0.0, ep = 0.0;
    for (std::size_t k = 0; k < sol.size(); ++k) {
        const auto e = l2_error_squared(mp.patch(static_cast<int>(k)), ds.spaces[k], sol[k].velocity,
                                        sol[k].pressure, bp.u, bp.p);
        eu += e[0];
        ep += e[1];
    }
    return {std::sqrt(eu), std::sqrt(ep)};
}

} // namespace ieti
