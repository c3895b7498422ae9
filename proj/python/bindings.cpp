/** @file bindings.cpp

    @brief Python module: sweeps, single solves, reference checks, geometry
    inspection and spline evaluation.
*/
#include "ieti/bench.hpp"
#include "ieti/error.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace ieti;

namespace {

py::dict row_dict(const ResultRow& r)
{
    py::dict d;
    d["domain"] = r.domain;
    d["level"] = r.level;
    d["degree"] = r.degree;
    d["variant"] = to_string(r.variant);
    d["precond"] = to_string(r.precond);
    d["iterations"] = r.iterations;
    d["kappa"] = r.kappa ? py::object(py::float_(*r.kappa)) : py::object(py::none());
    d["seconds"] = r.seconds;
    d["status"] = r.status;
    return d;
}

ResultRow dict_row(const py::dict& d)
{
    ResultRow r;
    r.domain = d["domain"].cast<std::string>();
    r.level = d["level"].cast<int>();
    r.degree = d["degree"].cast<int>();
    r.variant = parse_variant(d["variant"].cast<std::string>());
    r.precond = parse_preconditioner(d["precond"].cast<std::string>());
    r.iterations = d["iterations"].cast<int>();
    if (!d["kappa"].is_none())
        r.kappa = d["kappa"].cast<double>();
    r.seconds = d["seconds"].cast<double>();
    r.status = d["status"].cast<std::string>();
    return r;
}

py::list run(const std::string& domain, const std::vector<int>& levels, const std::vector<int>& degrees,
             const std::vector<std::string>& variants, const std::vector<std::string>& preconds,
             double tol, std::uint64_t seed, const std::string& geometry)
{
    ExperimentConfig cfg;
    cfg.domain = domain;
    cfg.geometry = geometry;
    cfg.levels = levels;
    cfg.degrees = degrees;
    cfg.variants.clear();
    for (const auto& v : variants)
        cfg.variants.push_back(parse_variant(v));
    cfg.preconditioners.clear();
    for (const auto& m : preconds)
        cfg.preconditioners.push_back(parse_preconditioner(m));
    cfg.tolerance = tol;
    cfg.seed = seed;
    std::vector<ResultRow> rows;
    {
        py::gil_scoped_release release;
        rows = run_experiment(cfg);
    }
    py::list out;
    for (const auto& r : rows)
        out.append(row_dict(r));
    return out;
}

std::string report(const py::list& rows, const std::string& format)
{
    std::vector<ResultRow> rs;
    for (const auto& r : rows)
        rs.push_back(dict_row(r.cast<py::dict>()));
    std::ostringstream os;
    emit_report(rs, parse_format(format), os);
    return os.str();
}

py::dict solve(const std::string& domain, int level, int degree, const std::string& variant,
               const std::string& precond, double tol, std::uint64_t seed, const std::string& geometry,
               bool compare)
{
    SolveReport rep;
    int multipliers = 0;
    double diff = -1.0;
    SolutionCheck chk;
    std::array<double, 2> err{};
    {
        py::gil_scoped_release release;
        const Domain d = make_domain(domain, geometry);
        const DiscreteStokes ds = discretize_benchmark(d, degree, level);
        IetiDpSolver s(d.mp, ds, parse_variant(variant), parse_preconditioner(precond));
        multipliers = s.num_multipliers();
        rep = s.solve(tol, seed);
        chk = check_solution(d.mp, ds, rep.solution);
        err = solution_errors(d.mp, ds, rep.solution, benchmark_problem(&d.mp));
        if (compare)
            diff = relative_difference(rep.solution, monolithic_oracle(d.mp, ds).patches);
    }
    py::dict out;
    out["converged"] = rep.converged;
    out["iterations"] = rep.iterations;
    out["kappa"] = rep.kappa ? py::object(py::float_(*rep.kappa)) : py::object(py::none());
    out["residuals"] = rep.residuals;
    out["num_multipliers"] = multipliers;
    out["max_jump"] = chk.max_jump;
    out["pressure_mean"] = chk.pressure_mean;
    out["velocity_l2_error"] = err[0];
    out["pressure_l2_error"] = err[1];
    out["reference_difference"] = compare ? py::object(py::float_(diff)) : py::object(py::none());
    return out;
}

py::dict info(const std::string& path)
{
    const MultiPatch mp = load_multipatch(path);
    py::dict d;
    d["patches"] = mp.num_patches();
    d["vertices"] = mp.corner_classes().size();
    d["boundary_sides"] = mp.boundary().size();
    d["diameter"] = mp.diameter();
    py::list ifs;
    for (const auto& i : mp.interfaces())
        ifs.append(py::make_tuple(i.patch_a, i.side_a, i.patch_b, i.side_b, i.reversed));
    d["interfaces"] = ifs;
    return d;
}

/// All basis functions of the space at the given parameters (rows: points).
Eigen::MatrixXd basis(int degree, int smoothness, int level, const Eigen::VectorXd& t, int deriv)
{
    const KnotVector kv = make_space(degree, smoothness, level);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(t.size(), kv.dimension());
    for (Eigen::Index k = 0; k < t.size(); ++k) {
        const BasisValues b = eval_basis(kv, t[k], deriv);
        for (int i = 0; i <= kv.degree(); ++i)
            out(k, b.first + i) = b.values(deriv, i);
    }
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "IETI-DP solver for multi-patch isogeometric Stokes problems";

    static const py::handle exc = py::exception<Error>(m, "IetiError", PyExc_RuntimeError).release();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p)
                std::rethrow_exception(p);
        } catch (const Error& e) {
            py::set_error(exc, e.what());
        }
    });

    m.def("run", &run, py::arg("domain") = "quarter-annulus", py::arg("levels") = std::vector<int>{2},
          py::arg("degrees") = std::vector<int>{2}, py::arg("variants") = std::vector<std::string>{"ce"},
          py::arg("preconds") = std::vector<std::string>{"sd2"}, py::arg("tol") = 1e-6,
          py::arg("seed") = 42, py::arg("geometry") = "",
          "Parameter sweep; one dict per (level, degree, variant, precond).");
    m.def("report", &report, py::arg("rows"), py::arg("format") = "csv",
          "Formats sweep rows as csv or markdown.");
    m.def("solve", &solve, py::arg("domain"), py::arg("level"), py::arg("degree"),
          py::arg("variant") = "ce", py::arg("precond") = "sd2", py::arg("tol") = 1e-6,
          py::arg("seed") = 42, py::arg("geometry") = "", py::arg("compare") = false,
          "Solves the benchmark problem once; compare=True adds the direct-solve difference.");
    m.def("info", &info, py::arg("path"), "Topology of a multipatch file.");
    m.def("basis", &basis, py::arg("degree"), py::arg("smoothness"), py::arg("level"), py::arg("t"),
          py::arg("deriv") = 0, "B-spline basis (or derivative) values on [0, 1].");
    m.def("thread_count", &thread_count);
}
