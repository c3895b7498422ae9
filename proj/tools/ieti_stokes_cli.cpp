/** @file ieti_stokes_cli.cpp

    @brief Command line front end: parameter sweeps, reference checks and
    geometry inspection.
*/
#include "ieti/bench.hpp"
#include "ieti/error.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iomanip>
#include <iostream>

using namespace ieti;

namespace {

std::vector<std::string> split(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            out.push_back(item);
    return out;
}

int cmd_run(const std::string& domain, const std::string& geometry, const std::string& levels,
            const std::string& degrees, const std::string& variants, const std::string& preconds,
            double tol, std::uint64_t seed, const std::string& out, const std::string& format)
{
    ExperimentConfig cfg;
    cfg.domain = domain;
    cfg.geometry = geometry;
    cfg.levels = parse_int_list(levels);
    cfg.degrees = parse_int_list(degrees);
    cfg.variants.clear();
    for (const auto& v : split(variants))
        cfg.variants.push_back(parse_variant(v));
    cfg.preconditioners.clear();
    for (const auto& m : split(preconds))
        cfg.preconditioners.push_back(parse_preconditioner(m));
    cfg.tolerance = tol;
    cfg.seed = seed;
    cfg.format = parse_format(format);

    const auto rows = run_experiment(cfg);
    if (out.empty() || out == "-")
        emit_report(rows, cfg.format, std::cout);
    else
        emit_report(rows, cfg.format, std::filesystem::path(out));
    return all_ok(rows) ? 0 : 1;
}

int cmd_verify(const std::string& domain, const std::string& geometry, int level, int degree)
{
    const Domain d = make_domain(domain, geometry);
    const DiscreteStokes ds = discretize_benchmark(d, degree, level);
    const MonolithicSolution ref = monolithic_oracle(d.mp, ds);
    const BenchmarkProblem bp = benchmark_problem(&d.mp);
    const auto err = solution_errors(d.mp, ds, ref.patches, bp);
    std::cout << "reference: " << ref.num_dofs << " unknowns, L2 error velocity " << err[0]
              << ", pressure " << err[1] << '\n';

    bool ok = true;
    for (PrimalVariant v : {PrimalVariant::Corners, PrimalVariant::CornersEdges,
                            PrimalVariant::CornersNormals})
        for (Preconditioner m : {Preconditioner::StokesDirichlet, Preconditioner::PoissonDirichlet}) {
            IetiDpSolver solver(d.mp, ds, v, m);
            const SolveReport rep = solver.solve(1e-12, 42);
            const double diff = relative_difference(rep.solution, ref.patches);
            const bool pass = rep.converged && diff <= 1e-8;
            ok = ok && pass;
            std::cout << (pass ? "PASS " : "FAIL ") << to_string(v) << '/' << to_string(m)
                      << ": iterations " << rep.iterations << ", relative difference "
                      << std::scientific << std::setprecision(3) << diff << std::defaultfloat
                      << '\n';
        }
    return ok ? 0 : 1;
}

int cmd_info(const std::string& file, bool as_json)
{
    const MultiPatch mp = load_multipatch(file);
    const ElementLayout layout = layout_from_geometry(mp);
    int boundary_vertices = 0;
    for (int v = 0; v < static_cast<int>(mp.corner_classes().size()); ++v)
        boundary_vertices += mp.vertex_on_boundary(v) ? 1 : 0;

    if (as_json) {
        nlohmann::json j;
        j["patches"] = mp.num_patches();
        j["vertices"] = mp.corner_classes().size();
        j["boundary_vertices"] = boundary_vertices;
        j["boundary_sides"] = mp.boundary().size();
        j["diameter"] = mp.diameter();
        auto& ifs = j["interfaces"] = nlohmann::json::array();
        for (const auto& i : mp.interfaces())
            ifs.push_back({{"patch_a", i.patch_a}, {"side_a", i.side_a}, {"patch_b", i.patch_b},
                           {"side_b", i.side_b}, {"reversed", i.reversed}});
        auto& ps = j["patch_data"] = nlohmann::json::array();
        for (int k = 0; k < mp.num_patches(); ++k) {
            const auto& g = mp.patch(k);
            const auto jr = jacobian_determinant_range(g);
            ps.push_back({{"degree", {g.space().factor(0).degree(), g.space().factor(1).degree()}},
                          {"rational", g.rational()},
                          {"elements", layout.elements[k]},
                          {"det_jacobian", {jr[0], jr[1]}}});
        }
        std::cout << j.dump(2) << '\n';
        return 0;
    }

    std::cout << "patches:        " << mp.num_patches() << '\n'
              << "interfaces:     " << mp.interfaces().size() << '\n'
              << "boundary sides: " << mp.boundary().size() << '\n'
              << "vertices:       " << mp.corner_classes().size() << " (" << boundary_vertices
              << " on the boundary)\n"
              << "diameter:       " << mp.diameter() << "\n\n";
    for (int k = 0; k < mp.num_patches(); ++k) {
        const auto& g = mp.patch(k);
        const auto jr = jacobian_determinant_range(g);
        std::cout << "patch " << k << ": degree (" << g.space().factor(0).degree() << ','
                  << g.space().factor(1).degree() << ')' << (g.rational() ? " rational" : "")
                  << ", elements " << layout.elements[k][0] << 'x' << layout.elements[k][1]
                  << ", det J in [" << jr[0] << ", " << jr[1] << "], sides";
        for (int s = 0; s < 4; ++s) {
            const int i = mp.side_interface(k, s);
            std::cout << ' ' << (i < 0 ? std::string("B") : "I" + std::to_string(i));
        }
        std::cout << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"IETI-DP solver for multi-patch isogeometric Stokes problems"};
    app.require_subcommand(1);

    std::string domain = "quarter-annulus", geometry, levels = "2", degrees = "2", variant = "ce",
                precond = "sd2", out, format = "csv";
    double tol = 1e-6;
    std::uint64_t seed = 42;
    auto* run = app.add_subcommand("run", "Parameter sweep; writes one result row per point");
    run->add_option("--domain", domain, "unit-square | quarter-annulus | yeti")->capture_default_str();
    run->add_option("--geometry", geometry, "Multipatch file (for --domain yeti)");
    run->add_option("--levels", levels, "Refinement levels, e.g. 2..5 or 2,3")->capture_default_str();
    run->add_option("--degrees", degrees, "Pressure degrees, e.g. 2..6")->capture_default_str();
    run->add_option("--variant", variant, "Primal variants: c, ce, cn (comma separated)")
        ->capture_default_str();
    run->add_option("--precond", precond, "Preconditioners: sd1, sd2 (comma separated)")
        ->capture_default_str();
    run->add_option("--tol", tol, "Relative residual reduction")->capture_default_str();
    run->add_option("--seed", seed, "Seed of the random initial guess")->capture_default_str();
    run->add_option("--out", out, "Output file (default: stdout)");
    run->add_option("--format", format, "csv | markdown")->capture_default_str();

    int level = 1, degree = 2;
    auto* verify = app.add_subcommand("verify", "Compare all solver variants with a direct solve");
    verify->add_option("--domain", domain, "unit-square | quarter-annulus | yeti")
        ->capture_default_str();
    verify->add_option("--geometry", geometry, "Multipatch file (for --domain yeti)");
    verify->add_option("--level", level)->capture_default_str();
    verify->add_option("--degree", degree)->capture_default_str();

    std::string file;
    bool as_json = false;
    auto* info = app.add_subcommand("info", "Print the topology of a multipatch file");
    info->add_option("file", file)->required();
    info->add_flag("--json", as_json, "JSON output");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run)
            return cmd_run(domain, geometry, levels, degrees, variant, precond, tol, seed, out, format);
        if (*verify)
            return cmd_verify(domain, geometry, level, degree);
        return cmd_info(file, as_json);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
    }
    return 2;
}
