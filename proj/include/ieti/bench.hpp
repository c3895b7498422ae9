/** @file bench.hpp

    @brief Benchmark problem, parameter sweeps, the monolithic reference
    solve and report output.
*/
#pragma once

#include "ieti/coupling.hpp"
#include "ieti/discretization.hpp"
#include "ieti/geometry.hpp"
#include "ieti/ieti_solver.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace ieti {

enum class ReportFormat { Csv, Markdown };

ReportFormat parse_format(const std::string& name);

struct ExperimentConfig {
    std::string domain = "quarter-annulus"; ///< unit-square | quarter-annulus | yeti
    std::filesystem::path geometry;         ///< required for yeti
    std::vector<int> levels{2};
    std::vector<int> degrees{2};
    std::vector<PrimalVariant> variants{PrimalVariant::CornersEdges};
    std::vector<Preconditioner> preconditioners{Preconditioner::PoissonDirichlet};
    double tolerance = 1e-6;
    std::uint64_t seed = 42;
    ReportFormat format = ReportFormat::Csv;

    /// Throws Configuration on empty lists, level < 1 or degree < 2.
    void validate() const;
};

/// Parses "2..5", "2,3,4" or "3".
std::vector<int> parse_int_list(const std::string& text);

struct BenchmarkProblem {
    VectorField f;
    VectorField u;
    ScalarField p; ///< sin(pi x) shifted by `pressure_shift`
    double pressure_shift = 0.0;
};

/// The manufactured problem; the pressure shift is chosen so that p has
/// zero mean over `mp` when a domain is given.
BenchmarkProblem benchmark_problem(const MultiPatch* mp = nullptr);

/// Integral mean of a scalar field over the whole domain.
double domain_mean(const MultiPatch& mp, const ScalarField& q, int points = 8);

/// Domain with its coarsest element layout.
struct Domain {
    std::string name;
    MultiPatch mp;
    ElementLayout layout;
};

Domain make_domain(const std::string& name, const std::filesystem::path& geometry = {});

DiscreteStokes discretize_benchmark(const Domain& d, int p, int level);

struct ResultRow {
    std::string domain;
    int level = 0;
    int degree = 0;
    PrimalVariant variant = PrimalVariant::Corners;
    Preconditioner precond = Preconditioner::StokesDirichlet;
    int iterations = 0;
    std::optional<double> kappa;
    double seconds = 0.0;
    std::string status; ///< ok | no-converge | kappa-nan | error:<msg>
};

/// One row per sweep point, in (level, degree, variant, precond) order.
/// Failures are recorded in the row; the sweep continues.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

bool all_ok(const std::vector<ResultRow>& rows);

void emit_csv(const std::vector<ResultRow>& rows, std::ostream& os);
void emit_markdown(const std::vector<ResultRow>& rows, std::ostream& os);
void emit_report(const std::vector<ResultRow>& rows, ReportFormat format, std::ostream& os);
/// Throws Io when the file cannot be written.
void emit_report(const std::vector<ResultRow>& rows, ReportFormat format,
                 const std::filesystem::path& path);

struct MonolithicSolution {
    std::vector<PatchSolution> patches;
    int num_dofs = 0;
};

/// Conforming global solve: velocity DOFs identified across interfaces,
/// patchwise pressure, one global zero-mean row. Throws SizeGuard above
/// `max_dofs` unknowns.
MonolithicSolution monolithic_oracle(const MultiPatch& mp, const DiscreteStokes& ds,
                                     int max_dofs = 200000);

/// max |a - b| / max |b| over all velocity and pressure coefficients.
double relative_difference(const std::vector<PatchSolution>& a,
                           const std::vector<PatchSolution>& b);

struct SolutionCheck {
    double max_jump = 0.0;     ///< largest coefficient mismatch on shared DOFs
    double pressure_mean = 0.0;
};

SolutionCheck check_solution(const MultiPatch& mp, const DiscreteStokes& ds,
                             const std::vector<PatchSolution>& sol);

/// Global L2 errors (velocity, pressure) against the benchmark solution.
std::array<double, 2> solution_errors(const MultiPatch& mp, const DiscreteStokes& ds,
                                      const std::vector<PatchSolution>& sol,
                                      const BenchmarkProblem& bp);

} // namespace ieti
