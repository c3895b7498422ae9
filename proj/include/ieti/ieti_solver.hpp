/** @file ieti_solver.hpp

    @brief Dual-primal tearing and interconnecting solver for the
    multi-patch Stokes system.

    Each patch solves its constrained saddle point problem
    \f[
      \bar A^{(k)} = \begin{pmatrix} A^{(k)} & C^{(k)\top} \\ C^{(k)} & 0 \end{pmatrix},
      \quad A^{(k)} = \begin{pmatrix} K^{(k)} & D^{(k)\top} \\ D^{(k)} & 0 \end{pmatrix},
    \f]
    with unknowns ordered (u_Gamma, u_I, p, mu_p, mu_v). The primal
    (coarse) problem couples the A-orthogonal primal basis across patches
    and carries one extra row fixing the global pressure mean. PCG runs on
    the multiplier system F lambda = g.
*/
#pragma once

#include "ieti/coupling.hpp"
#include "ieti/discretization.hpp"
#include "ieti/linalg.hpp"

#include <Eigen/Core>
#include <Eigen/LU>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ieti {

enum class Preconditioner { StokesDirichlet, PoissonDirichlet };

Preconditioner parse_preconditioner(const std::string& name);
std::string to_string(Preconditioner p);

struct AugmentedLocalSystem {
    int n_gamma = 0;
    int n_interior = 0;
    int n_pressure = 0;
    int n_constraints = 0; ///< 1 pressure row + velocity rows

    SparseMatrix matrix;   ///< full augmented matrix
    SparseMatrix A;        ///< unconstrained block, (u_Gamma, u_I, p)
    SparseMatrix C;        ///< constraint rows over (u_Gamma, u_I, p)
    SparseMatrix B;        ///< jump operator restricted to u_Gamma
    Eigen::VectorXd rhs;   ///< b-bar: zero in the constraint rows
    Factorization factor;
    std::vector<int> global_index; ///< primal index of each constraint row

    int size_x() const { return n_gamma + n_interior + n_pressure; }
    int size() const { return size_x() + n_constraints; }
};

AugmentedLocalSystem build_augmented_system(const LocalStokesSystem& local,
                                            const PatchPrimal& primal,
                                            const SparseMatrix& jump_block, int patch_id = 0);

std::vector<AugmentedLocalSystem> build_augmented_systems(
    const std::vector<LocalStokesSystem>& locals, const PrimalConstraints& primal,
    const JumpOperator& jump);

/// Columns solve [A C^T; C 0][Psi; M] = [0; I]; M is discarded.
Eigen::MatrixXd compute_primal_basis(const AugmentedLocalSystem& aug);

struct PrimalSystem {
    int num_primal = 0;
    std::vector<Eigen::MatrixXd> psi;
    Eigen::MatrixXd A;         ///< sum Psi^T A Psi
    SparseMatrix B;            ///< sum B Psi, multipliers x primal
    Eigen::VectorXd b;         ///< sum Psi^T b
    Eigen::RowVectorXd mean;   ///< global pressure integral in primal coordinates
    Eigen::MatrixXd A_ext;     ///< [A mean^T; mean 0]
    Eigen::PartialPivLU<Eigen::MatrixXd> factor;

    Eigen::VectorXd solve_extended(const Eigen::VectorXd& rhs) const { return factor.solve(rhs); }
};

PrimalSystem build_primal_system(const std::vector<AugmentedLocalSystem>& aug,
                                 const PrimalConstraints& primal, int num_multipliers);

/// Runs fn(k) for k in [0, n), possibly on several threads (IETI_NUM_THREADS).
void parallel_for(int n, const std::function<void(int)>& fn);
int thread_count();

class SchurOperator {
public:
    SchurOperator(const std::vector<AugmentedLocalSystem>& aug, const PrimalSystem& primal,
                  int num_multipliers);

    int size() const { return num_multipliers_; }
    Eigen::VectorXd apply(const Eigen::VectorXd& lambda) const;
    Eigen::VectorXd rhs() const;

private:
    const std::vector<AugmentedLocalSystem>* aug_;
    const PrimalSystem* primal_;
    int num_multipliers_;
};

class DirichletPreconditioner {
public:
    DirichletPreconditioner(Preconditioner variant, const std::vector<LocalStokesSystem>& locals,
                            const std::vector<AugmentedLocalSystem>& aug,
                            const PrimalConstraints& primal,
                            std::vector<Eigen::VectorXd> scaling, int num_multipliers);

    Preconditioner variant() const { return variant_; }
    int size() const { return num_multipliers_; }
    Eigen::VectorXd apply(const Eigen::VectorXd& r) const;
    /// Local Schur complement S_Gamma of patch k applied to a Gamma vector.
    Eigen::VectorXd apply_local_schur(int k, const Eigen::VectorXd& v) const;

private:
    struct Patch {
        SparseMatrix K_gg, K_gi, K_ig, D_g; // D_g: pressure x Gamma
        int n_interior = 0;
        int n_pressure = 0;
        Factorization interior;
        const SparseMatrix* B = nullptr;
        Eigen::VectorXd scaling;
    };
    Preconditioner variant_;
    int num_multipliers_;
    std::vector<Patch> patches_;
};

using LinearOperator = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct PatchSolution {
    Eigen::VectorXd velocity; ///< full velocity coefficients including the lift
    Eigen::VectorXd pressure;
};

struct SolveReport {
    int iterations = 0;
    /// residual norms; entry 0 is the initial residual, one entry per step after
    std::vector<double> residuals;
    std::optional<double> kappa;
    std::optional<double> lambda_min;
    std::optional<double> lambda_max;
    bool converged = false;
    double seconds = 0.0;
    Eigen::VectorXd lambda;
    std::vector<PatchSolution> solution;
};

/// Preconditioned CG from a seeded uniform(-1,1) initial guess; stops once
/// the Euclidean residual norm drops below tol times the initial one.
/// max_iter < 0 selects 10 * size.
SolveReport pcg_solve(const LinearOperator& F, const LinearOperator& M, const Eigen::VectorXd& g,
                      double tol, std::uint64_t seed, int max_iter = -1);

std::vector<PatchSolution> recover_solution(const Eigen::VectorXd& lambda,
                                            const std::vector<LocalStokesSystem>& locals,
                                            const std::vector<AugmentedLocalSystem>& aug,
                                            const PrimalSystem& primal,
                                            const std::vector<Eigen::VectorXd>& moments);

/// Full setup for one discretized domain.
class IetiDpSolver {
public:
    IetiDpSolver(const MultiPatch& mp, const DiscreteStokes& ds, PrimalVariant variant,
                 Preconditioner precond);
    IetiDpSolver(const IetiDpSolver&) = delete;
    IetiDpSolver& operator=(const IetiDpSolver&) = delete;

    SolveReport solve(double tol, std::uint64_t seed, int max_iter = -1) const;

    const InterfaceDofMap& interface_map() const { return map_; }
    const PrimalConstraints& primal_constraints() const { return primal_; }
    const JumpOperator& jump() const { return jump_; }
    const std::vector<AugmentedLocalSystem>& augmented() const { return aug_; }
    const PrimalSystem& primal_system() const { return primal_system_; }
    const SchurOperator& schur() const { return *schur_; }
    const DirichletPreconditioner& preconditioner() const { return *precond_; }
    int num_multipliers() const { return jump_.num_multipliers; }

private:
    const DiscreteStokes* ds_;
    InterfaceDofMap map_;
    PrimalConstraints primal_;
    JumpOperator jump_;
    std::vector<AugmentedLocalSystem> aug_;
    PrimalSystem primal_system_;
    std::optional<SchurOperator> schur_;
    std::optional<DirichletPreconditioner> precond_;
};

} // namespace ieti
