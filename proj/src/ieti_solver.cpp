/** @file ieti_solver.cpp

    @brief Local augmented systems, primal problem, Schur operator,
    scaled Dirichlet preconditioners and PCG with Lanczos estimates.
*/
#include "ieti/ieti_solver.hpp"

#include "ieti/error.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>
#include <thread>

namespace ieti {

Preconditioner parse_preconditioner(const std::string& name)
{
    if (name == "sd1")
        return Preconditioner::StokesDirichlet;
    if (name == "sd2")
        return Preconditioner::PoissonDirichlet;
    throw Error(ErrorKind::UnknownVariant, "preconditioner '" + name + "' (expected sd1 or sd2)");
}

std::string to_string(Preconditioner p)
{
    return p == Preconditioner::StokesDirichlet ? "sd1" : "sd2";
}

int thread_count()
{
    if (const char* env = std::getenv("IETI_NUM_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0)
            return n;
    }
    return 1;
}

void parallel_for(int n, const std::function<void(int)>& fn)
{
    const int nt = std::min(thread_count(), n);
    if (nt <= 1) {
        for (int k = 0; k < n; ++k)
            fn(k);
        return;
    }
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(nt);
    for (int t = 0; t < nt; ++t)
        workers.emplace_back([&, t] {
            try {
                for (int k = t; k < n; k += nt)
                    fn(k);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    for (auto& w : workers)
        w.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

AugmentedLocalSystem build_augmented_system(const LocalStokesSystem& local,
                                            const PatchPrimal& primal,
                                            const SparseMatrix& jump_block, int patch_id)
{
    AugmentedLocalSystem aug;
    aug.n_gamma = static_cast<int>(local.gamma.size());
    aug.n_interior = static_cast<int>(local.interior.size());
    aug.n_pressure = local.num_pressure();
    aug.n_constraints = primal.num_local();
    aug.global_index = primal.global_index;
    const int nx = aug.size_x();
    const int off_p = aug.n_gamma + aug.n_interior;

    // retained index -> position in (u_Gamma, u_I)
    std::vector<int> pos(local.num_retained(), -1);
    for (int i = 0; i < aug.n_gamma; ++i)
        pos[local.gamma[i]] = i;
    for (int i = 0; i < aug.n_interior; ++i)
        pos[local.interior[i]] = aug.n_gamma + i;

    std::vector<Triplet> ta, tc;
    for (int c = 0; c < local.K.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(local.K, c); it; ++it)
            ta.emplace_back(pos[it.row()], pos[c], it.value());
    for (int c = 0; c < local.D.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(local.D, c); it; ++it) {
            ta.emplace_back(off_p + it.row(), pos[c], it.value());
            ta.emplace_back(pos[c], off_p + it.row(), it.value());
        }
    aug.A.resize(nx, nx);
    aug.A.setFromTriplets(ta.begin(), ta.end());

    for (int i = 0; i < aug.n_pressure; ++i)
        if (primal.Cp[i] != 0.0)
            tc.emplace_back(0, off_p + i, primal.Cp[i]);
    for (int c = 0; c < primal.Cv.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(primal.Cv, c); it; ++it) {
            const int r = local.full_to_retained[c];
            if (r < 0 || pos[r] >= aug.n_gamma) {
                std::ostringstream os;
                os << "patch " << patch_id << ": velocity constraint on a non-interface DOF";
                throw Error(ErrorKind::Configuration, os.str());
            }
            tc.emplace_back(1 + it.row(), pos[r], it.value());
        }
    aug.C.resize(aug.n_constraints, nx);
    aug.C.setFromTriplets(tc.begin(), tc.end());

    std::vector<Triplet> tm = ta;
    for (const auto& t : tc) {
        tm.emplace_back(nx + t.row(), t.col(), t.value());
        tm.emplace_back(t.col(), nx + t.row(), t.value());
    }
    aug.matrix.resize(aug.size(), aug.size());
    aug.matrix.setFromTriplets(tm.begin(), tm.end());

    // jump operator on the Gamma positions
    std::vector<Triplet> tb;
    for (int c = 0; c < jump_block.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(jump_block, c); it; ++it) {
            const int r = local.full_to_retained[c];
            if (r < 0 || pos[r] >= aug.n_gamma)
                throw Error(ErrorKind::Configuration, "jump operator acts on a non-interface DOF");
            tb.emplace_back(it.row(), pos[r], it.value());
        }
    aug.B.resize(jump_block.rows(), aug.n_gamma);
    aug.B.setFromTriplets(tb.begin(), tb.end());

    aug.rhs = Eigen::VectorXd::Zero(aug.size());
    for (int i = 0; i < aug.n_gamma; ++i)
        aug.rhs[i] = local.f[local.gamma[i]];
    for (int i = 0; i < aug.n_interior; ++i)
        aug.rhs[aug.n_gamma + i] = local.f[local.interior[i]];
    aug.rhs.segment(off_p, aug.n_pressure) = local.g;

    try {
        aug.factor = Factorization::factorize(aug.matrix, FactorKind::SymmetricIndefinite);
    } catch (const Error& e) {
        std::ostringstream os;
        os << "local system of patch " << patch_id
           << " is singular (insufficient primal constraints?): " << e.what();
        throw Error(ErrorKind::SingularMatrix, os.str());
    }
    return aug;
}

std::vector<AugmentedLocalSystem> build_augmented_systems(
    const std::vector<LocalStokesSystem>& locals, const PrimalConstraints& primal,
    const JumpOperator& jump)
{
    std::vector<AugmentedLocalSystem> out(locals.size());
    parallel_for(static_cast<int>(locals.size()), [&](int k) {
        out[k] = build_augmented_system(locals[k], primal.patches[k], jump.blocks[k], k);
    });
    return out;
}

Eigen::MatrixXd compute_primal_basis(const AugmentedLocalSystem& aug)
{
    const int nx = aug.size_x();
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(aug.size(), aug.n_constraints);
    rhs.bottomRows(aug.n_constraints).setIdentity();
    const Eigen::MatrixXd sol = aug.factor.solve(rhs);
    return sol.topRows(nx);
}

PrimalSystem build_primal_system(const std::vector<AugmentedLocalSystem>& aug,
                                 const PrimalConstraints& primal, int num_multipliers)
{
    PrimalSystem ps;
    const int np = primal.num_primal();
    ps.num_primal = np;
    ps.A = Eigen::MatrixXd::Zero(np, np);
    ps.b = Eigen::VectorXd::Zero(np);
    const int K = static_cast<int>(aug.size());
    ps.psi.resize(K);
    parallel_for(K, [&](int k) { ps.psi[k] = compute_primal_basis(aug[k]); });

    std::vector<Triplet> tb;
    for (int k = 0; k < K; ++k) {
        const auto& a = aug[k];
        const Eigen::MatrixXd& psi = ps.psi[k];
        const Eigen::MatrixXd local = psi.transpose() * (a.A * psi);
        const Eigen::VectorXd lb = psi.transpose() * a.rhs.head(a.size_x());
        const auto& gi = a.global_index;
        for (int i = 0; i < a.n_constraints; ++i) {
            ps.b[gi[i]] += lb[i];
            for (int j = 0; j < a.n_constraints; ++j)
                ps.A(gi[i], gi[j]) += local(i, j);
        }
        for (int c = 0; c < a.B.outerSize(); ++c)
            for (SparseMatrix::InnerIterator it(a.B, c); it; ++it)
                for (int j = 0; j < a.n_constraints; ++j) {
                    const double v = it.value() * psi(c, j);
                    if (v != 0.0)
                        tb.emplace_back(it.row(), gi[j], v);
                }
    }
    ps.B.resize(num_multipliers, np);
    ps.B.setFromTriplets(tb.begin(), tb.end());

    // C_p rows hold patch integrals, so the global integral is their sum
    ps.mean = Eigen::RowVectorXd::Zero(np);
    for (int k = 0; k < primal.num_pressure_primal; ++k)
        ps.mean[primal.pressure_offset() + k] = 1.0;

    ps.A_ext = Eigen::MatrixXd::Zero(np + 1, np + 1);
    ps.A_ext.topLeftCorner(np, np) = ps.A;
    ps.A_ext.block(np, 0, 1, np) = ps.mean;
    ps.A_ext.block(0, np, np, 1) = ps.mean.transpose();
    ps.factor.compute(ps.A_ext);
    const double rc = ps.factor.rcond();
    if (!(rc > 1e-14)) {
        std::ostringstream os;
        os << "extended primal matrix is singular (rcond " << rc << ")";
        throw Error(ErrorKind::Configuration, os.str());
    }
    return ps;
}

SchurOperator::SchurOperator(const std::vector<AugmentedLocalSystem>& aug,
                             const PrimalSystem& primal, int num_multipliers)
    : aug_(&aug), primal_(&primal), num_multipliers_(num_multipliers)
{
}

Eigen::VectorXd SchurOperator::apply(const Eigen::VectorXd& lambda) const
{
    const auto& ps = *primal_;
    const auto& aug = *aug_;
    const int K = static_cast<int>(aug.size());

    Eigen::VectorXd y = Eigen::VectorXd::Zero(ps.num_primal + 1);
    y.head(ps.num_primal) = ps.B.transpose() * lambda;
    const Eigen::VectorXd z = ps.solve_extended(y);
    Eigen::VectorXd out = ps.B * z.head(ps.num_primal);

    std::vector<Eigen::VectorXd> local(K);
    parallel_for(K, [&](int k) {
        const auto& a = aug[k];
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(a.size());
        rhs.head(a.n_gamma) = a.B.transpose() * lambda;
        local[k] = a.factor.solve(rhs).head(a.n_gamma);
    });
    for (int k = 0; k < K; ++k)
        out += aug[k].B * local[k];
    return out;
}

Eigen::VectorXd SchurOperator::rhs() const
{
    const auto& ps = *primal_;
    const auto& aug = *aug_;
    const int K = static_cast<int>(aug.size());
    Eigen::VectorXd y = Eigen::VectorXd::Zero(ps.num_primal + 1);
    y.head(ps.num_primal) = ps.b;
    const Eigen::VectorXd z = ps.solve_extended(y);
    Eigen::VectorXd out = ps.B * z.head(ps.num_primal);
    std::vector<Eigen::VectorXd> local(K);
    parallel_for(K, [&](int k) {
        local[k] = aug[k].factor.solve(aug[k].rhs).head(aug[k].n_gamma);
    });
    for (int k = 0; k < K; ++k)
        out += aug[k].B * local[k];
    return out;
}

DirichletPreconditioner::DirichletPreconditioner(Preconditioner variant,
                                                 const std::vector<LocalStokesSystem>& locals,
                                                 const std::vector<AugmentedLocalSystem>& aug,
                                                 const PrimalConstraints& primal,
                                                 std::vector<Eigen::VectorXd> scaling,
                                                 int num_multipliers)
    : variant_(variant), num_multipliers_(num_multipliers)
{
    const int K = static_cast<int>(locals.size());
    patches_.resize(K);
    parallel_for(K, [&](int k) {
        const auto& loc = locals[k];
        Patch& pt = patches_[k];
        pt.B = &aug[k].B;
        pt.scaling = std::move(scaling[k]);
        pt.n_interior = static_cast<int>(loc.interior.size());
        pt.n_pressure = loc.num_pressure();
        pt.K_gg = submatrix(loc.K, loc.gamma, loc.gamma);
        pt.K_gi = submatrix(loc.K, loc.gamma, loc.interior);
        pt.K_ig = pt.K_gi.transpose();
        const SparseMatrix K_ii = submatrix(loc.K, loc.interior, loc.interior);
        if (variant_ == Preconditioner::PoissonDirichlet) {
            pt.interior = Factorization::factorize(K_ii, FactorKind::SPD);
            return;
        }
        std::vector<int> all_p(pt.n_pressure);
        for (int i = 0; i < pt.n_pressure; ++i)
            all_p[i] = i;
        std::vector<int> all_r(loc.num_retained());
        for (int i = 0; i < loc.num_retained(); ++i)
            all_r[i] = i;
        const SparseMatrix D = loc.D;
        pt.D_g = submatrix(D, all_p, loc.gamma);
        const SparseMatrix D_i = submatrix(D, all_p, loc.interior);
        // [[K_II, D_I^T, 0], [D_I, 0, C_p^T], [0, C_p, 0]]
        const int ni = pt.n_interior, np = pt.n_pressure;
        std::vector<Triplet> t;
        for (int c = 0; c < K_ii.outerSize(); ++c)
            for (SparseMatrix::InnerIterator it(K_ii, c); it; ++it)
                t.emplace_back(it.row(), c, it.value());
        for (int c = 0; c < D_i.outerSize(); ++c)
            for (SparseMatrix::InnerIterator it(D_i, c); it; ++it) {
                t.emplace_back(ni + it.row(), c, it.value());
                t.emplace_back(c, ni + it.row(), it.value());
            }
        const Eigen::RowVectorXd& cp = primal.patches[k].Cp;
        for (int i = 0; i < np; ++i)
            if (cp[i] != 0.0) {
                t.emplace_back(ni + np, ni + i, cp[i]);
                t.emplace_back(ni + i, ni + np, cp[i]);
            }
        SparseMatrix block(ni + np + 1, ni + np + 1);
        block.setFromTriplets(t.begin(), t.end());
        pt.interior = Factorization::factorize(block, FactorKind::SymmetricIndefinite);
    });
}

Eigen::VectorXd DirichletPreconditioner::apply_local_schur(int k, const Eigen::VectorXd& v) const
{
    const Patch& pt = patches_[k];
    Eigen::VectorXd out = pt.K_gg * v;
    if (variant_ == Preconditioner::PoissonDirichlet) {
        const Eigen::VectorXd x = pt.interior.solve(Eigen::VectorXd(pt.K_ig * v));
        out -= pt.K_gi * x;
        return out;
    }
    const int ni = pt.n_interior, np = pt.n_pressure;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ni + np + 1);
    rhs.head(ni) = pt.K_ig * v;
    rhs.segment(ni, np) = pt.D_g * v;
    const Eigen::VectorXd x = pt.interior.solve(rhs);
    out -= pt.K_gi * x.head(ni);
    out -= pt.D_g.transpose() * x.segment(ni, np);
    return out;
}

Eigen::VectorXd DirichletPreconditioner::apply(const Eigen::VectorXd& r) const
{
    const int K = static_cast<int>(patches_.size());
    std::vector<Eigen::VectorXd> local(K);
    parallel_for(K, [&](int k) {
        const Patch& pt = patches_[k];
        const Eigen::VectorXd w = (pt.B->transpose() * r).cwiseQuotient(pt.scaling);
        local[k] = apply_local_schur(k, w).cwiseQuotient(pt.scaling);
    });
    Eigen::VectorXd out = Eigen::VectorXd::Zero(num_multipliers_);
    for (int k = 0; k < K; ++k)
        out += *patches_[k].B * local[k];
    return out;
}

SolveReport pcg_solve(const LinearOperator& F, const LinearOperator& M, const Eigen::VectorXd& g,
                      double tol, std::uint64_t seed, int max_iter)
{
    const auto t0 = std::chrono::steady_clock::now();
    SolveReport rep;
    const Eigen::Index n = g.size();
    if (max_iter < 0)
        max_iter = static_cast<int>(10 * std::max<Eigen::Index>(n, 1));

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i)
        x[i] = dist(rng);

    Eigen::VectorXd r = n > 0 ? Eigen::VectorXd(g - F(x)) : Eigen::VectorXd(g);
    const double r0 = r.norm();
    rep.residuals.push_back(r0);
    std::vector<double> alphas, betas;
    bool breakdown = false;

    if (r0 == 0.0) {
        rep.converged = true;
    } else {
        Eigen::VectorXd z = M(r);
        Eigen::VectorXd p = z;
        double rz = r.dot(z);
        while (rep.iterations < max_iter) {
            const Eigen::VectorXd q = F(p);
            const double pq = p.dot(q);
            if (!(pq > 0.0) || !(rz > 0.0)) {
                breakdown = true;
                break;
            }
            const double alpha = rz / pq;
            alphas.push_back(alpha);
            x += alpha * p;
            r -= alpha * q;
            ++rep.iterations;
            const double rn = r.norm();
            rep.residuals.push_back(rn);
            if (rn <= tol * r0) {
                rep.converged = true;
                break;
            }
            z = M(r);
            const double rz_new = r.dot(z);
            const double beta = rz_new / rz;
            betas.push_back(beta);
            rz = rz_new;
            p = z + beta * p;
        }
    }
    rep.lambda = x;

    // Lanczos tridiagonal from the CG coefficients
    const std::size_t m = alphas.size();
    if (m > 0 && !breakdown) {
        std::vector<double> diag(m), off(m - 1);
        bool ok = true;
        for (std::size_t j = 0; j < m; ++j) {
            diag[j] = 1.0 / alphas[j] + (j > 0 ? betas[j - 1] / alphas[j - 1] : 0.0);
            if (j + 1 < m) {
                if (betas[j] < 0.0)
                    ok = false;
                off[j] = std::sqrt(std::max(betas[j], 0.0)) / alphas[j];
            }
        }
        if (ok) {
            const auto ev = tridiag_eigenvalues(diag, off);
            const double lo = ev.front(), hi = ev.back();
            if (std::isfinite(lo) && std::isfinite(hi) && lo > 0.0) {
                rep.lambda_min = lo;
                rep.lambda_max = hi;
                rep.kappa = hi / lo;
            }
        }
    }
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

std::vector<PatchSolution> recover_solution(const Eigen::VectorXd& lambda,
                                            const std::vector<LocalStokesSystem>& locals,
                                            const std::vector<AugmentedLocalSystem>& aug,
                                            const PrimalSystem& primal,
                                            const std::vector<Eigen::VectorXd>& moments)
{
    const int K = static_cast<int>(aug.size());
    Eigen::VectorXd y = Eigen::VectorXd::Zero(primal.num_primal + 1);
    y.head(primal.num_primal) = primal.b - primal.B.transpose() * lambda;
    const Eigen::VectorXd x_pi = primal.solve_extended(y).head(primal.num_primal);

    std::vector<PatchSolution> out(K);
    parallel_for(K, [&](int k) {
        const auto& a = aug[k];
        const auto& loc = locals[k];
        Eigen::VectorXd rhs = a.rhs;
        rhs.head(a.n_gamma) -= a.B.transpose() * lambda;
        Eigen::VectorXd x = a.factor.solve(rhs).head(a.size_x());
        Eigen::VectorXd coarse(a.n_constraints);
        for (int i = 0; i < a.n_constraints; ++i)
            coarse[i] = x_pi[a.global_index[i]];
        x += primal.psi[k] * coarse;

        PatchSolution sol;
        sol.velocity = loc.lift;
        for (int i = 0; i < a.n_gamma; ++i)
            sol.velocity[loc.retained[loc.gamma[i]]] += x[i];
        for (int i = 0; i < a.n_interior; ++i)
            sol.velocity[loc.retained[loc.interior[i]]] += x[a.n_gamma + i];
        sol.pressure = x.segment(a.n_gamma + a.n_interior, a.n_pressure);
        out[k] = std::move(sol);
    });

    // constant shift to a zero global mean (partition of unity)
    double integral = 0.0, area = 0.0;
    for (int k = 0; k < K; ++k) {
        integral += moments[k].dot(out[k].pressure);
        area += moments[k].sum();
    }
    const double shift = integral / area;
    for (auto& s : out)
        s.pressure.array() -= shift;
    return out;
}

IetiDpSolver::IetiDpSolver(const MultiPatch& mp, const DiscreteStokes& ds, PrimalVariant variant,
                           Preconditioner precond)
    : ds_(&ds)
{
    map_ = build_interface_map(mp, ds.spaces);
    primal_ = build_primal_constraints(mp, ds.spaces, map_, ds.moments, variant);
    jump_ = build_jump_operator(map_, ds.spaces);
    auto scaling = multiplicity_scaling(map_, ds.locals);
    aug_ = build_augmented_systems(ds.locals, primal_, jump_);
    primal_system_ = build_primal_system(aug_, primal_, jump_.num_multipliers);
    schur_.emplace(aug_, primal_system_, jump_.num_multipliers);
    precond_.emplace(precond, ds.locals, aug_, primal_, std::move(scaling), jump_.num_multipliers);
}

SolveReport IetiDpSolver::solve(double tol, std::uint64_t seed, int max_iter) const
{
    const auto t0 = std::chrono::steady_clock::now();
    const Eigen::VectorXd g = schur_->rhs();
    SolveReport rep = pcg_solve([this](const Eigen::VectorXd& v) { return schur_->apply(v); },
                                [this](const Eigen::VectorXd& v) { return precond_->apply(v); },
                                g, tol, seed, max_iter);
    rep.solution = recover_solution(rep.lambda, ds_->locals, aug_, primal_system_, ds_->moments);
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

} // namespace ieti
