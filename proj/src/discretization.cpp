/** @file discretization.cpp

    @brief Assembly of K, D, f on mapped patches.
*/
#include "ieti/discretization.hpp"

#include "ieti/error.hpp"

#include <Eigen/Dense>
#include <Eigen/LU>

#include <cmath>
#include <sstream>

namespace ieti {

std::vector<int> TaylorHoodPatchSpace::side_dofs(int side) const
{
    const int nu = velocity.size(0), nv = velocity.size(1);
    std::vector<int> out;
    switch (side) {
    case 0:
        for (int j = 0; j < nv; ++j)
            out.push_back(velocity.index(0, j));
        break;
    case 1:
        for (int j = 0; j < nv; ++j)
            out.push_back(velocity.index(nu - 1, j));
        break;
    case 2:
        for (int i = 0; i < nu; ++i)
            out.push_back(velocity.index(i, 0));
        break;
    default:
        for (int i = 0; i < nu; ++i)
            out.push_back(velocity.index(i, nv - 1));
        break;
    }
    return out;
}

int TaylorHoodPatchSpace::corner_dof(int corner) const
{
    const int i = (corner & 1) ? velocity.size(0) - 1 : 0;
    const int j = (corner & 2) ? velocity.size(1) - 1 : 0;
    return velocity.index(i, j);
}

std::vector<bool> TaylorHoodPatchSpace::eliminated() const
{
    const int n = scalar_velocity_dim();
    std::vector<bool> scalar(n, false);
    for (int s = 0; s < 4; ++s)
        if (sides[s] == SideKind::Dirichlet)
            for (int k : side_dofs(s))
                scalar[k] = true;
    for (int c = 0; c < 4; ++c)
        if (boundary_corners[c])
            scalar[corner_dof(c)] = true;
    std::vector<bool> out(2 * n);
    for (int c = 0; c < 2; ++c)
        for (int k = 0; k < n; ++k)
            out[c * n + k] = scalar[k];
    return out;
}

TaylorHoodPatchSpace make_taylor_hood(int p, int level, std::array<int, 2> base_elements,
                                      std::array<SideKind, 4> sides,
                                      std::array<bool, 4> boundary_corners)
{
    if (p < 1)
        throw Error(ErrorKind::Configuration, "Taylor-Hood degree must be >= 1");
    // velocity degree p+1 with smoothness p-1, pressure degree p with smoothness p-1
    TensorSplineSpace vel(make_space(p + 1, p - 1, level, base_elements[0]),
                          make_space(p + 1, p - 1, level, base_elements[1]));
    TensorSplineSpace pre(make_space(p, p - 1, level, base_elements[0]),
                          make_space(p, p - 1, level, base_elements[1]));
    return TaylorHoodPatchSpace{p, std::move(vel), std::move(pre), sides, boundary_corners};
}

std::vector<TaylorHoodPatchSpace> build_spaces(const MultiPatch& mp, const ElementLayout& layout,
                                               int p, int level)
{
    if (static_cast<int>(layout.elements.size()) != mp.num_patches())
        throw Error(ErrorKind::DimensionMismatch, "layout does not match the multipatch");
    std::vector<TaylorHoodPatchSpace> out;
    for (int k = 0; k < mp.num_patches(); ++k) {
        std::array<SideKind, 4> sides{};
        for (int s = 0; s < 4; ++s)
            sides[s] = mp.is_boundary_side(k, s) ? SideKind::Dirichlet : SideKind::Interface;
        std::array<bool, 4> corners{};
        for (int c = 0; c < 4; ++c)
            corners[c] = mp.vertex_on_boundary(mp.corner_class(k, c));
        out.push_back(make_taylor_hood(p, level, layout.elements[k], sides, corners));
    }
    return out;
}

namespace {

/// Basis tables of one univariate space at the Gauss points of each element.
struct ElementTable {
    std::vector<double> lo, hi;
    // [element][point] -> BasisValues
    std::vector<std::vector<BasisValues>> values;
};

ElementTable tabulate(const KnotVector& kv, const QuadratureRule& q, int derivs)
{
    ElementTable t;
    const auto br = kv.breaks();
    for (std::size_t e = 0; e + 1 < br.size(); ++e) {
        t.lo.push_back(br[e]);
        t.hi.push_back(br[e + 1]);
        std::vector<BasisValues> pts;
        for (double x : q.nodes)
            pts.push_back(eval_basis(kv, br[e] + x * (br[e + 1] - br[e]), derivs));
        t.values.push_back(std::move(pts));
    }
    return t;
}

void check_jacobian(double det, const Eigen::Matrix2d& jac, int patch_id, double u, double v)
{
    if (!std::isfinite(det) || std::abs(det) <= 1e-13 * jac.squaredNorm()) {
        std::ostringstream os;
        os << "singular Jacobian on patch " << patch_id << " at quadrature node (" << u << ", "
           << v << ")";
        throw Error(ErrorKind::Geometry, os.str());
    }
}

SparseMatrix selection(const std::vector<int>& idx, int n)
{
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < idx.size(); ++i)
        t.emplace_back(static_cast<int>(i), idx[i], 1.0);
    SparseMatrix s(static_cast<Eigen::Index>(idx.size()), n);
    s.setFromTriplets(t.begin(), t.end());
    return s;
}

} // namespace

LocalStokesSystem assemble_local(const GeometryMap& patch, const TaylorHoodPatchSpace& space,
                                 const VectorField& rhs, int patch_id)
{
    const int p = space.degree;
    const QuadratureRule q = gauss_legendre(p + 2);
    const auto& V = space.velocity;
    const auto& Q = space.pressure;
    const int N = V.dimension();
    const int M = Q.dimension();
    const int pv = p + 1;
    const int nlv = (pv + 1) * (pv + 1);
    const int nlp = (p + 1) * (p + 1);

    const ElementTable vu = tabulate(V.factor(0), q, 1), vv = tabulate(V.factor(1), q, 1);
    const ElementTable qu = tabulate(Q.factor(0), q, 0), qv = tabulate(Q.factor(1), q, 0);
    if (vu.lo != qu.lo || vv.lo != qv.lo)
        throw Error(ErrorKind::Configuration, "velocity and pressure meshes differ");

    std::vector<Triplet> tk, td;
    Eigen::VectorXd f = Eigen::VectorXd::Zero(2 * N);
    Eigen::MatrixXd ke(nlv, nlv), de(nlp, 2 * nlv);
    Eigen::VectorXd fe(2 * nlv);
    std::vector<int> vidx(nlv), pidx(nlp);
    Eigen::MatrixXd grad(2, nlv);
    Eigen::VectorXd phi(nlv), psi(nlp);

    for (std::size_t ej = 0; ej < vv.lo.size(); ++ej) {
        for (std::size_t ei = 0; ei < vu.lo.size(); ++ei) {
            const double hu = vu.hi[ei] - vu.lo[ei], hv = vv.hi[ej] - vv.lo[ej];
            ke.setZero();
            de.setZero();
            fe.setZero();
            const int fu = vu.values[ei][0].first, fv = vv.values[ej][0].first;
            const int gu = qu.values[ei][0].first, gv = qv.values[ej][0].first;
            for (int b = 0; b <= pv; ++b)
                for (int a = 0; a <= pv; ++a)
                    vidx[b * (pv + 1) + a] = V.index(fu + a, fv + b);
            for (int b = 0; b <= p; ++b)
                for (int a = 0; a <= p; ++a)
                    pidx[b * (p + 1) + a] = Q.index(gu + a, gv + b);

            for (std::size_t jq = 0; jq < q.nodes.size(); ++jq) {
                for (std::size_t iq = 0; iq < q.nodes.size(); ++iq) {
                    const double u = vu.lo[ei] + q.nodes[iq] * hu;
                    const double v = vv.lo[ej] + q.nodes[jq] * hv;
                    Point x;
                    Eigen::Matrix2d jac;
                    patch.eval_with_jacobian(u, v, x, jac);
                    const double det = jac.determinant();
                    check_jacobian(det, jac, patch_id, u, v);
                    const Eigen::Matrix2d jinv_t = jac.inverse().transpose();
                    const double w = q.weights[iq] * q.weights[jq] * hu * hv * std::abs(det);

                    const auto& bu = vu.values[ei][iq];
                    const auto& bv = vv.values[ej][jq];
                    for (int b = 0; b <= pv; ++b)
                        for (int a = 0; a <= pv; ++a) {
                            const int l = b * (pv + 1) + a;
                            phi[l] = bu.values(0, a) * bv.values(0, b);
                            const Eigen::Vector2d gp(bu.values(1, a) * bv.values(0, b),
                                                     bu.values(0, a) * bv.values(1, b));
                            grad.col(l) = jinv_t * gp;
                        }
                    const auto& cu = qu.values[ei][iq];
                    const auto& cv = qv.values[ej][jq];
                    for (int b = 0; b <= p; ++b)
                        for (int a = 0; a <= p; ++a)
                            psi[b * (p + 1) + a] = cu.values(0, a) * cv.values(0, b);

                    ke.noalias() += w * grad.transpose() * grad;
                    // D(i, c*N + j) = int q_i d_c phi_j
                    de.leftCols(nlv).noalias() += w * psi * grad.row(0);
                    de.rightCols(nlv).noalias() += w * psi * grad.row(1);
                    const Eigen::Vector2d fx = rhs(x);
                    fe.head(nlv).noalias() += (w * fx[0]) * phi;
                    fe.tail(nlv).noalias() += (w * fx[1]) * phi;
                }
            }
            for (int c = 0; c < 2; ++c)
                for (int l = 0; l < nlv; ++l) {
                    f[c * N + vidx[l]] += fe[c * nlv + l];
                    for (int m = 0; m < nlv; ++m)
                        tk.emplace_back(c * N + vidx[l], c * N + vidx[m], ke(l, m));
                }
            for (int i = 0; i < nlp; ++i)
                for (int c = 0; c < 2; ++c)
                    for (int l = 0; l < nlv; ++l)
                        td.emplace_back(pidx[i], c * N + vidx[l], de(i, c * nlv + l));
        }
    }

    LocalStokesSystem sys;
    sys.K_full.resize(2 * N, 2 * N);
    sys.K_full.setFromTriplets(tk.begin(), tk.end());
    // exact symmetry regardless of summation order
    sys.K_full = 0.5 * (SparseMatrix(sys.K_full.transpose()) + sys.K_full);
    sys.D_full.resize(M, 2 * N);
    sys.D_full.setFromTriplets(td.begin(), td.end());
    sys.f_full = f;

    const std::vector<bool> elim = space.eliminated();
    std::vector<bool> on_interface(N, false);
    for (int s = 0; s < 4; ++s)
        if (space.sides[s] == SideKind::Interface)
            for (int k : space.side_dofs(s))
                on_interface[k] = true;
    sys.full_to_retained.assign(2 * N, -1);
    for (int i = 0; i < 2 * N; ++i)
        if (!elim[i]) {
            sys.full_to_retained[i] = static_cast<int>(sys.retained.size());
            sys.retained.push_back(i);
        }
    for (int r = 0; r < sys.num_retained(); ++r) {
        if (on_interface[sys.retained[r] % N])
            sys.gamma.push_back(r);
        else
            sys.interior.push_back(r);
    }
    const SparseMatrix sel = selection(sys.retained, 2 * N);
    sys.K = sel * sys.K_full * sel.transpose();
    sys.D = sys.D_full * sel.transpose();
    sys.lift = Eigen::VectorXd::Zero(2 * N);
    sys.f = gather(f, sys.retained);
    sys.g = Eigen::VectorXd::Zero(M);
    return sys;
}

std::vector<Eigen::VectorXd> dirichlet_lift(const MultiPatch& mp,
                                            const std::vector<TaylorHoodPatchSpace>& spaces,
                                            const VectorField& g)
{
    std::vector<Eigen::VectorXd> out;
    for (int k = 0; k < mp.num_patches(); ++k) {
        const auto& sp = spaces[k];
        const auto& geo = mp.patch(k);
        const int N = sp.scalar_velocity_dim();
        Eigen::VectorXd lift = Eigen::VectorXd::Zero(2 * N);
        for (int s = 0; s < 4; ++s) {
            if (sp.sides[s] != SideKind::Dirichlet)
                continue;
            const KnotVector& kv = sp.velocity.factor(side_direction(s));
            const auto tau = greville_points(kv);
            const int n = kv.dimension();
            Eigen::MatrixXd colloc = Eigen::MatrixXd::Zero(n, n);
            Eigen::MatrixXd vals(n, 2);
            for (int i = 0; i < n; ++i) {
                const BasisValues b = eval_basis(kv, tau[i], 0);
                for (int a = 0; a <= kv.degree(); ++a)
                    colloc(i, b.first + a) = b.values(0, a);
                const auto uv = side_parameter(s, tau[i]);
                vals.row(i) = g(geo.eval(uv[0], uv[1])).transpose();
            }
            const Eigen::MatrixXd coef = colloc.partialPivLu().solve(vals);
            const auto dofs = sp.side_dofs(s);
            for (int i = 0; i < n; ++i)
                for (int c = 0; c < 2; ++c)
                    lift[c * N + dofs[i]] = coef(i, c);
        }
        for (int c = 0; c < 4; ++c) {
            if (!sp.boundary_corners[c])
                continue;
            const Eigen::Vector2d val = g(geo.corner(c));
            lift[sp.corner_dof(c)] = val[0];
            lift[N + sp.corner_dof(c)] = val[1];
        }
        out.push_back(std::move(lift));
    }
    return out;
}

void apply_lift(LocalStokesSystem& sys, const Eigen::VectorXd& lift)
{
    sys.lift = lift;
    const Eigen::VectorXd kl = sys.K_full * lift;
    sys.f = gather(sys.f_full - kl, sys.retained);
    sys.g = -(sys.D_full * lift);
}

Eigen::VectorXd pressure_moments(const GeometryMap& patch, const TaylorHoodPatchSpace& space)
{
    const int p = space.degree;
    const QuadratureRule q = gauss_legendre(p + 2);
    const auto& Q = space.pressure;
    const ElementTable qu = tabulate(Q.factor(0), q, 0), qv = tabulate(Q.factor(1), q, 0);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(Q.dimension());
    for (std::size_t ej = 0; ej < qv.lo.size(); ++ej)
        for (std::size_t ei = 0; ei < qu.lo.size(); ++ei) {
            const double hu = qu.hi[ei] - qu.lo[ei], hv = qv.hi[ej] - qv.lo[ej];
            for (std::size_t jq = 0; jq < q.nodes.size(); ++jq)
                for (std::size_t iq = 0; iq < q.nodes.size(); ++iq) {
                    const double u = qu.lo[ei] + q.nodes[iq] * hu;
                    const double v = qv.lo[ej] + q.nodes[jq] * hv;
                    const double w = q.weights[iq] * q.weights[jq] * hu * hv *
                                     std::abs(patch.jacobian(u, v).determinant());
                    const auto& bu = qu.values[ei][iq];
                    const auto& bv = qv.values[ej][jq];
                    for (int b = 0; b <= p; ++b)
                        for (int a = 0; a <= p; ++a)
                            out[Q.index(bu.first + a, bv.first + b)] +=
                                w * bu.values(0, a) * bv.values(0, b);
                }
        }
    return out;
}

DiscreteStokes discretize(const MultiPatch& mp, const ElementLayout& layout, int p, int level,
                          const VectorField& rhs, const VectorField& boundary)
{
    DiscreteStokes ds;
    ds.degree = p;
    ds.level = level;
    ds.spaces = build_spaces(mp, layout, p, level);
    const auto lifts = dirichlet_lift(mp, ds.spaces, boundary);
    for (int k = 0; k < mp.num_patches(); ++k) {
        ds.locals.push_back(assemble_local(mp.patch(k), ds.spaces[k], rhs, k));
        apply_lift(ds.locals.back(), lifts[k]);
        ds.moments.push_back(pressure_moments(mp.patch(k), ds.spaces[k]));
    }
    return ds;
}

Eigen::Vector2d eval_velocity(const TaylorHoodPatchSpace& space, const Eigen::VectorXd& coeffs,
                              double u, double v)
{
    const auto& V = space.velocity;
    const int N = V.dimension();
    const BasisValues bu = eval_basis(V.factor(0), u, 0);
    const BasisValues bv = eval_basis(V.factor(1), v, 0);
    Eigen::Vector2d out = Eigen::Vector2d::Zero();
    for (int b = 0; b < bv.values.cols(); ++b)
        for (int a = 0; a < bu.values.cols(); ++a) {
            const int k = V.index(bu.first + a, bv.first + b);
            const double w = bu.values(0, a) * bv.values(0, b);
            out[0] += w * coeffs[k];
            out[1] += w * coeffs[N + k];
        }
    return out;
}

double eval_pressure(const TaylorHoodPatchSpace& space, const Eigen::VectorXd& coeffs, double u,
                     double v)
{
    const auto& Q = space.pressure;
    const BasisValues bu = eval_basis(Q.factor(0), u, 0);
    const BasisValues bv = eval_basis(Q.factor(1), v, 0);
    double out = 0.0;
    for (int b = 0; b < bv.values.cols(); ++b)
        for (int a = 0; a < bu.values.cols(); ++a)
            out += bu.values(0, a) * bv.values(0, b) * coeffs[Q.index(bu.first + a, bv.first + b)];
    return out;
}

std::array<double, 2> l2_error_squared(const GeometryMap& patch, const TaylorHoodPatchSpace& space,
                                       const Eigen::VectorXd& velocity,
                                       const Eigen::VectorXd& pressure, const VectorField& u,
                                       const ScalarField& p)
{
    const QuadratureRule q = gauss_legendre(space.degree + 3);
    const auto br_u = space.velocity.factor(0).breaks();
    const auto br_v = space.velocity.factor(1).breaks();
    std::array<double, 2> err{0.0, 0.0};
    for (std::size_t ej = 0; ej + 1 < br_v.size(); ++ej)
        for (std::size_t ei = 0; ei + 1 < br_u.size(); ++ei) {
            const double hu = br_u[ei + 1] - br_u[ei], hv = br_v[ej + 1] - br_v[ej];
            for (std::size_t jq = 0; jq < q.nodes.size(); ++jq)
                for (std::size_t iq = 0; iq < q.nodes.size(); ++iq) {
                    const double s = br_u[ei] + q.nodes[iq] * hu;
                    const double t = br_v[ej] + q.nodes[jq] * hv;
                    Point x;
                    Eigen::Matrix2d jac;
                    patch.eval_with_jacobian(s, t, x, jac);
                    const double w =
                        q.weights[iq] * q.weights[jq] * hu * hv * std::abs(jac.determinant());
                    err[0] += w * (eval_velocity(space, velocity, s, t) - u(x)).squaredNorm();
                    const double dp = eval_pressure(space, pressure, s, t) - p(x);
                    err[1] += w * dp * dp;
                }
        }
    return err;
}

} // namespace ieti
