/** @file discretization.hpp

    @brief Generalized Taylor-Hood spaces on patches and assembly of the
    patch-local Stokes blocks.

    Velocity DOFs are ordered component-major: index c * N + k, where N is
    the scalar velocity dimension and k the lexicographic tensor index.
*/
#pragma once

#include "ieti/geometry.hpp"
#include "ieti/linalg.hpp"
#include "ieti/spline.hpp"

#include <Eigen/Core>

#include <array>
#include <functional>
#include <vector>

namespace ieti {

enum class SideKind { Dirichlet, Interface };

using VectorField = std::function<Eigen::Vector2d(const Point&)>;
using ScalarField = std::function<double(const Point&)>;

struct TaylorHoodPatchSpace {
    int degree = 2; ///< pressure degree p; velocity uses p+1
    TensorSplineSpace velocity;
    TensorSplineSpace pressure;
    std::array<SideKind, 4> sides{SideKind::Dirichlet, SideKind::Dirichlet, SideKind::Dirichlet,
                                  SideKind::Dirichlet};
    /// Corners sitting on a boundary vertex; eliminated even when neither
    /// adjacent side of this patch is a Dirichlet side.
    std::array<bool, 4> boundary_corners{false, false, false, false};

    int scalar_velocity_dim() const { return velocity.dimension(); }
    int num_velocity() const { return 2 * velocity.dimension(); }
    int num_pressure() const { return pressure.dimension(); }

    /// Scalar velocity indices on a side, ordered by the trace parameter.
    std::vector<int> side_dofs(int side) const;
    int corner_dof(int corner) const;
    /// Per full velocity index: true if fixed by the Dirichlet condition.
    std::vector<bool> eliminated() const;
};

/// Velocity degree p+1 / pressure degree p, smoothness p-1, with
/// `base_elements * 2^level` elements per direction.
TaylorHoodPatchSpace make_taylor_hood(int p, int level, std::array<int, 2> base_elements,
                                      std::array<SideKind, 4> sides = {},
                                      std::array<bool, 4> boundary_corners = {});

/// One space per patch, sides classified from the topology.
std::vector<TaylorHoodPatchSpace> build_spaces(const MultiPatch& mp, const ElementLayout& layout,
                                               int p, int level);

struct LocalStokesSystem {
    SparseMatrix K_full;     ///< all velocity DOFs
    SparseMatrix D_full;     ///< pressure x all velocity DOFs
    Eigen::VectorXd f_full;

    std::vector<int> retained;         ///< full velocity index of each retained DOF
    std::vector<int> full_to_retained; ///< -1 where eliminated
    std::vector<int> gamma;            ///< retained positions on some interface
    std::vector<int> interior;         ///< remaining retained positions

    SparseMatrix K;          ///< retained x retained
    SparseMatrix D;          ///< pressure x retained
    Eigen::VectorXd f;       ///< velocity load (lift applied)
    Eigen::VectorXd g;       ///< pressure right-hand side (lift applied)
    Eigen::VectorXd lift;    ///< full velocity Dirichlet coefficients

    int num_retained() const { return static_cast<int>(retained.size()); }
    int num_pressure() const { return static_cast<int>(D.rows()); }
};

/// Gauss-Legendre with p+2 nodes per direction per element.
LocalStokesSystem assemble_local(const GeometryMap& patch, const TaylorHoodPatchSpace& space,
                                 const VectorField& rhs, int patch_id = 0);

/// Greville interpolation of `g` on every Dirichlet side, per patch (full
/// velocity coefficient vectors, zero away from the boundary).
std::vector<Eigen::VectorXd> dirichlet_lift(const MultiPatch& mp,
                                            const std::vector<TaylorHoodPatchSpace>& spaces,
                                            const VectorField& g);

/// Moves the lift to the right-hand side: f -= K lift, g = -D lift.
void apply_lift(LocalStokesSystem& sys, const Eigen::VectorXd& lift);

/// Entries \f$\int_{\Omega_k} q_i\f$ over the physical patch.
Eigen::VectorXd pressure_moments(const GeometryMap& patch, const TaylorHoodPatchSpace& space);

/// Everything patch-local for one (domain, p, level).
struct DiscreteStokes {
    int degree = 2;
    int level = 0;
    std::vector<TaylorHoodPatchSpace> spaces;
    std::vector<LocalStokesSystem> locals;
    std::vector<Eigen::VectorXd> moments;
};

DiscreteStokes discretize(const MultiPatch& mp, const ElementLayout& layout, int p, int level,
                          const VectorField& rhs, const VectorField& boundary);

Eigen::Vector2d eval_velocity(const TaylorHoodPatchSpace& space, const Eigen::VectorXd& coeffs,
                              double u, double v);
double eval_pressure(const TaylorHoodPatchSpace& space, const Eigen::VectorXd& coeffs, double u,
                     double v);

/// Squared L2 norms of (u_h - u) and (p_h - p) over one patch.
std::array<double, 2> l2_error_squared(const GeometryMap& patch, const TaylorHoodPatchSpace& space,
                                       const Eigen::VectorXd& velocity,
                                       const Eigen::VectorXd& pressure, const VectorField& u,
                                       const ScalarField& p);

} // namespace ieti
