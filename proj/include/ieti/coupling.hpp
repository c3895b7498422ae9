/** @file coupling.hpp

    @brief Interface DOF identification, jump operators and primal
    constraints of the dual-primal decomposition.

    All velocity DOF references in this module use full patch-local
    velocity indices (component-major); conversion to the retained or Gamma
    numbering happens where local matrices are built.
*/
#pragma once

#include "ieti/discretization.hpp"
#include "ieti/geometry.hpp"
#include "ieti/linalg.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace ieti {

struct DofRef {
    int patch;
    int dof; ///< full velocity index
};

struct DofPair {
    DofRef a;
    DofRef b;
};

struct InterfaceDofMap {
    /// Matched non-corner pairs per interface (both components).
    std::vector<std::vector<DofPair>> pairs;
    /// Velocity corner classes: members of each (vertex, component) class
    /// that is not on the Dirichlet boundary.
    struct CornerClass {
        int vertex;
        int component;
        std::vector<DofRef> members;
    };
    std::vector<CornerClass> corners;
};

InterfaceDofMap build_interface_map(const MultiPatch& mp,
                                    const std::vector<TaylorHoodPatchSpace>& spaces);

enum class PrimalVariant { Corners, CornersEdges, CornersNormals };

PrimalVariant parse_variant(const std::string& name);
std::string to_string(PrimalVariant v);

struct PatchPrimal {
    /// Velocity constraint rows over full velocity indices; eliminated
    /// columns carry no entries.
    SparseMatrix Cv;
    /// Pressure moment row.
    Eigen::RowVectorXd Cp;
    /// Global primal index of each local constraint, pressure first:
    /// [pressure, Cv rows...].
    std::vector<int> global_index;

    int num_local() const { return static_cast<int>(global_index.size()); }
};

struct PrimalConstraints {
    PrimalVariant variant = PrimalVariant::Corners;
    std::vector<PatchPrimal> patches;
    int num_corner_primal = 0;
    int num_edge_primal = 0;
    int num_pressure_primal = 0;
    int num_primal() const { return num_corner_primal + num_edge_primal + num_pressure_primal; }
    /// First global index of the pressure averages.
    int pressure_offset() const { return num_corner_primal + num_edge_primal; }
};

/// Global layout: corner classes, then edge classes, then K pressure
/// averages.
PrimalConstraints build_primal_constraints(const MultiPatch& mp,
                                           const std::vector<TaylorHoodPatchSpace>& spaces,
                                           const InterfaceDofMap& map,
                                           const std::vector<Eigen::VectorXd>& moments,
                                           PrimalVariant variant);

/// Per-patch B_Gamma over full velocity indices, one row per matched pair:
/// +1 on side a, -1 on side b.
struct JumpOperator {
    int num_multipliers = 0;
    std::vector<SparseMatrix> blocks; ///< num_multipliers x full velocity size
};

JumpOperator build_jump_operator(const InterfaceDofMap& map,
                                 const std::vector<TaylorHoodPatchSpace>& spaces);

/// Diagonal D^(k) on the retained Gamma DOFs of each patch (all entries 2).
std::vector<Eigen::VectorXd> multiplicity_scaling(const InterfaceDofMap& map,
                                                  const std::vector<LocalStokesSystem>& locals);

/// Trace integrals of the velocity basis on one side: int_side B_m ds and
/// int_side B_m n ds, with n the unit normal rotated clockwise from the
/// side tangent (d/dt of the side curve). Also returns the side length.
struct SideIntegrals {
    Eigen::VectorXd plain;
    Eigen::MatrixXd normal; ///< n_side x 2
    double length = 0.0;
};

SideIntegrals side_integrals(const GeometryMap& patch, const TaylorHoodPatchSpace& space, int side);

} // namespace ieti
