/** @file geometry.hpp

    @brief Patch parameterizations and multi-patch topology.

    Side numbering: 0:{u=0}, 1:{u=1}, 2:{v=0}, 3:{v=1}.
    Corner numbering: 0:(0,0), 1:(1,0), 2:(0,1), 3:(1,1).
    Side s is traced by t in [0,1] along the free parameter, so side 0 and
    side 1 run in v, sides 2 and 3 in u.
*/
#pragma once

#include "ieti/spline.hpp"

#include <Eigen/Core>

#include <array>
#include <filesystem>
#include <string>
#include <vector>

namespace ieti {

using Point = Eigen::Vector2d;

/// Tensor-product B-spline or NURBS map from [0,1]^2 into the plane.
class GeometryMap {
public:
    GeometryMap(TensorSplineSpace space, std::vector<Point> control_points,
                std::vector<double> weights = {});

    const TensorSplineSpace& space() const { return space_; }
    const std::vector<Point>& control_points() const { return control_points_; }
    const std::vector<double>& weights() const { return weights_; }
    bool rational() const { return !weights_.empty(); }

    Point eval(double u, double v) const;
    /// Columns are dG/du and dG/dv.
    Eigen::Matrix2d jacobian(double u, double v) const;
    void eval_with_jacobian(double u, double v, Point& x, Eigen::Matrix2d& jac) const;

    Point corner(int c) const;

private:
    TensorSplineSpace space_;
    std::vector<Point> control_points_;
    std::vector<double> weights_;
};

/// Parameter point on side `side` at trace parameter t.
std::array<double, 2> side_parameter(int side, double t);
/// Corners at t=0 and t=1 of a side.
std::array<int, 2> side_corners(int side);
/// Parametric direction that runs along the side.
inline int side_direction(int side) { return side < 2 ? 1 : 0; }

struct Interface {
    int patch_a;
    int side_a;
    int patch_b;
    int side_b;
    /// G_a(side_a(t)) = G_b(side_b(reversed ? 1 - t : t))
    bool reversed;
};

struct BoundarySide {
    int patch;
    int side;
};

struct CornerRef {
    int patch;
    int corner;
};

class MultiPatch {
public:
    /// Builds topology by coincidence of side end points (relative tolerance
    /// `rel_tol` times the domain diameter) and 20-point curve sampling.
    explicit MultiPatch(std::vector<GeometryMap> patches, double rel_tol = 1e-8);

    int num_patches() const { return static_cast<int>(patches_.size()); }
    const GeometryMap& patch(int k) const { return patches_[k]; }
    const std::vector<GeometryMap>& patches() const { return patches_; }
    const std::vector<Interface>& interfaces() const { return interfaces_; }
    const std::vector<BoundarySide>& boundary() const { return boundary_; }
    const std::vector<std::vector<CornerRef>>& corner_classes() const { return corner_classes_; }

    int corner_class(int patch, int corner) const { return corner_class_of_[patch][corner]; }
    /// True when the physical vertex lies on the domain boundary.
    bool vertex_on_boundary(int corner_class) const { return vertex_boundary_[corner_class]; }
    bool is_boundary_side(int patch, int side) const { return side_interface_[patch][side] < 0; }
    /// Interface index for a patch side, or -1 on the boundary.
    int side_interface(int patch, int side) const { return side_interface_[patch][side]; }

    double diameter() const { return diameter_; }
    double tolerance() const { return tol_; }

private:
    std::vector<GeometryMap> patches_;
    std::vector<Interface> interfaces_;
    std::vector<BoundarySide> boundary_;
    std::vector<std::vector<CornerRef>> corner_classes_;
    std::vector<std::array<int, 4>> corner_class_of_;
    std::vector<std::array<int, 4>> side_interface_;
    std::vector<bool> vertex_boundary_;
    double diameter_ = 0.0;
    double tol_ = 0.0;
};

MultiPatch unit_square(int n);
MultiPatch quarter_annulus(int n_r, int n_t, double r_in = 1.0, double r_out = 2.0);

MultiPatch load_multipatch(const std::filesystem::path& path);
MultiPatch parse_multipatch(const std::string& text);
void save_multipatch(const MultiPatch& mp, const std::filesystem::path& path);
std::string format_multipatch(const MultiPatch& mp);

/// Number of elements per direction on the coarsest level, per patch.
struct ElementLayout {
    std::vector<std::array<int, 2>> elements;
};

/// Validates a per-patch element-count rule against the fully-matching
/// requirement and returns it as the level-0 layout.
ElementLayout initial_refinement(const MultiPatch& mp, std::vector<std::array<int, 2>> rules);
/// Layout read off the geometry knot spans of each patch.
ElementLayout layout_from_geometry(const MultiPatch& mp);
ElementLayout uniform_layout(const MultiPatch& mp);

/// Min and max of det(dG) over a (n x n) tensor Gauss grid of every element
/// of the geometry knot vectors.
std::array<double, 2> jacobian_determinant_range(const GeometryMap& g, int n = 4);

} // namespace ieti
