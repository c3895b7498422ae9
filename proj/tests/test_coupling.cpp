/** @file test_coupling.cpp

    @brief DOF pairing, jump operator, primal constraint rows, scaling.
*/
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ieti/bench.hpp"
#include "ieti/coupling.hpp"
#include "ieti/error.hpp"

#include <Eigen/LU>

#include <cmath>
#include <set>

using namespace ieti;

namespace {

const std::string data_dir = IETI_TEST_DATA_DIR;

struct Setup {
    MultiPatch mp;
    DiscreteStokes ds;
};

Setup setup(MultiPatch mp, int p, int level)
{
    const BenchmarkProblem bp = benchmark_problem();
    DiscreteStokes ds = discretize(mp, uniform_layout(mp), p, level, bp.f, bp.u);
    return {std::move(mp), std::move(ds)};
}

// trace value of scalar velocity basis function `dof` on `side` at t
double trace_value(const TaylorHoodPatchSpace& sp, int dof, int side, double t)
{
    const auto uv = side_parameter(side, t);
    const auto ij = sp.velocity.multi_index(dof % sp.scalar_velocity_dim());
    const BasisValues bu = eval_basis(sp.velocity.factor(0), uv[0], 0);
    const BasisValues bv = eval_basis(sp.velocity.factor(1), uv[1], 0);
    const int a = ij[0] - bu.first, b = ij[1] - bv.first;
    if (a < 0 || a >= bu.values.cols() || b < 0 || b >= bv.values.cols())
        return 0.0;
    return bu.values(0, a) * bv.values(0, b);
}

void check_pair_traces(const MultiPatch& mp, const std::vector<TaylorHoodPatchSpace>& spaces,
                       const InterfaceDofMap& map)
{
    for (std::size_t e = 0; e < map.pairs.size(); ++e) {
        const Interface& ifc = mp.interfaces()[e];
        for (const auto& pr : map.pairs[e]) {
            CHECK(pr.a.dof / spaces[ifc.patch_a].scalar_velocity_dim() ==
                  pr.b.dof / spaces[ifc.patch_b].scalar_velocity_dim());
            for (int s = 0; s < 10; ++s) {
                const double t = (s + 0.37) / 10.0;
                const double va = trace_value(spaces[ifc.patch_a], pr.a.dof, ifc.side_a, t);
                const double vb = trace_value(spaces[ifc.patch_b], pr.b.dof, ifc.side_b,
                                              ifc.reversed ? 1.0 - t : t);
                CHECK(std::abs(va - vb) <= 1e-10);
            }
        }
    }
}

} // namespace

TEST_CASE("interface map on the 2x2 unit square")
{
    const Setup s = setup(unit_square(2), 2, 1);
    const InterfaceDofMap map = build_interface_map(s.mp, s.ds.spaces);
    const int edge_dim = 4 + 1 * 2; // degree 3, smoothness 1, two elements
    REQUIRE(map.pairs.size() == 4);
    for (const auto& pairs : map.pairs)
        CHECK(pairs.size() == static_cast<std::size_t>(2 * (edge_dim - 2)));
    // the two end points: one eliminated (boundary), one in the corner class
    REQUIRE(map.corners.size() == 2);
    for (const auto& cc : map.corners)
        CHECK(cc.members.size() == 4);
    check_pair_traces(s.mp, s.ds.spaces, map);
}

TEST_CASE("single patch")
{
    const Setup s = setup(unit_square(1), 2, 1);
    const InterfaceDofMap map = build_interface_map(s.mp, s.ds.spaces);
    CHECK(map.pairs.empty());
    CHECK(map.corners.empty());
    CHECK(build_jump_operator(map, s.ds.spaces).num_multipliers == 0);
}

TEST_CASE("reversed interface pairing")
{
    const Setup s = setup(load_multipatch(data_dir + "/two_patch_reversed.mp"), 2, 1);
    const InterfaceDofMap map = build_interface_map(s.mp, s.ds.spaces);
    REQUIRE(map.pairs.size() == 1);
    const auto& pairs = map.pairs[0];
    const auto& sa = s.ds.spaces[0];
    const auto& sb = s.ds.spaces[1];
    const auto da = sa.side_dofs(1), db = sb.side_dofs(1);
    // first pair: second DOF of side a, second to last of side b
    CHECK(pairs.front().a.dof == da[1]);
    CHECK(pairs.front().b.dof == db[db.size() - 2]);
    check_pair_traces(s.mp, s.ds.spaces, map);
}

TEST_CASE("multiplier count and jump rows")
{
    const Setup s = setup(load_multipatch(data_dir + "/two_patch_reversed.mp"), 2, 0);
    const InterfaceDofMap map = build_interface_map(s.mp, s.ds.spaces);
    const JumpOperator jump = build_jump_operator(map, s.ds.spaces);
    const int edge_dim = 4; // degree 3 Bernstein
    CHECK(jump.num_multipliers == 2 * (edge_dim - 2));

    const Setup q = setup(quarter_annulus(3, 2), 2, 1);
    const InterfaceDofMap qm = build_interface_map(q.mp, q.ds.spaces);
    const JumpOperator qj = build_jump_operator(qm, q.ds.spaces);
    std::set<std::pair<int, int>> corner_dofs;
    for (const auto& cc : qm.corners)
        for (const auto& m : cc.members)
            corner_dofs.insert({m.patch, m.dof});
    std::vector<int> nnz(qj.num_multipliers, 0);
    std::vector<double> sum(qj.num_multipliers, 0.0);
    for (int k = 0; k < q.mp.num_patches(); ++k)
        for (int c = 0; c < qj.blocks[k].outerSize(); ++c)
            for (SparseMatrix::InnerIterator it(qj.blocks[k], c); it; ++it) {
                ++nnz[it.row()];
                sum[it.row()] += it.value();
                CHECK(std::abs(it.value()) == 1.0);
                CHECK(corner_dofs.count({k, static_cast<int>(c)}) == 0);
                CHECK(!q.ds.spaces[k].eliminated()[c]);
            }
    for (int r = 0; r < qj.num_multipliers; ++r) {
        CHECK(nnz[r] == 2);
        CHECK(sum[r] == 0.0);
    }

    // a continuous field: equal coefficients on every pair
    std::vector<Eigen::VectorXd> u;
    for (int k = 0; k < q.mp.num_patches(); ++k)
        u.push_back(Eigen::VectorXd::Zero(q.ds.spaces[k].num_velocity()));
    double value = 1.0;
    for (const auto& pairs : qm.pairs)
        for (const auto& pr : pairs) {
            value = std::fmod(value * 1.618 + 0.3, 7.0);
            u[pr.a.patch][pr.a.dof] = value;
            u[pr.b.patch][pr.b.dof] = value;
        }
    Eigen::VectorXd jump_sum = Eigen::VectorXd::Zero(qj.num_multipliers);
    for (int k = 0; k < q.mp.num_patches(); ++k)
        jump_sum += qj.blocks[k] * u[k];
    CHECK(jump_sum.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("primal constraints on the 2x2 unit square")
{
    const Setup s = setup(unit_square(2), 2, 1);
    const InterfaceDofMap map = build_interface_map(s.mp, s.ds.spaces);
    const PrimalConstraints pc =
        build_primal_constraints(s.mp, s.ds.spaces, map, s.ds.moments, PrimalVariant::Corners);
    CHECK(pc.num_corner_primal == 2);
    CHECK(pc.num_edge_primal == 0);
    CHECK(pc.num_pressure_primal == 4);
    for (int k = 0; k < 4; ++k) {
        const auto& gi = pc.patches[k].global_index;
        REQUIRE(gi.size() == 3);
        CHECK(gi[0] == pc.pressure_offset() + k);
        CHECK(gi[1] == 0);
        CHECK(gi[2] == 1);
        // corner rows select one coefficient
        const Eigen::MatrixXd cv(pc.patches[k].Cv);
        for (int r = 0; r < cv.rows(); ++r) {
            CHECK(cv.row(r).sum() == 1.0);
            CHECK((cv.row(r).array() != 0.0).count() == 1);
        }
        CHECK((pc.patches[k].Cp.transpose() - s.ds.moments[k]).norm() == 0.0);
    }

    const PrimalConstraints ce =
        build_primal_constraints(s.mp, s.ds.spaces, map, s.ds.moments, PrimalVariant::CornersEdges);
    const PrimalConstraints cn =
        build_primal_constraints(s.mp, s.ds.spaces, map, s.ds.moments, PrimalVariant::CornersNormals);
    CHECK(ce.num_edge_primal - cn.num_edge_primal == static_cast<int>(s.mp.interfaces().size()));
    CHECK(ce.num_corner_primal == cn.num_corner_primal);
}

TEST_CASE("normal rows on straight edges equal component averages")
{
    const Setup s = setup(unit_square(2), 2, 1);
    const InterfaceDofMap map = build_interface_map(s.mp, s.ds.spaces);
    const PrimalConstraints ce =
        build_primal_constraints(s.mp, s.ds.spaces, map, s.ds.moments, PrimalVariant::CornersEdges);
    const PrimalConstraints cn =
        build_primal_constraints(s.mp, s.ds.spaces, map, s.ds.moments, PrimalVariant::CornersNormals);
    for (int e = 0; e < static_cast<int>(s.mp.interfaces().size()); ++e) {
        const Interface& ifc = s.mp.interfaces()[e];
        // normal of side a is the clockwise rotation of its tangent: +x on
        // vertical u=1 sides, -y on horizontal v=1 sides
        const int comp = side_direction(ifc.side_a) == 1 ? 0 : 1;
        const double sign = side_direction(ifc.side_a) == 1 ? 1.0 : -1.0;
        const int ce_row = ce.num_corner_primal + 2 * e + comp;
        const int cn_row = cn.num_corner_primal + e;
        for (int k : {ifc.patch_a, ifc.patch_b}) {
            const auto& pa = ce.patches[k];
            const auto& pn = cn.patches[k];
            Eigen::RowVectorXd rce, rcn;
            for (int r = 1; r < pa.num_local(); ++r)
                if (pa.global_index[r] == ce_row)
                    rce = Eigen::MatrixXd(pa.Cv).row(r - 1);
            for (int r = 1; r < pn.num_local(); ++r)
                if (pn.global_index[r] == cn_row)
                    rcn = Eigen::MatrixXd(pn.Cv).row(r - 1);
            REQUIRE(rce.size() > 0);
            REQUIRE(rcn.size() > 0);
            CHECK((rcn - sign * rce).cwiseAbs().maxCoeff() <= 1e-14);
        }
    }
}

TEST_CASE("edge rows are normalized averages")
{
    const Setup s = setup(quarter_annulus(2, 2), 2, 1);
    for (int k = 0; k < s.mp.num_patches(); ++k)
        for (int side = 0; side < 4; ++side) {
            const SideIntegrals si = side_integrals(s.mp.patch(k), s.ds.spaces[k], side);
            CHECK(si.plain.sum() / si.length == doctest::Approx(1.0).epsilon(1e-13));
            // side 0/1 are arcs: the unit normal is radial
            if (side < 2) {
                const double r = 1.0 + (k % 2 + side) * 0.5;
                const double len = r * M_PI / 4.0;
                CHECK(si.length == doctest::Approx(len).epsilon(1e-12));
            }
        }
}

TEST_CASE("normal averages of the radial field on arcs")
{
    const Setup s = setup(quarter_annulus(2, 2), 2, 2);
    for (int k = 0; k < s.mp.num_patches(); ++k) {
        const auto& sp = s.ds.spaces[k];
        const KnotVector& kv = sp.velocity.factor(1);
        const auto g = greville_points(kv);
        const int n = kv.dimension();
        // interpolation of the trace by collocation at the Greville points
        Eigen::MatrixXd colloc = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            const BasisValues b = eval_basis(kv, g[i], 0);
            for (int a = 0; a <= kv.degree(); ++a)
                colloc(i, b.first + a) = b.values(0, a);
        }
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(colloc);
        for (int side = 0; side < 2; ++side) {
            const SideIntegrals si = side_integrals(s.mp.patch(k), sp, side);
            Eigen::MatrixXd values(n, 2);
            for (int i = 0; i < n; ++i) {
                const Point x = s.mp.patch(k).eval(side == 0 ? 0.0 : 1.0, g[i]);
                values.row(i) = (x / x.norm()).transpose();
            }
            const Eigen::MatrixXd c = lu.solve(values);
            const double avg = (si.normal.cwiseProduct(c)).sum() / si.length;
            // what remains is the interpolation error of x/|x| (about 2e-6)
            CHECK(std::abs(avg - 1.0) <= 1e-5);
        }
    }
}

TEST_CASE("multiplicity scaling")
{
    const Setup s = setup(quarter_annulus(3, 3), 2, 1);
    const InterfaceDofMap map = build_interface_map(s.mp, s.ds.spaces);
    const auto d = multiplicity_scaling(map, s.ds.locals);
    for (std::size_t k = 0; k < d.size(); ++k) {
        CHECK(d[k].size() == static_cast<Eigen::Index>(s.ds.locals[k].gamma.size()));
        CHECK((d[k].array() == 2.0).all());
        const Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(d[k].size(), -1.0, 3.0);
        CHECK((d[k].cwiseProduct(d[k].cwiseProduct(v)) - 4.0 * v).norm() == 0.0);
        CHECK(((2.0 * v).cwiseQuotient(d[k]) - v).norm() == 0.0);
    }
}

TEST_CASE("variant names")
{
    CHECK(parse_variant("ce") == PrimalVariant::CornersEdges);
    CHECK(to_string(parse_variant("cn")) == "cn");
    CHECK_THROWS_AS(parse_variant("edges"), Error);
}
