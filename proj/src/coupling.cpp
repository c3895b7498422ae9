/** @file coupling.cpp

    @brief DOF matching across interfaces, jump operators, primal rows.
*/
#include "ieti/coupling.hpp"

#include "ieti/error.hpp"

#include <sstream>

namespace ieti {

InterfaceDofMap build_interface_map(const MultiPatch& mp,
                                    const std::vector<TaylorHoodPatchSpace>& spaces)
{
    InterfaceDofMap map;
    for (const auto& ifc : mp.interfaces()) {
        const auto& sa = spaces[ifc.patch_a];
        const auto& sb = spaces[ifc.patch_b];
        const KnotVector& ka = sa.velocity.factor(side_direction(ifc.side_a));
        const KnotVector& kb = sb.velocity.factor(side_direction(ifc.side_b));
        bool match = ka.degree() == kb.degree() && ka.knots().size() == kb.knots().size();
        if (match) {
            const auto& x = ka.knots();
            const auto& y = kb.knots();
            for (std::size_t i = 0; i < x.size() && match; ++i)
                match = ifc.reversed ? x[i] == 1.0 - y[y.size() - 1 - i] : x[i] == y[i];
        }
        if (!match) {
            std::ostringstream os;
            os << "traces of patch " << ifc.patch_a << " side " << ifc.side_a << " and patch "
               << ifc.patch_b << " side " << ifc.side_b << " do not match";
            throw Error(ErrorKind::FullyMatching, os.str());
        }
        const auto da = sa.side_dofs(ifc.side_a);
        const auto db = sb.side_dofs(ifc.side_b);
        const int n = static_cast<int>(da.size());
        const int Na = sa.scalar_velocity_dim(), Nb = sb.scalar_velocity_dim();
        std::vector<DofPair> pairs;
        for (int c = 0; c < 2; ++c)
            for (int m = 1; m + 1 < n; ++m) {
                const int mb = ifc.reversed ? n - 1 - m : m;
                pairs.push_back({{ifc.patch_a, c * Na + da[m]}, {ifc.patch_b, c * Nb + db[mb]}});
            }
        map.pairs.push_back(std::move(pairs));
    }

    const auto& classes = mp.corner_classes();
    for (int v = 0; v < static_cast<int>(classes.size()); ++v) {
        if (mp.vertex_on_boundary(v) || classes[v].size() < 2)
            continue;
        for (int c = 0; c < 2; ++c) {
            InterfaceDofMap::CornerClass cc{v, c, {}};
            for (const auto& ref : classes[v]) {
                const auto& sp = spaces[ref.patch];
                cc.members.push_back({ref.patch, c * sp.scalar_velocity_dim() + sp.corner_dof(ref.corner)});
            }
            map.corners.push_back(std::move(cc));
        }
    }
    return map;
}

PrimalVariant parse_variant(const std::string& name)
{
    if (name == "c")
        return PrimalVariant::Corners;
    if (name == "ce")
        return PrimalVariant::CornersEdges;
    if (name == "cn")
        return PrimalVariant::CornersNormals;
    throw Error(ErrorKind::UnknownVariant, "'" + name + "' (expected c, ce or cn)");
}

std::string to_string(PrimalVariant v)
{
    switch (v) {
    case PrimalVariant::Corners: return "c";
    case PrimalVariant::CornersEdges: return "ce";
    case PrimalVariant::CornersNormals: return "cn";
    }
    return "?";
}

SideIntegrals side_integrals(const GeometryMap& patch, const TaylorHoodPatchSpace& space, int side)
{
    const int dir = side_direction(side);
    const KnotVector& kv = space.velocity.factor(dir);
    const QuadratureRule q = gauss_legendre(kv.degree() + 3);
    const auto br = kv.breaks();
    SideIntegrals out;
    out.plain = Eigen::VectorXd::Zero(kv.dimension());
    out.normal = Eigen::MatrixXd::Zero(kv.dimension(), 2);
    for (std::size_t e = 0; e + 1 < br.size(); ++e) {
        const double h = br[e + 1] - br[e];
        for (std::size_t i = 0; i < q.nodes.size(); ++i) {
            const double t = br[e] + q.nodes[i] * h;
            const auto uv = side_parameter(side, t);
            const Eigen::Vector2d tangent = patch.jacobian(uv[0], uv[1]).col(dir);
            const double ds = tangent.norm();
            const Eigen::Vector2d n(tangent.y() / ds, -tangent.x() / ds);
            const double w = q.weights[i] * h * ds;
            out.length += w;
            const BasisValues b = eval_basis(kv, t, 0);
            for (int a = 0; a <= kv.degree(); ++a) {
                out.plain[b.first + a] += w * b.values(0, a);
                out.normal.row(b.first + a) += w * b.values(0, a) * n.transpose();
            }
        }
    }
    return out;
}

PrimalConstraints build_primal_constraints(const MultiPatch& mp,
                                           const std::vector<TaylorHoodPatchSpace>& spaces,
                                           const InterfaceDofMap& map,
                                           const std::vector<Eigen::VectorXd>& moments,
                                           PrimalVariant variant)
{
    const int K = mp.num_patches();
    PrimalConstraints pc;
    pc.variant = variant;

    // per patch: list of (global index, row entries over full velocity DOFs)
    std::vector<std::vector<std::pair<int, std::vector<std::pair<int, double>>>>> rows(K);

    int next = 0;
    for (const auto& cc : map.corners) {
        for (const auto& m : cc.members)
            rows[m.patch].push_back({next, {{m.dof, 1.0}}});
        ++next;
    }
    pc.num_corner_primal = next;

    if (variant != PrimalVariant::Corners) {
        for (int e = 0; e < static_cast<int>(mp.interfaces().size()); ++e) {
            const auto& ifc = mp.interfaces()[e];
            const int n_classes = variant == PrimalVariant::CornersEdges ? 2 : 1;
            for (int side_of = 0; side_of < 2; ++side_of) {
                const int k = side_of == 0 ? ifc.patch_a : ifc.patch_b;
                const int s = side_of == 0 ? ifc.side_a : ifc.side_b;
                const auto& sp = spaces[k];
                const int N = sp.scalar_velocity_dim();
                const auto elim = sp.eliminated();
                const auto dofs = sp.side_dofs(s);
                const SideIntegrals si = side_integrals(mp.patch(k), sp, s);
                // both patches use the normal of side a
                const double sign = (side_of == 1 && ifc.reversed) ? -1.0 : 1.0;
                for (int cls = 0; cls < n_classes; ++cls) {
                    std::vector<std::pair<int, double>> entries;
                    for (std::size_t m = 0; m < dofs.size(); ++m) {
                        for (int c = 0; c < 2; ++c) {
                            double val;
                            if (variant == PrimalVariant::CornersEdges) {
                                if (c != cls)
                                    continue;
                                val = si.plain[m] / si.length;
                            } else {
                                val = sign * si.normal(m, c) / si.length;
                            }
                            const int full = c * N + dofs[m];
                            if (!elim[full])
                                entries.emplace_back(full, val);
                        }
                    }
                    rows[k].push_back({next + cls, std::move(entries)});
                }
            }
            next += n_classes;
        }
    }
    pc.num_edge_primal = next - pc.num_corner_primal;
    pc.num_pressure_primal = K;

    for (int k = 0; k < K; ++k) {
        PatchPrimal pp;
        const int nvel = spaces[k].num_velocity();
        pp.Cp = moments[k].transpose();
        pp.global_index.push_back(pc.pressure_offset() + k);
        std::vector<Triplet> t;
        for (std::size_t r = 0; r < rows[k].size(); ++r) {
            pp.global_index.push_back(rows[k][r].first);
            for (const auto& [col, val] : rows[k][r].second)
                t.emplace_back(static_cast<int>(r), col, val);
        }
        pp.Cv.resize(static_cast<Eigen::Index>(rows[k].size()), nvel);
        pp.Cv.setFromTriplets(t.begin(), t.end());
        pc.patches.push_back(std::move(pp));
    }
    return pc;
}

JumpOperator build_jump_operator(const InterfaceDofMap& map,
                                 const std::vector<TaylorHoodPatchSpace>& spaces)
{
    const int K = static_cast<int>(spaces.size());
    std::vector<std::vector<Triplet>> t(K);
    int row = 0;
    for (const auto& pairs : map.pairs)
        for (const auto& pr : pairs) {
            t[pr.a.patch].emplace_back(row, pr.a.dof, 1.0);
            t[pr.b.patch].emplace_back(row, pr.b.dof, -1.0);
            ++row;
        }
    JumpOperator jump;
    jump.num_multipliers = row;
    for (int k = 0; k < K; ++k) {
        SparseMatrix b(row, spaces[k].num_velocity());
        b.setFromTriplets(t[k].begin(), t[k].end());
        jump.blocks.push_back(std::move(b));
    }
    return jump;
}

std::vector<Eigen::VectorXd> multiplicity_scaling(const InterfaceDofMap& map,
                                                  const std::vector<LocalStokesSystem>& locals)
{
    const int K = static_cast<int>(locals.size());
    std::vector<std::vector<int>> count(K);
    std::vector<std::vector<bool>> primal(K);
    for (int k = 0; k < K; ++k) {
        count[k].assign(locals[k].full_to_retained.size(), 0);
        primal[k].assign(locals[k].full_to_retained.size(), false);
    }
    for (const auto& pairs : map.pairs)
        for (const auto& pr : pairs) {
            ++count[pr.a.patch][pr.a.dof];
            ++count[pr.b.patch][pr.b.dof];
        }
    for (const auto& cc : map.corners)
        for (const auto& m : cc.members)
            primal[m.patch][m.dof] = true;

    std::vector<Eigen::VectorXd> out;
    for (int k = 0; k < K; ++k) {
        for (int r : locals[k].gamma) {
            const int full = locals[k].retained[r];
            if (!primal[k][full] && count[k][full] != 1) {
                std::ostringstream os;
                os << "patch " << k << " DOF " << full << " is shared by " << count[k][full] + 1
                   << " patches and is not primal";
                throw Error(ErrorKind::Multiplicity, os.str());
            }
        }
        out.push_back(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(locals[k].gamma.size()), 2.0));
    }
    return out;
}

} // namespace ieti
