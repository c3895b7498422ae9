/** @file geometry.cpp

    @brief Patch maps, topology reconstruction and the built-in domains.
*/
#include "ieti/geometry.hpp"

#include "ieti/error.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

namespace ieti {

GeometryMap::GeometryMap(TensorSplineSpace space, std::vector<Point> control_points,
                         std::vector<double> weights)
    : space_(std::move(space)), control_points_(std::move(control_points)),
      weights_(std::move(weights))
{
    if (static_cast<int>(control_points_.size()) != space_.dimension())
        throw Error(ErrorKind::DimensionMismatch,
                    "control point count does not match the spline space");
    if (!weights_.empty()) {
        if (weights_.size() != control_points_.size())
            throw Error(ErrorKind::DimensionMismatch, "weight count does not match control points");
        for (double w : weights_)
            if (!(w > 0.0))
                throw Error(ErrorKind::Geometry, "weights must be positive");
    }
}

void GeometryMap::eval_with_jacobian(double u, double v, Point& x, Eigen::Matrix2d& jac) const
{
    const BasisValues bu = eval_basis(space_.factor(0), u, 1);
    const BasisValues bv = eval_basis(space_.factor(1), v, 1);
    const int pu = space_.factor(0).degree();
    const int pv = space_.factor(1).degree();

    Point a = Point::Zero(), au = Point::Zero(), av = Point::Zero();
    double w = 0.0, wu = 0.0, wv = 0.0;
    for (int jj = 0; jj <= pv; ++jj) {
        for (int ii = 0; ii <= pu; ++ii) {
            const int k = space_.index(bu.first + ii, bv.first + jj);
            const double wk = weights_.empty() ? 1.0 : weights_[k];
            const double n = bu.values(0, ii) * bv.values(0, jj) * wk;
            const double nu = bu.values(1, ii) * bv.values(0, jj) * wk;
            const double nv = bu.values(0, ii) * bv.values(1, jj) * wk;
            a += n * control_points_[k];
            au += nu * control_points_[k];
            av += nv * control_points_[k];
            w += n;
            wu += nu;
            wv += nv;
        }
    }
    x = a / w;
    jac.col(0) = (au - x * wu) / w;
    jac.col(1) = (av - x * wv) / w;
}

Point GeometryMap::eval(double u, double v) const
{
    Point x;
    Eigen::Matrix2d j;
    eval_with_jacobian(u, v, x, j);
    return x;
}

Eigen::Matrix2d GeometryMap::jacobian(double u, double v) const
{
    Point x;
    Eigen::Matrix2d j;
    eval_with_jacobian(u, v, x, j);
    return j;
}

Point GeometryMap::corner(int c) const
{
    const int i = (c & 1) ? space_.size(0) - 1 : 0;
    const int j = (c & 2) ? space_.size(1) - 1 : 0;
    return control_points_[space_.index(i, j)];
}

std::array<double, 2> side_parameter(int side, double t)
{
    switch (side) {
    case 0: return {0.0, t};
    case 1: return {1.0, t};
    case 2: return {t, 0.0};
    default: return {t, 1.0};
    }
}

std::array<int, 2> side_corners(int side)
{
    switch (side) {
    case 0: return {0, 2};
    case 1: return {1, 3};
    case 2: return {0, 1};
    default: return {2, 3};
    }
}

std::array<double, 2> jacobian_determinant_range(const GeometryMap& g, int n)
{
    const QuadratureRule q = gauss_legendre(n);
    const auto bu = g.space().factor(0).breaks();
    const auto bv = g.space().factor(1).breaks();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t eu = 0; eu + 1 < bu.size(); ++eu)
        for (std::size_t ev = 0; ev + 1 < bv.size(); ++ev)
            for (double qu : q.nodes)
                for (double qv : q.nodes) {
                    const double u = bu[eu] + qu * (bu[eu + 1] - bu[eu]);
                    const double v = bv[ev] + qv * (bv[ev + 1] - bv[ev]);
                    const double d = g.jacobian(u, v).determinant();
                    lo = std::min(lo, d);
                    hi = std::max(hi, d);
                }
    return {lo, hi};
}

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int a)
    {
        while (parent[a] != a)
            a = parent[a] = parent[parent[a]];
        return a;
    }
    void unite(int a, int b)
    {
        a = find(a);
        b = find(b);
        if (a != b)
            parent[std::max(a, b)] = std::min(a, b);
    }
};

} // namespace

MultiPatch::MultiPatch(std::vector<GeometryMap> patches, double rel_tol)
    : patches_(std::move(patches))
{
    const int K = num_patches();
    if (K == 0)
        throw Error(ErrorKind::Geometry, "multipatch without patches");

    Point lo = patches_[0].control_points()[0], hi = lo;
    for (const auto& g : patches_)
        for (const auto& p : g.control_points()) {
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }
    diameter_ = (hi - lo).norm();
    tol_ = rel_tol * diameter_;

    for (int k = 0; k < K; ++k) {
        const auto [dmin, dmax] = jacobian_determinant_range(patches_[k]);
        if (!(dmin > 0.0) && !(dmax < 0.0)) {
            std::ostringstream os;
            os << "patch " << k << " has a Jacobian determinant without a single sign (range ["
               << dmin << ", " << dmax << "])";
            throw Error(ErrorKind::Geometry, os.str());
        }
    }

    // corner classes
    UnionFind uf(4 * K);
    for (int a = 0; a < 4 * K; ++a)
        for (int b = a + 1; b < 4 * K; ++b)
            if ((patches_[a / 4].corner(a % 4) - patches_[b / 4].corner(b % 4)).norm() <= tol_)
                uf.unite(a, b);
    corner_class_of_.assign(K, {-1, -1, -1, -1});
    std::vector<int> class_of_root(4 * K, -1);
    for (int a = 0; a < 4 * K; ++a) {
        const int r = uf.find(a);
        if (class_of_root[r] < 0) {
            class_of_root[r] = static_cast<int>(corner_classes_.size());
            corner_classes_.emplace_back();
        }
        corner_classes_[class_of_root[r]].push_back({a / 4, a % 4});
        corner_class_of_[a / 4][a % 4] = class_of_root[r];
    }

    // interfaces by end point coincidence, verified by curve sampling
    side_interface_.assign(K, {-1, -1, -1, -1});
    constexpr int n_samples = 20;
    for (int a = 0; a < 4 * K; ++a) {
        const int pa = a / 4, sa = a % 4;
        const auto ca = side_corners(sa);
        const int a0 = corner_class_of_[pa][ca[0]], a1 = corner_class_of_[pa][ca[1]];
        if (a0 == a1)
            continue;
        for (int b = a + 1; b < 4 * K; ++b) {
            const int pb = b / 4, sb = b % 4;
            if (pb == pa)
                continue;
            const auto cb = side_corners(sb);
            const int b0 = corner_class_of_[pb][cb[0]], b1 = corner_class_of_[pb][cb[1]];
            bool reversed;
            if (a0 == b0 && a1 == b1)
                reversed = false;
            else if (a0 == b1 && a1 == b0)
                reversed = true;
            else
                continue;
            for (int i = 0; i < n_samples; ++i) {
                const double t = (i + 0.5) / n_samples;
                const auto xa = side_parameter(sa, t);
                const auto xb = side_parameter(sb, reversed ? 1.0 - t : t);
                const double gap = (patches_[pa].eval(xa[0], xa[1]) -
                                    patches_[pb].eval(xb[0], xb[1])).norm();
                if (gap > tol_) {
                    std::ostringstream os;
                    os << "patch " << pa << " side " << sa << " and patch " << pb << " side "
                       << sb << " share end points but differ by " << gap;
                    throw Error(ErrorKind::NonMatchingInterface, os.str());
                }
            }
            if (side_interface_[pa][sa] >= 0 || side_interface_[pb][sb] >= 0) {
                std::ostringstream os;
                os << "patch " << pa << " side " << sa << " matches more than one side";
                throw Error(ErrorKind::NonMatchingInterface, os.str());
            }
            side_interface_[pa][sa] = side_interface_[pb][sb] =
                static_cast<int>(interfaces_.size());
            interfaces_.push_back({pa, sa, pb, sb, reversed});
        }
    }

    vertex_boundary_.assign(corner_classes_.size(), false);
    for (int k = 0; k < K; ++k)
        for (int s = 0; s < 4; ++s)
            if (side_interface_[k][s] < 0) {
                boundary_.push_back({k, s});
                for (int c : side_corners(s))
                    vertex_boundary_[corner_class_of_[k][c]] = true;
            }
}

MultiPatch unit_square(int n)
{
    if (n < 1)
        throw Error(ErrorKind::Geometry, "unit square needs n >= 1");
    std::vector<GeometryMap> patches;
    const TensorSplineSpace lin(make_space(1, 0, 0), make_space(1, 0, 0));
    const double h = 1.0 / n;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            std::vector<Point> cps = {{i * h, j * h}, {(i + 1) * h, j * h},
                                      {i * h, (j + 1) * h}, {(i + 1) * h, (j + 1) * h}};
            patches.emplace_back(lin, std::move(cps));
        }
    return MultiPatch(std::move(patches));
}

MultiPatch quarter_annulus(int n_r, int n_t, double r_in, double r_out)
{
    if (n_r < 1 || n_t < 1)
        throw Error(ErrorKind::Geometry, "quarter annulus needs n_r, n_t >= 1");
    if (!(r_in > 0.0) || !(r_out > r_in))
        throw Error(ErrorKind::Geometry, "quarter annulus needs 0 < r_in < r_out");
    const TensorSplineSpace space(make_space(1, 0, 0), make_space(2, 0, 0));
    const double dtheta = 0.5 * std::numbers::pi / n_t;
    const double wmid = std::cos(0.5 * dtheta);
    std::vector<GeometryMap> patches;
    for (int j = 0; j < n_t; ++j)
        for (int i = 0; i < n_r; ++i) {
            const double r0 = r_in + (r_out - r_in) * i / n_r;
            const double r1 = r_in + (r_out - r_in) * (i + 1) / n_r;
            const double ta = j * dtheta, tb = (j + 1) * dtheta, tm = 0.5 * (ta + tb);
            std::vector<Point> cps;
            std::vector<double> w;
            for (int a = 0; a < 3; ++a) {
                const double th = a == 0 ? ta : (a == 1 ? tm : tb);
                const double scale = a == 1 ? 1.0 / wmid : 1.0;
                for (double r : {r0, r1}) {
                    cps.emplace_back(r * scale * std::cos(th), r * scale * std::sin(th));
                    w.push_back(a == 1 ? wmid : 1.0);
                }
            }
            patches.emplace_back(space, std::move(cps), std::move(w));
        }
    return MultiPatch(std::move(patches));
}

namespace {

std::vector<double> read_numbers(std::istringstream& is)
{
    std::vector<double> out;
    std::string tok;
    while (is >> tok) {
        if (!tok.empty() && tok[0] == '#')
            break;
        std::size_t used = 0;
        double val = 0.0;
        try {
            val = std::stod(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != tok.size())
            throw Error(ErrorKind::Parse, "not a number: '" + tok + "'");
        out.push_back(val);
    }
    return out;
}

} // namespace

MultiPatch parse_multipatch(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    auto fail = [&](const std::string& msg) {
        std::ostringstream os;
        os << "line " << line_no << ": " << msg;
        throw Error(ErrorKind::Parse, os.str());
    };
    auto next_line = [&](std::string& out) {
        while (std::getline(in, out)) {
            ++line_no;
            const auto pos = out.find_first_not_of(" \t\r");
            if (pos == std::string::npos || out[pos] == '#')
                continue;
            return true;
        }
        return false;
    };

    if (!next_line(line) || line.rfind("MULTIPATCH v1", 0) != 0)
        fail("expected header 'MULTIPATCH v1'");

    std::vector<GeometryMap> patches;
    while (next_line(line)) {
        std::istringstream hs(line);
        std::string kw, deg_kw, dim_kw, flag;
        int id = 0, pu = 0, pv = 0, nu = 0, nv = 0;
        hs >> kw;
        if (kw != "PATCH")
            fail("expected PATCH, got '" + kw + "'");
        if (!(hs >> id >> deg_kw >> pu >> pv >> dim_kw >> nu >> nv) || deg_kw != "DEG" ||
            dim_kw != "DIM")
            fail("malformed PATCH line");
        const bool rational = static_cast<bool>(hs >> flag) && flag == "RATIONAL";
        if (id != static_cast<int>(patches.size()))
            fail("patch ids must be consecutive from 0");
        if (nu < 1 || nv < 1 || nu > 1000000 || nv > 1000000)
            fail("invalid DIM");

        std::array<std::vector<double>, 2> knots;
        for (int d = 0; d < 2; ++d) {
            if (!next_line(line))
                fail("missing knot line");
            std::istringstream ks(line);
            std::string kkw;
            ks >> kkw;
            if (kkw != (d == 0 ? "KNOTS_U" : "KNOTS_V"))
                fail("expected " + std::string(d == 0 ? "KNOTS_U" : "KNOTS_V"));
            knots[d] = read_numbers(ks);
        }
        std::vector<Point> cps;
        std::vector<double> w;
        for (int k = 0; k < nu * nv; ++k) {
            if (!next_line(line))
                fail("missing CP line");
            std::istringstream cs(line);
            std::string ckw;
            cs >> ckw;
            if (ckw != "CP")
                fail("expected CP");
            const auto vals = read_numbers(cs);
            if (vals.size() != (rational ? 3u : 2u))
                fail("CP needs " + std::string(rational ? "x y w" : "x y"));
            cps.emplace_back(vals[0], vals[1]);
            if (rational)
                w.push_back(vals[2]);
        }
        try {
            TensorSplineSpace space(KnotVector(pu, knots[0]), KnotVector(pv, knots[1]));
            if (space.size(0) != nu || space.size(1) != nv)
                fail("DIM does not match the knot vectors");
            patches.emplace_back(std::move(space), std::move(cps), std::move(w));
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::Parse)
                throw;
            fail(e.what());
        }
    }
    return MultiPatch(std::move(patches));
}

MultiPatch load_multipatch(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::Io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_multipatch(ss.str());
}

std::string format_multipatch(const MultiPatch& mp)
{
    std::ostringstream os;
    os << std::setprecision(17);
    os << "MULTIPATCH v1\n";
    for (int k = 0; k < mp.num_patches(); ++k) {
        const auto& g = mp.patch(k);
        const auto& s = g.space();
        os << "PATCH " << k << " DEG " << s.factor(0).degree() << ' ' << s.factor(1).degree()
           << " DIM " << s.size(0) << ' ' << s.size(1) << (g.rational() ? " RATIONAL" : "")
           << '\n';
        for (int d = 0; d < 2; ++d) {
            os << (d == 0 ? "KNOTS_U" : "KNOTS_V");
            for (double t : s.factor(d).knots())
                os << ' ' << t;
            os << '\n';
        }
        for (std::size_t i = 0; i < g.control_points().size(); ++i) {
            os << "CP " << g.control_points()[i].x() << ' ' << g.control_points()[i].y();
            if (g.rational())
                os << ' ' << g.weights()[i];
            os << '\n';
        }
    }
    return os.str();
}

void save_multipatch(const MultiPatch& mp, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw Error(ErrorKind::Io, "cannot write " + path.string());
    out << format_multipatch(mp);
}

ElementLayout initial_refinement(const MultiPatch& mp, std::vector<std::array<int, 2>> rules)
{
    if (static_cast<int>(rules.size()) != mp.num_patches())
        throw Error(ErrorKind::DimensionMismatch, "one refinement rule per patch required");
    for (const auto& r : rules)
        if (r[0] < 1 || r[1] < 1)
            throw Error(ErrorKind::Conformity, "element counts must be >= 1");
    for (const auto& ifc : mp.interfaces()) {
        const int na = rules[ifc.patch_a][side_direction(ifc.side_a)];
        const int nb = rules[ifc.patch_b][side_direction(ifc.side_b)];
        if (na != nb) {
            std::ostringstream os;
            os << "patch " << ifc.patch_a << " side " << ifc.side_a << " has " << na
               << " elements but patch " << ifc.patch_b << " side " << ifc.side_b << " has "
               << nb;
            throw Error(ErrorKind::Conformity, os.str());
        }
    }
    return ElementLayout{std::move(rules)};
}

ElementLayout layout_from_geometry(const MultiPatch& mp)
{
    std::vector<std::array<int, 2>> rules;
    for (const auto& g : mp.patches()) {
        std::array<int, 2> r{};
        for (int d = 0; d < 2; ++d) {
            // uniform spans only; otherwise fall back to one element
            const auto br = g.space().factor(d).breaks();
            const int n = static_cast<int>(br.size()) - 1;
            bool uniform = true;
            for (int i = 0; i <= n; ++i)
                uniform = uniform && std::abs(br[i] - static_cast<double>(i) / n) < 1e-12;
            r[d] = uniform ? n : 1;
        }
        rules.push_back(r);
    }
    return initial_refinement(mp, std::move(rules));
}

ElementLayout uniform_layout(const MultiPatch& mp)
{
    return ElementLayout{std::vector<std::array<int, 2>>(mp.num_patches(), {1, 1})};
}

} // namespace ieti
