#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "nfrbf/delaunay.hpp"
#include "nfrbf/error.hpp"
#include "nfrbf/geometry.hpp"
#include "nfrbf/rbf.hpp"

using namespace nfrbf;

namespace {

std::vector<Vec3> stencil_points(const PlanarMesh& mesh, const Stencil& s) {
    std::vector<Vec3> pts;
    for (int i : s.nodes) pts.push_back(mesh.nodes.points[i]);
    return pts;
}

// random point inside triangle t
Vec2 sample_in(const PlanarMesh& mesh, int t, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double a = u(rng), b = u(rng);
    if (a + b > 1.0) a = 1.0 - a, b = 1.0 - b;
    const auto& tri = mesh.triangles[t];
    const Vec2 p0 = mesh.nodes.xy(tri[0]);
    return p0 + a * (mesh.nodes.xy(tri[1]) - p0) + b * (mesh.nodes.xy(tri[2]) - p0);
}

double poly_test(const Vec2& x) { return 0.3 - 1.2 * x.x() + 0.7 * x.y() + 2.0 * x.x() * x.y() - x.y() * x.y(); }

}  // namespace

TEST_CASE("phs values and gradient") {
    CHECK(phs_eval(3, 2.0) == 8.0);
    CHECK(phs_eval(2, 1.0) == 0.0);
    CHECK(phs_eval(3, 0.0) == 0.0);
    CHECK(phs_eval(2, 0.0) == 0.0);
    CHECK(phs_eval(4, 2.0) == doctest::Approx(16.0 * std::log(2.0)).epsilon(1e-15));
    CHECK(phs_grad(3, Vec3(1, 2, 0), Vec3(1, 2, 0)).norm() == 0.0);

    // central differences
    const Vec3 x(0.3, -0.2, 0.0), y(-0.1, 0.4, 0.0);
    for (int order : {1, 2, 3, 4, 5}) {
        const Vec3 g = phs_grad(order, x, y);
        const double e = 1e-6;
        for (int a = 0; a < 2; ++a) {
            Vec3 dx = Vec3::Zero();
            dx[a] = e;
            const double fd = (phs_eval(order, (x + dx - y).norm()) - phs_eval(order, (x - dx - y).norm())) / (2 * e);
            CHECK(g[a] == doctest::Approx(fd).epsilon(1e-7));
        }
    }
}

TEST_CASE("polynomial space and compatibility") {
    CHECK(poly_count(0, 2) == 1);
    CHECK(poly_count(2, 2) == 6);
    CHECK(poly_count(4, 2) == 15);
    CHECK(poly_count(3, 3) == 20);
    for (int deg = 0; deg <= 5; ++deg) {
        const PolySpec p = PolySpec::make(deg, 2);
        CHECK(p.count() == poly_count(deg, 2));
        for (const auto& a : p.multi_indices) CHECK(a[0] + a[1] <= deg);
    }
    CHECK(PolySpec::make(2, 2).multi_indices.front() == std::array<int, 3>{0, 0, 0});
    CHECK_THROWS_AS(check_compatibility({3}, PolySpec::make(0, 2), 21), InvalidInput);
    CHECK_NOTHROW(check_compatibility({3}, PolySpec::make(1, 2), 21));
    CHECK_THROWS_AS(check_compatibility({3}, PolySpec::make(4, 2), 14), InvalidInput);
    CHECK_THROWS_AS(check_compatibility({0}, PolySpec::make(2, 2), 21), InvalidInput);
}

TEST_CASE("stencil selection") {
    const NodeSet nodes = gen_nodes_square({SquareNodeKind::repulsion, 400, 11, false});
    const PlanarMesh mesh = delaunay(nodes);
    const int n = static_cast<int>(nodes.size());

    SUBCASE("k = n gives every node") {
        const auto st = build_stencils(mesh, n);
        for (std::size_t t = 0; t < st.size(); t += 97) {
            auto idx = st[t].nodes;
            std::sort(idx.begin(), idx.end());
            std::vector<int> all(n);
            std::iota(all.begin(), all.end(), 0);
            CHECK(idx == all);
        }
        CHECK_THROWS_AS(build_stencils(mesh, n + 1), InvalidInput);
    }
    SUBCASE("vertices belong to their element's stencil and order matches brute force") {
        const auto st = build_stencils(mesh, 21);
        for (std::size_t t = 0; t < st.size(); ++t) {
            const auto& tri = mesh.triangles[t];
            for (int v : tri) CHECK(std::find(st[t].nodes.begin(), st[t].nodes.end(), v) != st[t].nodes.end());
            const Vec3 c = (nodes.points[tri[0]] + nodes.points[tri[1]] + nodes.points[tri[2]]) / 3.0;
            std::vector<int> order(n);
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
                return (nodes.points[a] - c).squaredNorm() < (nodes.points[b] - c).squaredNorm();
            });
            order.resize(21);
            CHECK(order == st[t].nodes);
        }
    }
    SUBCASE("equidistant ties go to the lower index") {
        NodeSet sq;
        for (const Vec3& p : {Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(-1, 0, 0), Vec3(0, -1, 0), Vec3(3, 3, 0)}) {
            sq.points.push_back(p);
            sq.boundary.push_back(false);
        }
        const KdTree tree(sq.points, 2);
        CHECK(make_stencil(0, Vec3::Zero(), tree, 2).nodes == std::vector<int>{0, 1});
        CHECK(make_stencil(0, Vec3::Zero(), tree, 4).nodes == std::vector<int>{0, 1, 2, 3});
    }
}

TEST_CASE("saddle system structure") {
    const NodeSet nodes = gen_nodes_square({SquareNodeKind::repulsion, 300, 5, false});
    const PlanarMesh mesh = delaunay(nodes);
    const auto st = build_stencils(mesh, 21);
    const auto pts = stencil_points(mesh, st[10]);

    const SaddleSystem sys(pts, 2, {3}, PolySpec::make(2, 2));
    const Eigen::MatrixXd& m = sys.matrix();
    CHECK((m - m.transpose()).norm() == 0.0);
    CHECK(sys.rbf_block().diagonal().norm() == 0.0);
    CHECK(m.bottomRightCorner(sys.p(), sys.p()).norm() == 0.0);
    CHECK(sys.condition() < 1e12);
    // local frame: centroid origin, unit radius
    double rmax = 0.0;
    Vec3 mean = Vec3::Zero();
    for (const auto& l : sys.local_points()) {
        rmax = std::max(rmax, l.norm());
        mean += l;
    }
    CHECK(rmax == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(mean.norm() < 1e-13);

    const SaddleSystem sys0(pts, 2, {1}, PolySpec::make(0, 2));
    CHECK((sys0.poly_block().array() == 1.0).all());

    std::vector<Vec3> line;
    for (int i = 0; i < 12; ++i) line.push_back(Vec3(0.1 * i, 0.05 * i, 0.0));
    CHECK_THROWS_AS(SaddleSystem(line, 2, {3}, PolySpec::make(1, 2), 42), NumericalError);
    try {
        SaddleSystem(line, 2, {3}, PolySpec::make(1, 2), 42);
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("element 42") != std::string::npos);
    }
}

TEST_CASE("local fits: interpolation, moments, reproduction") {
    const NodeSet nodes = gen_nodes_square({SquareNodeKind::repulsion, 800, 9, false});
    const PlanarMesh mesh = delaunay(nodes);
    std::mt19937_64 rng(17);
    std::normal_distribution<double> gauss;
    for (int deg : {1, 2, 3, 4}) {
        const int k = deg == 4 ? 32 : 21;
        const auto st = build_stencils(mesh, k);
        const PolySpec poly = PolySpec::make(deg, 2);
        for (std::size_t t = 0; t < st.size(); t += 23) {
            const auto pts = stencil_points(mesh, st[t]);
            const SaddleSystem sys(pts, 2, {3}, poly, st[t].origin, st[t].scale, static_cast<int>(t));

            const LocalInterpolant zero = fit_local(sys, Eigen::VectorXd::Zero(k));
            CHECK(zero.c.norm() == 0.0);
            CHECK(zero.d.norm() == 0.0);

            Eigen::VectorXd f(k);
            for (int i = 0; i < k; ++i) f[i] = gauss(rng);
            const LocalInterpolant s = fit_local(sys, f);
            double interp = 0.0;
            for (int i = 0; i < k; ++i) interp = std::max(interp, std::abs(s.eval(pts[i]) - f[i]));
            CHECK(interp <= 1e-10 * (1.0 + f.cwiseAbs().maxCoeff()));
            CHECK((sys.poly_block().transpose() * s.c).norm() <= 1e-10 * s.c.norm());
            Eigen::VectorXd sol(k + sys.p());
            sol << s.c, s.d;
            Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + sys.p());
            rhs.head(k) = f;
            CHECK((sys.matrix() * sol - rhs).norm() <= 1e-12 * f.norm());

            // every monomial of degree <= deg is reproduced in the element
            for (const auto& alpha : poly.multi_indices) {
                Eigen::VectorXd pv(k);
                auto mono = [&](const Vec2& x) { return std::pow(x.x(), alpha[0]) * std::pow(x.y(), alpha[1]); };
                for (int i = 0; i < k; ++i) pv[i] = mono(pts[i].head<2>());
                const LocalInterpolant sp = fit_local(sys, pv);
                for (int q = 0; q < 5; ++q) {
                    const Vec2 x = sample_in(mesh, static_cast<int>(t), rng);
                    CHECK(std::abs(sp.eval(Vec3(x.x(), x.y(), 0)) - mono(x)) <= 1e-10 * (1.0 + std::abs(mono(x))));
                }
            }
        }
    }
    CHECK_THROWS_AS(fit_local(SaddleSystem(stencil_points(mesh, build_stencils(mesh, 21)[0]), 2, {3},
                                           PolySpec::make(2, 2)),
                              Eigen::VectorXd::Zero(5)),
                    InvalidInput);
}

TEST_CASE("local fit gradient matches finite differences") {
    const NodeSet nodes = gen_nodes_square({SquareNodeKind::repulsion, 500, 2, false});
    const PlanarMesh mesh = delaunay(nodes);
    const auto st = build_stencils(mesh, 21);
    const auto pts = stencil_points(mesh, st[40]);
    const SaddleSystem sys(pts, 2, {3}, PolySpec::make(2, 2), st[40].origin, st[40].scale);
    Eigen::VectorXd f(21);
    for (int i = 0; i < 21; ++i) f[i] = std::sin(3 * pts[i].x()) * std::cos(2 * pts[i].y());
    const LocalInterpolant s = fit_local(sys, f);
    const Vec3 x = st[40].origin + Vec3(0.01, -0.005, 0);
    const Vec3 g = s.grad(x);
    const double e = 1e-6;
    CHECK(g.x() == doctest::Approx((s.eval(x + Vec3(e, 0, 0)) - s.eval(x - Vec3(e, 0, 0))) / (2 * e)).epsilon(1e-6));
    CHECK(g.y() == doctest::Approx((s.eval(x + Vec3(0, e, 0)) - s.eval(x - Vec3(0, e, 0))) / (2 * e)).epsilon(1e-6));
}

TEST_CASE("local interpolation error decays at least at rate deg") {
    auto f = [](const Vec3& x) { return std::exp(x.x() - 0.5 * x.y()) * std::sin(2.0 * x.y()); };
    for (int deg : {2, 3}) {
        std::vector<double> hs, errs;
        for (int n : {500, 2000, 8000}) {
            const NodeSet nodes = gen_nodes_square({SquareNodeKind::repulsion, n, 4, false});
            const PlanarMesh mesh = delaunay(nodes);
            const auto st = build_stencils(mesh, 21);
            std::mt19937_64 rng(3);
            double err = 0.0;
            for (std::size_t t = 0; t < st.size(); t += 7) {
                const auto pts = stencil_points(mesh, st[t]);
                const SaddleSystem sys(pts, 2, {3}, PolySpec::make(deg, 2), st[t].origin, st[t].scale);
                Eigen::VectorXd v(21);
                for (int i = 0; i < 21; ++i) v[i] = f(pts[i]);
                const LocalInterpolant s = fit_local(sys, v);
                const Vec2 x = sample_in(mesh, static_cast<int>(t), rng);
                const Vec3 x3(x.x(), x.y(), 0.0);
                err = std::max(err, std::abs(s.eval(x3) - f(x3)));
            }
            hs.push_back(covering_radius(mesh));
            errs.push_back(err);
        }
        const double slope = std::log(errs.front() / errs.back()) / std::log(hs.front() / hs.back());
        MESSAGE("deg " << deg << " interpolation slope " << slope);
        CHECK(slope >= deg);
    }
}

TEST_CASE("projector and Lagrange basis") {
    const NodeSet nodes = gen_nodes_square({SquareNodeKind::repulsion, 200, 8, false});
    const PlanarMesh mesh = delaunay(nodes);
    const Projector proj(mesh, {{3}, 2, 21});
    const int n = static_cast<int>(nodes.size());
    Eigen::VectorXd f(n), p(n);
    for (int i = 0; i < n; ++i) {
        f[i] = std::cos(4 * nodes.points[i].x()) + nodes.points[i].y();
        p[i] = poly_test(nodes.xy(i));
    }
    for (int i = 0; i < n; i += 13) CHECK(proj.eval(f, nodes.xy(i)) == doctest::Approx(f[i]).epsilon(1e-12));

    // values on a shared edge agree when evaluated from either side
    std::mt19937_64 rng(1);
    for (std::size_t t = 0; t < mesh.triangles.size(); t += 17) {
        const auto& tri = mesh.triangles[t];
        const Vec2 a = nodes.xy(tri[0]), b = nodes.xy(tri[1]);
        const Vec2 mid = 0.37 * a + 0.63 * b;
        const Vec2 inward = (nodes.xy(tri[2]) - mid) * 1e-9;
        if (proj.locate(mid - inward).first < 0) continue;  // hull edge
        const double inside = proj.eval(f, mid + inward);
        const double across = proj.eval(f, mid - inward);
        CHECK(inside == doctest::Approx(across).epsilon(1e-7));
    }
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int q = 0; q < 40; ++q) {
        const Vec2 x(u(rng), u(rng));
        CHECK(proj.eval(p, x) == doctest::Approx(poly_test(x)).epsilon(1e-9));
    }
    for (int q = 0; q < 5; ++q) {
        const Vec2 x(u(rng), u(rng));
        double sum = 0.0;
        for (int j = 0; j < n; ++j) sum += proj.lagrange(j, x);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
    for (int j = 0; j < n; j += 37)
        for (int i = 0; i < n; i += 11) CHECK(proj.lagrange(j, nodes.xy(i)) == doctest::Approx(i == j ? 1.0 : 0.0).scale(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(proj.eval(f, Vec2(1.5, 0.5)), InvalidInput);
    CHECK_THROWS_AS(proj.lagrange(n, Vec2(0.5, 0.5)), InvalidInput);
}
