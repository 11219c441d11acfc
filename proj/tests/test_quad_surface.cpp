#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>

#include "doctest.h"
#include "nfrbf/delaunay.hpp"
#include "nfrbf/error.hpp"
#include "nfrbf/geometry.hpp"
#include "nfrbf/quad_surface.hpp"

using namespace nfrbf;
constexpr double kPi = std::numbers::pi;

namespace {

// point where the line from the apex through the plane point meets the unit sphere
Vec3 sphere_map(const ElementFrame& f, const Vec2& xi) {
    const Vec3 q = f.from_plane(xi), d = q - f.projection;
    const double a = d.dot(d), b = 2 * f.projection.dot(d), c = f.projection.dot(f.projection) - 1;
    return f.projection + (-b + std::sqrt(b * b - 4 * a * c)) / (2 * a) * d;
}

SurfaceMesh flat_surface(const PlanarMesh& pm) {
    SurfaceMesh m;
    m.nodes = pm.nodes;
    m.nodes.dim = 3;
    m.triangles = pm.triangles;
    build_adjacency(m);
    for (std::size_t t = 0; t < m.triangles.size(); ++t) m.normals.push_back(Vec3::UnitZ());
    return m;
}

}  // namespace

TEST_CASE("consistent normals") {
    SurfaceMesh s = gen_sphere_icosahedral(3);
    std::swap(s.triangles[7][1], s.triangles[7][2]);
    const auto before = s.triangles;
    consistent_normals(s);
    for (std::size_t t = 0; t < s.triangles.size(); ++t) CHECK(s.normals[t].dot(s.centroid(t)) > 0.0);
    CHECK(signed_volume(s) > 0.0);

    SurfaceMesh torus = gen_nodes_torus_spiral(2048);
    for (auto& tri : torus.triangles) std::swap(tri[1], tri[2]);
    consistent_normals(torus);
    // 2 pi^2 R r^2 with R = 3, r = 1
    CHECK(signed_volume(torus) == doctest::Approx(2 * kPi * kPi * 3).epsilon(0.02));
}

TEST_CASE("projection points") {
    SUBCASE("icosahedron: every apex is the centre") {
        const SurfaceMesh s = gen_sphere_icosahedral(0);
        for (int t = 0; t < 20; ++t) {
            const ElementFrame f = element_frame(s, t, 1.0);
            CHECK(f.central);
            CHECK(f.projection.norm() < 1e-12);
            for (int v : s.triangles[t]) CHECK(std::abs(f.normal.dot(s.nodes.points[v] - f.origin)) < 1e-12);
        }
    }
    SUBCASE("flat neighbourhood falls back to orthogonal projection") {
        const SurfaceMesh m = flat_surface(delaunay(gen_nodes_square({SquareNodeKind::repulsion, 200, 1, false})));
        for (int t = 0; t < static_cast<int>(m.triangles.size()); t += 11) {
            const ElementFrame f = element_frame(m, t, 0.1);
            CHECK_FALSE(f.central);
            const Vec3 x(0.3, 0.7, 0.0);
            CHECK((f.from_plane(*node_preimage(f, x)) - x).norm() < 1e-14);
        }
    }
    SUBCASE("no fallbacks on smooth torus meshes") {
        for (int n : {1024, 4096}) {
            const SurfaceMesh m = gen_nodes_torus_spiral(n);
            const double h = covering_radius(m);
            for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t) CHECK(element_frame(m, t, h).central);
        }
    }
    SUBCASE("each cutting plane contains its shared edge") {
        const SurfaceMesh m = gen_nodes_torus_spiral(1024);
        const double h = covering_radius(m);
        for (int t = 0; t < static_cast<int>(m.triangles.size()); t += 5) {
            const ElementFrame f = element_frame(m, t, h);
            const auto& tri = m.triangles[t];
            for (int r = 0; r < 3; ++r) {
                const Vec3 dn = m.normals[t] - m.normals[m.adjacency[t][r]];
                const Vec3 a = m.nodes.points[tri[r]], b = m.nodes.points[tri[(r + 1) % 3]];
                const double scale = dn.norm() * (f.projection - a).norm();
                CHECK(std::abs(dn.dot(f.projection - a)) <= 1e-10 * scale);
                CHECK(std::abs(dn.dot(f.projection - b)) <= 1e-10 * scale);
            }
        }
    }
}

TEST_CASE("pre-images") {
    const SurfaceMesh s = gen_sphere_icosahedral(0);
    const ElementFrame f = element_frame(s, 3, 1.0);
    for (int v : s.triangles[3]) {
        const Vec3 x = s.nodes.points[v];
        CHECK((f.from_plane(*node_preimage(f, x)) - x).norm() < 1e-14);
    }
    // p = 0: xi = x d / (x . n)
    const double d = f.normal.dot(f.origin);
    const Vec3 x = Vec3(0.3, -0.2, 0.9).normalized();
    if (x.dot(f.normal) > 0.0) {
        const Vec3 expect = x * (d / x.dot(f.normal));
        CHECK((f.from_plane(*node_preimage(f, x)) - expect).norm() < 1e-14);
    }
    CHECK_FALSE(node_preimage(f, -f.normal).has_value());

    // two elements sharing an edge project an edge node onto the same cutting plane
    const SurfaceMesh m = gen_nodes_torus_spiral(1024);
    const double h = covering_radius(m);
    for (int t = 0; t < 60; ++t) {
        const int u = m.adjacency[t][0];
        const ElementFrame ft = element_frame(m, t, h), fu = element_frame(m, u, h);
        const Vec3 a = m.nodes.points[m.triangles[t][0]];
        const Vec3 dn = m.normals[t] - m.normals[u];
        CHECK(std::abs(dn.dot(ft.from_plane(*node_preimage(ft, a)) - a)) < 1e-10);
        CHECK(std::abs(dn.dot(fu.from_plane(*node_preimage(fu, a)) - a)) < 1e-10);
    }
}

TEST_CASE("Jacobians") {
    SUBCASE("flat surface gives J = 1 and the flat rule") {
        const PlanarMesh pm = delaunay(gen_nodes_square({SquareNodeKind::repulsion, 500, 6, false}));
        const SurfaceMesh m = flat_surface(pm);
        SurfaceDiagnostics diag;
        const RbfParams params{{3}, 2, 21};
        const QuadratureRule surf = assemble_surface_rule(m, params, &diag);
        const QuadratureRule flat = assemble_rule(pm, params);
        for (double j : diag.min_jacobian) CHECK(j == doctest::Approx(1.0).epsilon(1e-10));
        double worst = 0.0;
        for (std::size_t i = 0; i < flat.size(); ++i) worst = std::max(worst, std::abs(surf.weights[i] - flat.weights[i]));
        CHECK(worst <= 1e-12 * flat.sum());
        CHECK(diag.fallback_count() == static_cast<int>(m.triangles.size()));
    }
    SUBCASE("sphere: matches the exact projection Jacobian at rate deg") {
        for (int deg : {2, 3}) {
            std::vector<double> errs, hs;
            for (int freq : {20, 40}) {
                const SurfaceMesh m = gen_sphere_geodesic(freq);
                const KdTree tree(m.nodes.points, 3);
                const double h = covering_radius(m);
                double worst = 0.0;
                for (int t = 0; t < static_cast<int>(m.triangles.size()); t += 53) {
                    const SurfaceElement el = surface_element(m, tree, t, {{3}, deg, 21}, h);
                    for (int r = 0; r < 3; ++r) {
                        const double e = 1e-6;
                        const Vec2 xi = el.preimages[r];
                        const Vec3 d1 = (sphere_map(el.frame, xi + Vec2(e, 0)) - sphere_map(el.frame, xi - Vec2(e, 0))) / (2 * e);
                        const Vec3 d2 = (sphere_map(el.frame, xi + Vec2(0, e)) - sphere_map(el.frame, xi - Vec2(0, e))) / (2 * e);
                        worst = std::max(worst, std::abs(el.jacobians[r] - d1.cross(d2).norm()));
                    }
                }
                errs.push_back(worst);
                hs.push_back(h);
            }
            const double slope = std::log(errs[0] / errs[1]) / std::log(hs[0] / hs[1]);
            MESSAGE("deg " << deg << " Jacobian slope " << slope);
            CHECK(slope >= deg - 0.25);
        }
    }
    SUBCASE("torus: outer equator weights exceed inner ones") {
        const SurfaceMesh m = gen_nodes_torus_spiral(2048);
        const QuadratureRule rule = assemble_surface_rule(m, {{3}, 2, 21});
        double outer = 0.0, inner = 1e300;
        for (std::size_t i = 0; i < m.nodes.size(); ++i) {
            const double r = m.nodes.points[i].head<2>().norm();
            if (r > 3.9) outer = std::max(outer, rule.weights[i]);
            if (r < 2.1) inner = std::min(inner, rule.weights[i]);
        }
        CHECK(outer > inner);
    }
}

TEST_CASE("surface rules") {
    SUBCASE("sphere integrals") {
        const SurfaceMesh m = gen_sphere_icosahedral(4);
        SurfaceDiagnostics diag;
        const QuadratureRule rule = assemble_surface_rule(m, {{3}, 3, 21}, &diag);
        CHECK(rule.domain == "surface");
        CHECK(rule.domain_measure == doctest::Approx(4 * kPi).epsilon(1e-4));
        std::vector<double> f(m.nodes.size());
        for (std::size_t i = 0; i < f.size(); ++i) {
            const Vec3& x = m.nodes.points[i];
            f[i] = std::pow(x.x(), 3) * x.y() * x.y() * std::pow(x.z(), 4) + 5.0;
        }
        CHECK(apply_rule(rule, f) == doctest::Approx(20 * kPi).epsilon(1e-4));
        CHECK(diag.fallback_count() == 0);
    }
    SUBCASE("torus weights are constant along rings of constant theta") {
        const SurfaceMesh m = gen_nodes_torus_spiral(1024);
        const QuadratureRule rule = assemble_surface_rule(m, {{3}, 2, 21});
        std::map<long long, std::pair<double, double>> rings;
        for (std::size_t i = 0; i < m.nodes.size(); ++i) {
            const auto [phi, theta] = torus_unmap(m.nodes.points[i]);
            auto [it, fresh] = rings.try_emplace(std::llround(theta * 1e8), rule.weights[i], rule.weights[i]);
            it->second.first = std::min(it->second.first, rule.weights[i]);
            it->second.second = std::max(it->second.second, rule.weights[i]);
        }
        CHECK(rings.size() < m.nodes.size() / 8);
        for (const auto& [key, mm] : rings) CHECK((mm.second - mm.first) <= 1e-10 * mm.second);
    }
    SUBCASE("torus sin test function converges to 12 pi^2") {
        double prev = 1e300;
        for (int n : {1024, 4096}) {
            const SurfaceMesh m = gen_nodes_torus_spiral(n);
            const QuadratureRule rule = assemble_surface_rule(m, {{3}, 3, 21});
            std::vector<double> f(m.nodes.size());
            for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::sin(7 * m.nodes.points[i].x()) + 1.0;
            const double err = std::abs(apply_rule(rule, f) - 12 * kPi * kPi);
            CHECK(err < prev / 8);
            prev = err;
        }
    }
    SUBCASE("diagnostics file") {
        const SurfaceMesh m = gen_sphere_icosahedral(2);
        SurfaceDiagnostics diag;
        assemble_surface_rule(m, {{3}, 2, 21}, &diag);
        const auto path = std::filesystem::temp_directory_path() / "nfrbf_surface_diag.csv";
        write_surface_diagnostics(path, diag);
        std::ifstream is(path);
        std::string header;
        std::getline(is, header);
        CHECK(header == "element,fallback,projection_condition,saddle_condition,min_jacobian,negative_weights,dropped");
        int rows = 0;
        for (std::string line; std::getline(is, line);) ++rows;
        CHECK(rows == static_cast<int>(m.triangles.size()));
        std::filesystem::remove(path);
    }
    SUBCASE("bad input") {
        SurfaceMesh m = gen_sphere_icosahedral(1);
        m.normals.clear();
        CHECK_THROWS_AS(assemble_surface_rule(m, {{3}, 2, 21}), InvalidInput);
        CHECK_THROWS_AS(assemble_surface_rule(gen_sphere_icosahedral(1), {{3}, 2, 500}), InvalidInput);
    }
}
