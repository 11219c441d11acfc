#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <fstream>
#include <random>

#include "doctest.h"
#include "nfrbf/delaunay.hpp"
#include "nfrbf/error.hpp"
#include "nfrbf/geodesic.hpp"
#include "nfrbf/geometry.hpp"
#include "nfrbf/kdtree.hpp"
#include "nfrbf/mesh_io.hpp"

using namespace nfrbf;
constexpr double kPi = std::numbers::pi;

namespace {

NodeSet from_xy(const std::vector<Vec2>& pts) {
    NodeSet n;
    n.dim = 2;
    for (const auto& p : pts) {
        n.points.push_back({p.x(), p.y(), 0.0});
        n.boundary.push_back(false);
    }
    return n;
}

// long-double in-circle determinant, independent of the library predicates
long double incircle_ld(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const long double adx = a.x() - d.x(), ady = a.y() - d.y();
    const long double bdx = b.x() - d.x(), bdy = b.y() - d.y();
    const long double cdx = c.x() - d.x(), cdy = c.y() - d.y();
    return (adx * adx + ady * ady) * (bdx * cdy - cdx * bdy) - (bdx * bdx + bdy * bdy) * (adx * cdy - cdx * ady) +
           (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady);
}

// max over an m x m sample grid of the distance to the nearest node, via uniform buckets
double dense_covering_estimate(const NodeSet& nodes, int m) {
    const int g = 64;
    std::vector<std::vector<int>> bucket(g * g);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const int bx = std::clamp(static_cast<int>(nodes.points[i].x() * g), 0, g - 1);
        const int by = std::clamp(static_cast<int>(nodes.points[i].y() * g), 0, g - 1);
        bucket[by * g + bx].push_back(static_cast<int>(i));
    }
    double worst = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const Vec2 q((i + 0.5) / m, (j + 0.5) / m);
            const int bx = std::clamp(static_cast<int>(q.x() * g), 0, g - 1);
            const int by = std::clamp(static_cast<int>(q.y() * g), 0, g - 1);
            double best = 1e300;
            for (int r = 0; r < g; ++r) {
                for (int y = std::max(0, by - r); y <= std::min(g - 1, by + r); ++y)
                    for (int x = std::max(0, bx - r); x <= std::min(g - 1, bx + r); ++x) {
                        if (std::max(std::abs(x - bx), std::abs(y - by)) != r) continue;
                        for (int k : bucket[y * g + x]) best = std::min(best, (nodes.xy(k) - q).norm());
                    }
                if (best <= static_cast<double>(r) / g) break;
            }
            worst = std::max(worst, best);
        }
    return worst;
}

}  // namespace

TEST_CASE("delaunay small cases") {
    const auto sq = delaunay(from_xy({{0, 0}, {1, 0}, {1, 1}, {0, 1}}));
    CHECK(sq.triangles.size() == 2);
    CHECK(sq.area() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(delaunay(from_xy({{0, 0}, {1, 0}, {0, 1}})).triangles.size() == 1);
    CHECK_THROWS_AS(delaunay(from_xy({{0, 0}, {1, 1}, {2, 2}, {3, 3}})), DegenerateGeometry);
    CHECK_THROWS_AS(delaunay(from_xy({{0, 0}, {1, 0}, {0, 1}, {1, 0}})), InvalidInput);
}

TEST_CASE("delaunay property on relaxed nodes") {
    const NodeSet nodes = gen_nodes_square({SquareNodeKind::repulsion, 2000, 3, false});
    const PlanarMesh mesh = delaunay(nodes);
    CHECK(mesh.area() == doctest::Approx(1.0).epsilon(1e-10));
    KdTree tree(nodes.points, 2);
    int violations = 0;
    for (const auto& t : mesh.triangles) {
        const Vec2 a = nodes.xy(t[0]), b = nodes.xy(t[1]), c = nodes.xy(t[2]);
        CHECK(signed_area(a, b, c) > 0.0);
        const Vec2 cc = circumcenter(a, b, c);
        const double r = (cc - a).norm();
        for (int j : tree.nearest(Vec3(cc.x(), cc.y(), 0), 12)) {
            if (j == t[0] || j == t[1] || j == t[2]) continue;
            if (incircle_ld(a, b, c, nodes.xy(j)) > 1e-12L * r * r * r * r) ++violations;
        }
    }
    CHECK(violations == 0);
}

TEST_CASE("delaunay on a lattice with many cocircular quadruples") {
    std::vector<Vec2> pts;
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j) pts.push_back({i * 0.1, j * 0.1});
    const auto mesh = delaunay(from_xy(pts));
    CHECK(mesh.triangles.size() == 2 * 19 * 19);
    CHECK(mesh.area() == doctest::Approx(1.9 * 1.9).epsilon(1e-12));
}

TEST_CASE("kd-tree matches brute force with index tie-break") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> coord(0, 9);  // integer grid forces exact ties
    std::vector<Vec3> pts;
    for (int i = 0; i < 300; ++i) pts.push_back({double(coord(rng)), double(coord(rng)), double(coord(rng))});
    KdTree tree(pts, 3);
    for (int q = 0; q < 50; ++q) {
        const Vec3 x(coord(rng) + 0.5 * (q % 2), coord(rng), coord(rng));
        std::vector<std::pair<double, int>> all;
        for (int i = 0; i < 300; ++i) all.push_back({(pts[i] - x).squaredNorm(), i});
        std::sort(all.begin(), all.end());
        const auto got = tree.nearest(x, 17);
        for (int k = 0; k < 17; ++k) CHECK(got[k] == all[k].second);
    }
    CHECK_THROWS_AS(tree.nearest(Vec3::Zero(), 301), InvalidInput);
}

TEST_CASE("square node generators") {
    CHECK_THROWS_AS(gen_nodes_square({SquareNodeKind::regular, 4, 0, false}), InvalidInput);

    const NodeSet reg = gen_nodes_square({SquareNodeKind::regular, 2000, 0, false});
    CHECK(std::abs(static_cast<int>(reg.size()) - 2000) < 200);
    // interior nearest-neighbour distances are all equal away from the boundary
    KdTree tree(reg.points, 2);
    double lo = 1e300, hi = 0.0;
    for (std::size_t i = 0; i < reg.size(); ++i) {
        const Vec3& p = reg.points[i];
        if (reg.boundary[i] || p.x() < 0.1 || p.x() > 0.9 || p.y() < 0.1 || p.y() > 0.9) continue;
        const auto nn = tree.nearest(p, 7);
        for (int k = 1; k < 7; ++k) {
            const double d = (reg.points[nn[k]] - p).norm();
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
    }
    CHECK(hi - lo < 1e-12);

    const NodeSet a = gen_nodes_square({SquareNodeKind::repulsion, 2000, 7, true});
    const NodeSet b = gen_nodes_square({SquareNodeKind::repulsion, 2000, 7, true});
    REQUIRE(a.size() == b.size());
    CHECK(a.size() == 2000);
    bool identical = true;
    for (std::size_t i = 0; i < a.size(); ++i) identical = identical && a.points[i] == b.points[i];
    CHECK(identical);
    for (const auto& p : a.points) CHECK((p.x() >= 0.0 && p.x() <= 1.0 && p.y() >= 0.0 && p.y() <= 1.0));

    const NodeSet big = gen_nodes_square({SquareNodeKind::repulsion, 500, 1, false, 0.0, 2.0 * kPi});
    double mx = 0.0;
    for (const auto& p : big.points) mx = std::max(mx, p.x());
    CHECK(mx == doctest::Approx(2.0 * kPi));
}

TEST_CASE("covering radius") {
    CHECK(covering_radius(delaunay(from_xy({{0, 0}, {1, 0}, {1, 1}, {0, 1}}))) ==
          doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-14));

    // hexagonal patch of an equilateral lattice with side s
    const double s = 0.05;
    std::vector<Vec2> pts;
    for (int j = -8; j <= 8; ++j)
        for (int i = -8; i <= 8; ++i) {
            const Vec2 p((i + 0.5 * j) * s, j * s * std::sqrt(3.0) / 2.0);
            if (std::abs(i + j) <= 8) pts.push_back(p);
        }
    CHECK(covering_radius(delaunay(from_xy(pts))) == doctest::Approx(s / std::sqrt(3.0)).epsilon(1e-10));

    const NodeSet nodes = gen_nodes_square({SquareNodeKind::repulsion, 2000, 5, false});
    const double h = covering_radius(delaunay(nodes));
    const double dense = dense_covering_estimate(nodes, 1000);
    CHECK(std::abs(h - dense) / dense < 0.02);
}

TEST_CASE("periodic distance") {
    CHECK(periodic_distance({0.05, 0}, {0.95, 0}, 1.0) == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(periodic_distance({0.1, 0.1}, {0.9, 0.9}, 1.0) == doctest::Approx(std::sqrt(0.08)).epsilon(1e-14));
    CHECK(periodic_distance({0.3, 0.7}, {0.3, 0.7}, 2.0) == 0.0);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const Vec2 x(u(rng), u(rng)), y(u(rng), u(rng));
        CHECK(periodic_distance(x, y, 1.0) == periodic_distance(y, x, 1.0));
        CHECK(periodic_distance(x, y, 1.0) <= 1.0 / std::sqrt(2.0) + 1e-15);
    }
}

TEST_CASE("torus map and spiral mesh") {
    CHECK((torus_map(0, 0) - Vec3(4, 0, 0)).norm() < 1e-15);
    CHECK((torus_map(kPi / 2, kPi) - Vec3(0, 2, 0)).norm() < 1e-14);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double phi = u(rng), theta = u(rng);
        const auto [p2, t2] = torus_unmap(torus_map(phi, theta));
        worst = std::max({worst, std::abs(p2 - phi), std::abs(t2 - theta)});
    }
    CHECK(worst < 1e-12);
    CHECK_THROWS_AS(torus_unmap(Vec3(4, 0, 0.1)), InvalidInput);

    const SurfaceMesh mesh = gen_nodes_torus_spiral(1024);
    CHECK(is_watertight(mesh));
    CHECK(euler_characteristic(mesh) == 0);
    for (const auto& p : mesh.nodes.points) {
        const double q = std::hypot(p.x(), p.y()) - 3.0;
        CHECK(std::abs(q * q + p.z() * p.z() - 1.0) < 1e-12);
    }
    CHECK(signed_volume(mesh) > 0.0);

    // flat-triangle area approaches 12 pi^2 with decreasing error
    double prev = 1e300;
    for (int n : {256, 1024, 4096}) {
        const double err = std::abs(gen_nodes_torus_spiral(n).area() - 12.0 * kPi * kPi);
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev / (12.0 * kPi * kPi) < 5e-3);
}

TEST_CASE("sphere meshes") {
    const auto l0 = gen_sphere_icosahedral(0);
    CHECK(l0.nodes.size() == 12);
    CHECK(l0.triangles.size() == 20);
    const auto l2 = gen_sphere_icosahedral(2);
    CHECK(l2.nodes.size() == 162);
    CHECK(euler_characteristic(l2) == 2);
    for (const auto& p : l2.nodes.points) CHECK(std::abs(p.norm() - 1.0) < 1e-14);
    for (std::size_t t = 0; t < l2.triangles.size(); ++t) {
        CHECK(std::abs(l2.normals[t].norm() - 1.0) < 1e-12);
        CHECK(l2.normals[t].dot(l2.centroid(t)) > 0.0);
    }
    const auto g = gen_sphere_geodesic(5);
    CHECK(g.nodes.size() == 252);
    CHECK(is_watertight(g));
    CHECK(euler_characteristic(g) == 2);
}

TEST_CASE("cyclide") {
    CHECK_THROWS_AS(make_cyclide(0.1, std::nullopt, 0.2, 0.15), InvalidInput);
    CHECK_THROWS_AS(make_cyclide(1.0, 0.5, 0.1983, 0.5), InvalidInput);
    const CyclideParams p = make_cyclide(1.0, 0.98, 0.1983, 0.5);

    // analytic tangents against central differences
    const double step = 1e-6;
    for (double u : {-2.0, 0.3, 1.7})
        for (double v : {-1.1, 0.0, 2.9}) {
            const auto [tu, tv] = cyclide_tangents(u, v, p);
            const Vec3 fu = (cyclide_map(u + step, v, p) - cyclide_map(u - step, v, p)) / (2 * step);
            const Vec3 fv = (cyclide_map(u, v + step, p) - cyclide_map(u, v - step, p)) / (2 * step);
            CHECK((tu - fu).norm() < 1e-8);
            CHECK((tv - fv).norm() < 1e-8);
        }

    const SurfaceMesh mesh = gen_cyclide_mesh(p, 1000);
    CHECK(is_watertight(mesh));
    CHECK(euler_characteristic(mesh) == 0);
    for (const auto& x : mesh.nodes.points) CHECK(std::abs(cyclide_implicit(x, p)) < 1e-10);

    const double ref = cyclide_surface_integral(p, 1024, [](const Vec3&) { return 1.0; });
    double prev = 1e300;
    for (int n : {500, 2000, 8000}) {
        const double err = std::abs(gen_cyclide_mesh(p, n).area() - ref);
        CHECK(err < prev);
        prev = err;
    }
}

TEST_CASE("implicit surfaces") {
    const auto base = gen_sphere_icosahedral(3);
    const auto same = project_to_implicit(base, DeformedSphere{0.0});
    for (std::size_t i = 0; i < base.nodes.size(); ++i)
        CHECK((same.nodes.points[i] - base.nodes.points[i]).norm() < 1e-12);

    // rotate a vertex onto the pole
    SurfaceMesh polar = base;
    const Eigen::Quaterniond rot = Eigen::Quaterniond::FromTwoVectors(base.nodes.points[0], Vec3::UnitZ());
    for (auto& p : polar.nodes.points) p = rot * p;
    orient_surface(polar);
    const auto squashed = project_to_implicit(polar, DeformedSphere{0.8});
    for (const auto& x : squashed.nodes.points) CHECK(std::abs(implicit_value(DeformedSphere{0.8}, x)) < 1e-12);
    // on the axis the surface equation reduces to z^2 = 1 - gamma
    CHECK(squashed.nodes.points[0].z() == doctest::Approx(std::sqrt(0.2)).epsilon(1e-12));
    CHECK(squashed.nodes.points[0].head<2>().norm() < 1e-12);
    CHECK(signed_volume(squashed) > 0.0);

    BumpySphere flat{gen_bump_centers(100, 1), 0.0, 0.1};
    const auto unit = project_to_implicit(base, flat);
    for (const auto& x : unit.nodes.points) CHECK(std::abs(x.norm() - 1.0) < 1e-12);

    BumpySphere bumpy{gen_bump_centers(100, 1), 0.1, 0.1};
    const auto b = project_to_implicit(base, bumpy);
    for (const auto& x : b.nodes.points) CHECK(std::abs(implicit_value(bumpy, x)) < 1e-12);
}

TEST_CASE("geodesic distances on the sphere") {
    const auto mesh = gen_sphere_icosahedral(3);
    const auto d = geodesic_matrix(mesh);
    const int n = static_cast<int>(mesh.nodes.size());
    for (int i = 0; i < n; ++i) CHECK(d(i, i) == 0.0);
    CHECK((d - d.transpose()).norm() == 0.0);

    // icosahedral vertices come in antipodal pairs
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j)
            if ((mesh.nodes.points[i] + mesh.nodes.points[j]).norm() < 1e-12)
                CHECK(std::abs(d(i, j) - kPi) / kPi < 0.05);

    // agreement with great-circle distance
    double worst = 0.0;
    for (int i = 0; i < n; i += 7)
        for (int j = 0; j < n; j += 5) {
            const double exact = std::acos(std::clamp(mesh.nodes.points[i].dot(mesh.nodes.points[j]), -1.0, 1.0));
            worst = std::max(worst, std::abs(d(i, j) - exact));
        }
    CHECK(worst < 0.1);

    const double h = covering_radius(mesh);
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> pick(0, n - 1);
    for (int s = 0; s < 2000; ++s) {
        const int i = pick(rng), j = pick(rng), k = pick(rng);
        CHECK(d(i, k) <= d(i, j) + d(j, k) + 2 * h);
    }

    const auto dir = std::filesystem::temp_directory_path() / "nfrbf_geodesic_test";
    std::filesystem::remove_all(dir);
    const auto cached = geodesic_matrix_cached(mesh, dir);
    CHECK(std::filesystem::exists(geodesic_cache_path(dir, mesh)));
    Eigen::MatrixXd again;
    CHECK(read_geodesic_cache(geodesic_cache_path(dir, mesh), mesh_hash(mesh), again));
    CHECK((again - cached).norm() == 0.0);
    CHECK_FALSE(read_geodesic_cache(geodesic_cache_path(dir, mesh), mesh_hash(mesh) + 1, again));
    std::filesystem::remove_all(dir);
}

TEST_CASE("geodesic rejects disconnected meshes") {
    auto a = gen_sphere_icosahedral(0);
    auto b = a;
    SurfaceMesh both = a;
    for (const auto& p : b.nodes.points) both.nodes.points.push_back(p + Vec3(5, 0, 0));
    for (auto t : b.triangles) both.triangles.push_back({t[0] + 12, t[1] + 12, t[2] + 12});
    both.nodes.boundary.assign(both.nodes.points.size(), false);
    orient_surface(both);
    CHECK_THROWS_AS(geodesic_matrix(both), DegenerateGeometry);
}

TEST_CASE("mesh and node I/O round trip") {
    const auto dir = std::filesystem::temp_directory_path() / "nfrbf_io_test";
    std::filesystem::create_directories(dir);
    const auto mesh = gen_sphere_icosahedral(1);
    write_off(dir / "s.off", mesh);
    const auto back = read_surface_mesh(dir / "s.off");
    CHECK(back.nodes.size() == mesh.nodes.size());
    CHECK(back.triangles == mesh.triangles);
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i) CHECK(back.nodes.points[i] == mesh.nodes.points[i]);

    {
        std::ofstream os(dir / "t.obj");
        os << "# tetrahedron, inward winding\nv 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\n"
              "f 1 2 3\nf 1 2 4\nf 1 3 4\nf 2 3 4\n";
    }
    const auto tet = read_surface_mesh(dir / "t.obj");
    CHECK(signed_volume(tet) == doctest::Approx(1.0 / 6.0));

    const NodeSet nodes = gen_nodes_square({SquareNodeKind::regular, 100, 0, false});
    write_nodes_csv(dir / "n.csv", nodes);
    const NodeSet nb = read_nodes_csv(dir / "n.csv");
    REQUIRE(nb.size() == nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        CHECK(nb.points[i] == nodes.points[i]);
        CHECK(nb.boundary[i] == nodes.boundary[i]);
    }
    std::filesystem::remove_all(dir);
}
