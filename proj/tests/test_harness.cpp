#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "doctest.h"
#include "nfrbf/error.hpp"
#include "nfrbf/harness.hpp"
#include "nfrbf/mesh_io.hpp"

using namespace nfrbf;

namespace {

constexpr double kPi = std::numbers::pi;

std::string slurp(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("nfrbf_harness_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("rate fitting") {
    CHECK(fit_rate({{0.1, 1e-2}, {0.01, 1e-5}}) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(std::abs(fit_rate({{0.1, 0.3}, {0.05, 0.3}, {0.02, 0.3}})) < 1e-12);
    std::vector<std::pair<double, double>> pts;
    for (double h : {0.2, 0.1, 0.07, 0.03, 0.011}) pts.emplace_back(h, std::pow(h, 4));
    CHECK(std::abs(fit_rate(pts) - 4.0) < 1e-10);

    std::vector<std::string> notes;
    pts.emplace_back(0.005, 0.0);
    pts.emplace_back(0.004, -1.0);
    CHECK(std::abs(fit_rate(pts, &notes) - 4.0) < 1e-10);
    CHECK(notes.size() == 2);
    CHECK_THROWS_AS(fit_rate({{0.1, 1e-3}}), InvalidInput);
    CHECK_THROWS_AS(fit_rate({{0.1, 1e-3}, {0.1, 2e-3}}), InvalidInput);
}

TEST_CASE("test functions and references") {
    CHECK(parse_test_function("torus-sin") == TestFunction::torus_sin);
    CHECK(parse_test_function("chebyshev_product") == TestFunction::chebyshev_product);
    CHECK_THROWS_AS(parse_test_function("bessel"), InvalidInput);
    CHECK(parse_domain("unit-square") == QuadDomainKind::unit_square);
    CHECK_THROWS_AS(parse_domain("klein"), InvalidInput);
    for (auto fn : {TestFunction::chebyshev_product, TestFunction::trig_xyz}) CHECK(parse_test_function(to_string(fn)) == fn);

    CHECK(eval_test_function(TestFunction::chebyshev_product, Vec3(1.0, 1.0, 0.0)) == doctest::Approx(2.0));
    CHECK(eval_test_function(TestFunction::sphere_poly, Vec3(1.0, 1.0, 1.0)) == doctest::Approx(6.0));

    // tensor Gauss-Legendre on the unit square, independent of the closed forms
    using GL = boost::math::quadrature::gauss<double, 40>;
    const auto square = [&](TestFunction fn) {
        return GL::integrate([&](double x) {
            return GL::integrate([&](double y) { return eval_test_function(fn, Vec3(x, y, 0.0)); }, 0.0, 1.0);
        }, 0.0, 1.0);
    };
    const QuadDomain sq;
    for (auto fn : {TestFunction::chebyshev_product, TestFunction::square_gaussian, TestFunction::deg4_poly,
                    TestFunction::const_one})
        CHECK(exact_integral(sq, fn) == doctest::Approx(square(fn)).epsilon(1e-13));
    CHECK(exact_integral(sq, TestFunction::square_gaussian) == doctest::Approx(0.29843491843690495).epsilon(1e-14));
    CHECK_THROWS_AS(exact_integral(sq, TestFunction::torus_sin), InvalidInput);

    QuadDomain torus{QuadDomainKind::torus};
    CHECK(exact_integral(torus, TestFunction::torus_sin) == doctest::Approx(118.43525281307230).epsilon(1e-14));
    QuadDomain sphere{QuadDomainKind::sphere};
    CHECK(exact_integral(sphere, TestFunction::sphere_poly) == doctest::Approx(20.0 * kPi));
    CHECK_THROWS_AS(exact_integral(sphere, TestFunction::torus_sin), InvalidInput);

    // the dense cyclide oracle is already converged: a 4x coarser trapezoid agrees
    QuadDomain cyc{QuadDomainKind::cyclide};
    for (auto fn : {TestFunction::const_one, TestFunction::trig_xyz}) {
        const double coarse = cyclide_surface_integral(cyc.cyclide, 1024, [&](const Vec3& x) {
            return eval_test_function(fn, x);
        });
        CHECK(exact_integral(cyc, fn) == doctest::Approx(coarse).epsilon(1e-12));
    }
    CHECK(default_stencil_size(3) == 21);
    CHECK(default_stencil_size(4) == 32);
}

TEST_CASE("quadrature sweeps") {
    QuadSweep sweep;
    sweep.fn = TestFunction::deg4_poly;
    sweep.degrees = {2, 4};
    sweep.resolutions = {300, 600};
    sweep.seeds = {0, 1, 2};
    const ConvergenceReport a = quad_convergence(sweep);
    CHECK(a.records.size() == 2 * 2 * 3);
    CHECK(a.medians(4).size() == 2);
    for (const auto& r : a.medians(4)) CHECK(r.rel_error < 1e-11);
    CHECK(a.slopes.count(2) == 1);
    CHECK(std::isfinite(a.slopes.at(2)));

    const auto dir = scratch("sweep");
    write_report(dir / "a.csv", a);
    write_slope_summary(dir / "s.csv", a);
    const ConvergenceReport b = quad_convergence(sweep);
    write_report(dir / "b.csv", b);
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    CHECK(slurp(dir / "a.csv").rfind("n,h_proxy,degree,seed,rel_error,stability\n", 0) == 0);
    CHECK(slurp(dir / "s.csv").rfind("degree,slope,resolutions\n", 0) == 0);

    QuadSweep surf;
    surf.domain.kind = QuadDomainKind::sphere;
    surf.fn = TestFunction::const_one;
    surf.degrees = {3};
    surf.resolutions = {2, 3};
    const ConvergenceReport s = quad_convergence(surf);
    CHECK(s.records.size() == 2);  // deterministic meshes use one seed
    CHECK(s.records[1].n == 642);
    CHECK(s.records[1].rel_error < s.records[0].rel_error);

    sweep.fn = TestFunction::sphere_poly;
    CHECK_THROWS_AS(quad_convergence(sweep), InvalidInput);
}

TEST_CASE("error map") {
    SUBCASE("a periodic trapezoid rule matches the erf reference") {
        // the min-image Gaussian has a kink of relative size exp(-12.5) at the cell edge
        const int m = 40;
        std::vector<Vec3> pts;
        QuadratureRule rule;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                pts.emplace_back((i + 0.25) / m, (j + 0.6) / m, 0.0);
                rule.weights.push_back(1.0 / (m * m));
            }
        const ErrorMap map = error_map(rule, pts, 0.1, 12);
        CHECK(map.values.size() == 144);
        CHECK(map.max_abs < 1e-6);
    }
    SUBCASE("random rule") {
        const QuadDomain sq;
        const DomainMesh mesh = build_domain_mesh(sq, 800, 5);
        const QuadratureRule rule = build_rule(mesh, {{3}, 3, 21});
        const ErrorMap map = error_map(rule, mesh.nodes().points, 0.1, 30);
        CHECK(map.both_signs);
        CHECK(std::abs(map.mean) < 0.05 * map.max_abs);
        for (const Vec2& c : map.centers) CHECK((c.array() > 0.0).all());
        const auto dir = scratch("emap");
        write_error_map(dir / "e.csv", map);
        CHECK(slurp(dir / "e.csv").rfind("x0,y0,error\n", 0) == 0);
        CHECK_THROWS_AS(error_map(rule, std::vector<Vec3>(3), 0.1, 10), InvalidInput);
    }
}

TEST_CASE("neural-field sweeps") {
    NfSweep sweep;
    sweep.base.solution.sigma_w = 0.5;  // resolved kernel keeps the test fast and meaningful
    sweep.base.T = 0.02;
    sweep.degrees = {3};
    sweep.resolutions = {400, 800};
    const ConvergenceReport r = nf_convergence(sweep);
    CHECK(r.records.size() == 2);
    CHECK(r.records[1].rel_error < r.records[0].rel_error);

    NfRun torus;
    torus.domain = NfDomain::torus;
    torus.solution.sigma_w = 0.5;
    torus.n = 1024;
    torus.T = 0.02;
    const NfResult t = nf_error(torus);
    CHECK(t.rel_error < 1e-3);
}

TEST_CASE("showcase plumbing") {
    CHECK_THROWS_AS(showcase_defaults("vortex"), InvalidInput);
    CHECK(showcase_defaults("spot").depression.has_value());
    CHECK(showcase_defaults("cortex").kernel.sigma_i == 6.0);

    const Vec3 target = Vec3(0.5, 0.3, std::sqrt(0.34)).normalized();
    CHECK((labyrinth_rotation() * Vec3::UnitZ() - target).norm() < 1e-14);
    CHECK(labyrinth_pattern(Vec3(0, 0, 1)) == doctest::Approx(5.0));
    CHECK(labyrinth_pattern(Vec3(0, 0, -1)) == 0.0);
    // four-fold symmetry of the cross
    const Vec3 p = Vec3(0.1, 0.05, 1.0).normalized();
    CHECK(labyrinth_pattern(p) == doctest::Approx(labyrinth_pattern(Vec3(-p.y(), p.x(), p.z()))).epsilon(1e-14));

    SUBCASE("labyrinth frames and summary") {
        ShowcaseConfig c = showcase_defaults("labyrinth");
        c.frequency = 6;
        c.gamma = 0.4;
        c.T = 0.2;
        c.stride = 10;
        c.out_dir = scratch("lab");
        const ShowcaseResult r = showcase(c);
        CHECK(r.completed);
        CHECK(r.rows.size() == 3);
        CHECK(r.frames == 3);
        CHECK(std::filesystem::exists(c.out_dir / "frame_000020.vtk"));
        CHECK(slurp(c.out_dir / "summary.csv").rfind("step,t,min_u,max_u,min_q,max_q,cx,cy,cz,active\n", 0) == 0);
    }
    SUBCASE("non-finite state keeps the last good frame") {
        ShowcaseConfig c = showcase_defaults("spot");
        c.frequency = 5;
        c.kernel.a_e = 1e308;
        c.T = 1.0;
        c.stride = 1;
        c.out_dir = scratch("blowup");
        const ShowcaseResult r = showcase(c);
        CHECK_FALSE(r.completed);
        CHECK(r.failure.find("step") != std::string::npos);
        CHECK(std::filesystem::exists(c.out_dir / "frame_last_good.vtk"));
        CHECK(r.final_state.u.allFinite());
    }
    SUBCASE("cortex runs on a supplied closed mesh") {
        const auto dir = scratch("cortex");
        SurfaceMesh blob = gen_sphere_geodesic(5);
        for (Vec3& x : blob.nodes.points) x = Vec3(60.0 * x.x(), 40.0 * x.y(), 30.0 * x.z());
        write_off(dir / "blob.off", blob);
        ShowcaseConfig c = showcase_defaults("cortex");
        c.mesh_path = dir / "blob.off";
        c.T = 0.1;
        c.stride = 5;
        c.out_dir = dir / "out";
        const ShowcaseResult r = showcase(c);
        CHECK(r.completed);
        CHECK(r.frames >= 2);
        c.mesh_path.clear();
        CHECK_THROWS_AS(showcase(c), InvalidInput);
    }
}
