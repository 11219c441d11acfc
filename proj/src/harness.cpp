#include "nfrbf/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <numbers>
#include <sstream>

#include <Eigen/Geometry>

#include "nfrbf/delaunay.hpp"
#include "nfrbf/error.hpp"
#include "nfrbf/geodesic.hpp"
#include "nfrbf/log.hpp"
#include "nfrbf/mesh_io.hpp"
#include "nfrbf/vtk.hpp"

namespace nfrbf {

namespace {

constexpr double kPi = std::numbers::pi;

std::string normalize_name(std::string_view name) {
    std::string s(name);
    std::replace(s.begin(), s.end(), '-', '_');
    return s;
}

// Chebyshev polynomial T_n on [-1, 1] by recurrence.
double chebyshev(int n, double x) {
    double a = 1.0, b = x;
    if (n == 0) return a;
    for (int i = 1; i < n; ++i) {
        const double c = 2.0 * x * b - a;
        a = b;
        b = c;
    }
    return b;
}

std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot write " + path.string());
    os << std::setprecision(17);
    return os;
}

}  // namespace

// ---------------------------------------------------------------------------------------------

TestFunction parse_test_function(std::string_view name) {
    static const std::map<std::string, TestFunction> table{
        {"chebyshev_product", TestFunction::chebyshev_product},
        {"square_gaussian", TestFunction::square_gaussian},
        {"deg4_poly", TestFunction::deg4_poly},
        {"torus_sin", TestFunction::torus_sin},
        {"const_one", TestFunction::const_one},
        {"sphere_poly", TestFunction::sphere_poly},
        {"trig_xyz", TestFunction::trig_xyz},
    };
    const auto it = table.find(normalize_name(name));
    if (it == table.end()) throw InvalidInput("unknown test function '" + std::string(name) + "'");
    return it->second;
}

std::string to_string(TestFunction fn) {
    switch (fn) {
        case TestFunction::chebyshev_product: return "chebyshev_product";
        case TestFunction::square_gaussian: return "square_gaussian";
        case TestFunction::deg4_poly: return "deg4_poly";
        case TestFunction::torus_sin: return "torus_sin";
        case TestFunction::const_one: return "const_one";
        case TestFunction::sphere_poly: return "sphere_poly";
        case TestFunction::trig_xyz: return "trig_xyz";
    }
    return "?";
}

double eval_test_function(TestFunction fn, const Vec3& p) {
    const double x = p.x(), y = p.y(), z = p.z();
    switch (fn) {
        case TestFunction::chebyshev_product: return chebyshev(5, 2.0 * x - 1.0) * chebyshev(4, 2.0 * y - 1.0) + 1.0;
        case TestFunction::square_gaussian: return std::exp(-10.0 * ((x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5)));
        case TestFunction::deg4_poly: return x * x * x - y * y * y * y;
        case TestFunction::torus_sin: return std::sin(7.0 * x) + 1.0;
        case TestFunction::const_one: return 1.0;
        case TestFunction::sphere_poly: return x * x * x * y * y * z * z * z * z + 5.0;
        case TestFunction::trig_xyz: return std::sin(x) * std::cos(2.0 * y) * std::cos(3.0 * z);
    }
    return 0.0;
}

QuadDomainKind parse_domain(std::string_view name) {
    const std::string s = normalize_name(name);
    if (s == "unit_square") return QuadDomainKind::unit_square;
    if (s == "torus") return QuadDomainKind::torus;
    if (s == "sphere") return QuadDomainKind::sphere;
    if (s == "cyclide") return QuadDomainKind::cyclide;
    throw InvalidInput("unknown domain '" + std::string(name) + "'");
}

std::string to_string(QuadDomainKind kind) {
    switch (kind) {
        case QuadDomainKind::unit_square: return "unit_square";
        case QuadDomainKind::torus: return "torus";
        case QuadDomainKind::sphere: return "sphere";
        case QuadDomainKind::cyclide: return "cyclide";
    }
    return "?";
}

double exact_integral(const QuadDomain& domain, TestFunction fn) {
    const auto unsupported = [&]() {
        return InvalidInput("no reference integral for " + to_string(fn) + " on " + to_string(domain.kind));
    };
    switch (domain.kind) {
        case QuadDomainKind::unit_square:
            switch (fn) {
                case TestFunction::chebyshev_product:
                case TestFunction::const_one: return 1.0;
                case TestFunction::square_gaussian: {
                    const double e = std::erf(std::sqrt(10.0) / 2.0);
                    return kPi / 10.0 * e * e;
                }
                case TestFunction::deg4_poly: return 0.25 - 0.2;
                default: throw unsupported();
            }
        case QuadDomainKind::torus: {
            const double area = 4.0 * kPi * kPi * domain.torus.major * domain.torus.minor;
            // sin(7x) is odd under the reflection x -> -x, which preserves the torus
            if (fn == TestFunction::torus_sin || fn == TestFunction::const_one) return area;
            throw unsupported();
        }
        case QuadDomainKind::sphere:
            if (fn == TestFunction::const_one) return 4.0 * kPi;
            if (fn == TestFunction::sphere_poly) return 20.0 * kPi;
            throw unsupported();
        case QuadDomainKind::cyclide: {
            if (fn != TestFunction::const_one && fn != TestFunction::sphere_poly && fn != TestFunction::trig_xyz)
                throw unsupported();
            static std::mutex mutex;
            static std::map<std::tuple<int, double, double, double>, double> cache;
            const auto key = std::make_tuple(static_cast<int>(fn), domain.cyclide.a, domain.cyclide.c, domain.cyclide.d);
            std::lock_guard lock(mutex);
            const auto it = cache.find(key);
            if (it != cache.end()) return it->second;
            const double v = cyclide_surface_integral(domain.cyclide, 4096,
                                                      [&](const Vec3& x) { return eval_test_function(fn, x); });
            cache.emplace(key, v);
            return v;
        }
    }
    throw unsupported();
}

int default_stencil_size(int deg) { return deg <= 3 ? 21 : 32; }

DomainMesh build_domain_mesh(const QuadDomain& domain, int resolution, std::uint64_t seed) {
    DomainMesh m;
    switch (domain.kind) {
        case QuadDomainKind::unit_square: {
            SquareNodeOptions opt;
            opt.kind = domain.nodes;
            opt.n_target = resolution;
            opt.seed = seed;
            m.planar = delaunay(gen_nodes_square(opt));
            break;
        }
        case QuadDomainKind::torus: m.surface = gen_nodes_torus_spiral(resolution, domain.torus); break;
        case QuadDomainKind::sphere: m.surface = gen_sphere_icosahedral(resolution); break;
        case QuadDomainKind::cyclide: m.surface = gen_cyclide_mesh(domain.cyclide, resolution); break;
    }
    if (m.surface) consistent_normals(*m.surface);
    return m;
}

QuadratureRule build_rule(const DomainMesh& mesh, const RbfParams& params) {
    return mesh.planar ? assemble_rule(*mesh.planar, params) : assemble_surface_rule(*mesh.surface, params);
}

// ---------------------------------------------------------------------------------------------

std::vector<ConvergenceRecord> ConvergenceReport::medians(int degree) const {
    std::map<long, std::vector<ConvergenceRecord>> by_n;
    for (const auto& r : records)
        if (r.degree == degree) by_n[r.n].push_back(r);
    std::vector<ConvergenceRecord> out;
    for (auto& [n, group] : by_n) {
        std::sort(group.begin(), group.end(),
                  [](const auto& a, const auto& b) { return a.rel_error < b.rel_error; });
        ConvergenceRecord m = group[group.size() / 2];
        if (group.size() % 2 == 0) {
            const auto& lo = group[group.size() / 2 - 1];
            m.rel_error = 0.5 * (lo.rel_error + m.rel_error);
            m.stability = 0.5 * (lo.stability + m.stability);
        }
        out.push_back(m);
    }
    return out;
}

double fit_rate(const std::vector<std::pair<double, double>>& h_error, std::vector<std::string>* notes) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& [h, e] : h_error) {
        if (!(e > 0.0) || !std::isfinite(e) || !(h > 0.0)) {
            if (notes) {
                std::ostringstream os;
                os << "excluded point h=" << h << " error=" << e << " from the rate fit";
                notes->push_back(os.str());
            }
            continue;
        }
        pts.emplace_back(std::log(h), std::log(e));
    }
    if (pts.size() < 2) throw InvalidInput("fit_rate needs at least two positive errors");
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : pts) {
        mx += x;
        my += y;
    }
    mx /= pts.size();
    my /= pts.size();
    double sxy = 0.0, sxx = 0.0;
    for (const auto& [x, y] : pts) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if (!(sxx > 0.0)) throw InvalidInput("fit_rate needs at least two distinct resolutions");
    return sxy / sxx;
}

namespace {

void fit_all(ConvergenceReport& report, const std::vector<int>& degrees) {
    for (int deg : degrees) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& m : report.medians(deg)) pts.emplace_back(m.h_proxy, m.rel_error);
        if (pts.size() >= 2) report.slopes[deg] = fit_rate(pts, &report.notes);
    }
}

template <class T>
std::string join(const std::vector<T>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
    return os.str();
}

}  // namespace

ConvergenceReport quad_convergence(const QuadSweep& sweep) {
    if (sweep.degrees.empty() || sweep.resolutions.empty()) throw InvalidInput("empty sweep");
    const double exact = exact_integral(sweep.domain, sweep.fn);
    const bool random = sweep.domain.kind == QuadDomainKind::unit_square && sweep.domain.nodes == SquareNodeKind::repulsion;
    std::vector<std::uint64_t> seeds = sweep.seeds;
    if (seeds.empty()) seeds.push_back(0);
    if (!random) seeds.resize(1);

    ConvergenceReport report;
    std::ostringstream cfg;
    cfg << "quad domain=" << to_string(sweep.domain.kind)
        << (sweep.domain.kind == QuadDomainKind::unit_square
                ? (sweep.domain.nodes == SquareNodeKind::regular ? " nodes=regular" : " nodes=repulsion")
                : "")
        << " fn=" << to_string(sweep.fn) << " phs=" << sweep.phs << " degrees=" << join(sweep.degrees)
        << " resolutions=" << join(sweep.resolutions) << " seeds=" << join(seeds)
        << " k=" << (sweep.k ? std::to_string(*sweep.k) : "auto") << std::setprecision(17) << " exact=" << exact;
    report.config = cfg.str();

    for (int res : sweep.resolutions) {
        for (std::uint64_t seed : seeds) {
            const DomainMesh mesh = build_domain_mesh(sweep.domain, res, seed);
            const NodeSet& nodes = mesh.nodes();
            std::vector<double> f(nodes.size());
            for (std::size_t i = 0; i < nodes.size(); ++i) f[i] = eval_test_function(sweep.fn, nodes.points[i]);
            for (int deg : sweep.degrees) {
                const RbfParams params{{sweep.phs}, deg, sweep.k.value_or(default_stencil_size(deg))};
                const QuadratureRule rule = build_rule(mesh, params);
                ConvergenceRecord r;
                r.n = static_cast<long>(nodes.size());
                r.h_proxy = 1.0 / std::sqrt(static_cast<double>(r.n));
                r.degree = deg;
                r.seed = seed;
                r.rel_error = std::abs(apply_rule(rule, f) - exact) / std::abs(exact);
                r.stability = rule.stability();
                report.records.push_back(r);
                log_info("quad n=" + std::to_string(r.n) + " deg=" + std::to_string(deg) + " seed=" +
                         std::to_string(seed) + " error=" + std::to_string(r.rel_error));
            }
        }
    }
    fit_all(report, sweep.degrees);
    return report;
}

void write_report(const std::filesystem::path& path, const ConvergenceReport& report) {
    std::ofstream os = open_output(path);
    os << "n,h_proxy,degree,seed,rel_error,stability\n";
    for (const auto& r : report.records)
        os << r.n << ',' << r.h_proxy << ',' << r.degree << ',' << r.seed << ',' << r.rel_error << ',' << r.stability
           << '\n';
}

void write_slope_summary(const std::filesystem::path& path, const ConvergenceReport& report) {
    std::ofstream os = open_output(path);
    os << "degree,slope,resolutions\n";
    for (const auto& [deg, slope] : report.slopes) os << deg << ',' << slope << ',' << report.medians(deg).size() << '\n';
}

// ---------------------------------------------------------------------------------------------

ErrorMap error_map(const QuadratureRule& rule, const std::vector<Vec3>& points, double sigma, int grid) {
    if (rule.size() != points.size()) throw InvalidInput("error_map: rule and nodes differ in length");
    if (!(sigma > 0.0) || grid < 1) throw InvalidInput("error_map: sigma and grid must be positive");
    const double e = std::erf(1.0 / (2.0 * std::sqrt(2.0) * sigma));
    const double exact = e * e;
    ErrorMap map;
    map.grid = grid;
    map.centers.resize(static_cast<std::size_t>(grid) * grid);
    map.values.resize(map.centers.size());
    const int cells = grid * grid;
#pragma omp parallel for schedule(static)
    for (int c = 0; c < cells; ++c) {
        const Vec2 x0((c % grid + 0.5) / grid, (c / grid + 0.5) / grid);
        double q = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i)
            q += rule.weights[i] * gauss2d(periodic_distance(points[i].head<2>(), x0, 1.0), sigma);
        map.centers[c] = x0;
        map.values[c] = (exact - q) / exact;
    }
    bool pos = false, neg = false;
    double sum = 0.0;
    for (double v : map.values) {
        map.max_abs = std::max(map.max_abs, std::abs(v));
        sum += v;
        pos = pos || v > 0.0;
        neg = neg || v < 0.0;
    }
    map.mean = sum / map.values.size();
    map.both_signs = pos && neg;
    return map;
}

void write_error_map(const std::filesystem::path& path, const ErrorMap& map) {
    std::ofstream os = open_output(path);
    os << "x0,y0,error\n";
    for (std::size_t i = 0; i < map.values.size(); ++i)
        os << map.centers[i].x() << ',' << map.centers[i].y() << ',' << map.values[i] << '\n';
}

// ---------------------------------------------------------------------------------------------

NfResult nf_error(const NfRun& run) {
    const Manufactured& mf = run.solution;
    const RbfParams params{{run.phs}, run.degree, run.k.value_or(default_stencil_size(run.degree))};
    std::vector<Vec3> coords;  // manufactured-solution coordinates of each node
    QuadratureRule rule;
    KernelOptions options;
    if (run.domain == NfDomain::flat) {
        SquareNodeOptions opt;
        opt.kind = SquareNodeKind::repulsion;
        opt.n_target = run.n;
        opt.seed = run.seed;
        opt.lo = -kPi;
        opt.hi = kPi;
        const PlanarMesh mesh = delaunay(gen_nodes_square(opt));
        rule = assemble_rule(mesh, params);
        coords = mesh.nodes.points;
    } else {
        const TorusParams torus;
        SurfaceMesh mesh = gen_nodes_torus_spiral(run.n, torus);
        consistent_normals(mesh);
        rule = assemble_surface_rule(mesh, params);
        for (const Vec3& p : mesh.nodes.points) {
            const auto [phi, theta] = torus_unmap(p, torus);
            coords.emplace_back(phi, theta, 0.0);
            options.column_scale.push_back(1.0 / (torus.major + torus.minor * std::cos(theta)));
        }
    }
    const int n = static_cast<int>(coords.size());
    NeuralFieldModel model;
    model.firing = mf.firing;
    model.weights = kernel_matrix(coords, rule.weights, mf.kernel(), options);
    model.forcing = [&](double t, Eigen::VectorXd& out) {
        for (int i = 0; i < n; ++i) out[i] += mf.forcing(t, coords[i].head<2>());
    };
    Eigen::VectorXd u0(n), exact(n);
    for (int i = 0; i < n; ++i) {
        u0[i] = mf.u(0.0, coords[i].head<2>());
        exact[i] = mf.u(run.T, coords[i].head<2>());
    }
    const SimState s = integrate(model, model.initial_state(u0), run.T, run.dt);
    NfResult r;
    r.n = n;
    r.rel_error = (s.u - exact).cwiseAbs().maxCoeff() / exact.cwiseAbs().maxCoeff();
    r.stability = rule.stability();
    return r;
}

ConvergenceReport nf_convergence(const NfSweep& sweep) {
    if (sweep.degrees.empty() || sweep.resolutions.empty()) throw InvalidInput("empty sweep");
    ConvergenceReport report;
    std::ostringstream cfg;
    cfg << "nf domain=" << (sweep.base.domain == NfDomain::flat ? "flat" : "torus") << " degrees=" << join(sweep.degrees)
        << " resolutions=" << join(sweep.resolutions) << " seeds=" << join(sweep.seeds) << " dt=" << sweep.base.dt
        << " T=" << sweep.base.T << " sigma_w=" << sweep.base.solution.sigma_w
        << " sigma_u=" << sweep.base.solution.sigma_u;
    report.config = cfg.str();
    const std::vector<std::uint64_t> seeds = sweep.seeds.empty() ? std::vector<std::uint64_t>{0} : sweep.seeds;
    for (int res : sweep.resolutions)
        for (std::uint64_t seed : seeds)
            for (int deg : sweep.degrees) {
                NfRun run = sweep.base;
                run.n = res;
                run.degree = deg;
                run.seed = seed;
                const NfResult r = nf_error(run);
                ConvergenceRecord rec;
                rec.n = r.n;
                rec.h_proxy = 1.0 / std::sqrt(static_cast<double>(r.n));
                rec.degree = deg;
                rec.seed = seed;
                rec.rel_error = r.rel_error;
                rec.stability = r.stability;
                report.records.push_back(rec);
                log_info("nf n=" + std::to_string(r.n) + " deg=" + std::to_string(deg) +
                         " error=" + std::to_string(r.rel_error));
            }
    fit_all(report, sweep.degrees);
    return report;
}

// ---------------------------------------------------------------------------------------------

ShowcaseConfig showcase_defaults(std::string_view scenario) {
    ShowcaseConfig c;
    c.scenario = std::string(scenario);
    if (scenario == "labyrinth") {
        c.kernel = KernelSpec::difference(5.0, 0.05, 5.0, 0.1);
    } else if (scenario == "spot") {
        c.kernel = KernelSpec::difference(5.0, 0.05, 7.0, 0.1);
        c.depression = Depression{};
        c.T = 50.0;
    } else if (scenario == "cortex") {
        c.kernel = KernelSpec::difference(5.0, 3.0, 5.0, 6.0);
    } else {
        throw InvalidInput("unknown scenario '" + std::string(scenario) + "' (labyrinth, spot, cortex)");
    }
    c.kernel.distance = DistanceKind::geodesic;
    return c;
}

double labyrinth_pattern(const Vec3& p) {
    if (!(p.z() > 0.0)) return 0.0;
    const double rho = std::hypot(p.x(), p.y());
    const double a = (std::cos(4.0 * std::atan2(p.y(), p.x())) + 3.0) * rho;
    return 5.0 * std::exp(-10.0 * a * a);
}

Eigen::Matrix3d labyrinth_rotation() {
    const Vec3 target = Vec3(0.5, 0.3, std::sqrt(0.34)).normalized();
    return Eigen::Quaterniond::FromTwoVectors(Vec3::UnitZ(), target).toRotationMatrix();
}

namespace {

// Initial state for each scenario, in node order of `mesh`.
SimState showcase_initial(const ShowcaseConfig& c, const SurfaceMesh& mesh, const SurfaceMesh& base,
                          const Eigen::MatrixXd& dist, const NeuralFieldModel& model) {
    const int n = static_cast<int>(mesh.nodes.size());
    Eigen::VectorXd u0 = Eigen::VectorXd::Zero(n);
    SimState s;
    if (c.scenario == "labyrinth") {
        const Eigen::Matrix3d rot = labyrinth_rotation();
        for (int i = 0; i < n; ++i) u0[i] = labyrinth_pattern(rot.transpose() * base.nodes.points[i].normalized());
        s = model.initial_state(u0);
    } else if (c.scenario == "spot") {
        // a spot at the node nearest +x, with resources depleted behind it (toward -y)
        int src = 0;
        for (int i = 1; i < n; ++i)
            if (base.nodes.points[i].x() > base.nodes.points[src].x()) src = i;
        const double width = c.kernel.sigma_e;
        for (int i = 0; i < n; ++i) u0[i] = std::exp(-dist(src, i) * dist(src, i) / (2.0 * width * width));
        s = model.initial_state(u0);
        if (model.depression) {
            const Vec3 behind = Vec3(1.0, -2.0 * width, 0.0).normalized();
            for (int i = 0; i < n; ++i) {
                const double d = (base.nodes.points[i].normalized() - behind).norm();
                s.q[i] = 1.0 - 0.5 * std::exp(-d * d / (2.0 * width * width));
            }
        }
    } else {
        // band across the longest bounding-box axis through the centroid
        Vec3 lo = mesh.nodes.points[0], hi = lo, mean = Vec3::Zero();
        for (const Vec3& p : mesh.nodes.points) {
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
            mean += p;
        }
        mean /= n;
        int axis = 0;
        (hi - lo).maxCoeff(&axis);
        const double w = c.band_width > 0.0 ? c.band_width : 2.0 * c.kernel.sigma_i;
        for (int i = 0; i < n; ++i) {
            const double s0 = mesh.nodes.points[i][axis] - mean[axis];
            u0[i] = std::exp(-s0 * s0 / (2.0 * w * w));
        }
        s = model.initial_state(u0);
    }
    return s;
}

ShowcaseRow summarize(long step, const SimState& s, const SurfaceMesh& mesh, const QuadratureRule& rule) {
    ShowcaseRow r;
    r.step = step;
    r.t = s.t;
    r.min_u = s.u.minCoeff();
    r.max_u = s.u.maxCoeff();
    if (s.q.size()) {
        r.min_q = s.q.minCoeff();
        r.max_q = s.q.maxCoeff();
    }
    if (r.max_u > 0.0) {
        double mass = 0.0;
        for (Eigen::Index i = 0; i < s.u.size(); ++i) {
            if (s.u[i] <= 0.5 * r.max_u) continue;
            const double m = std::abs(rule.weights[i]) * s.u[i];
            r.centroid += m * mesh.nodes.points[i];
            mass += m;
            ++r.active;
        }
        if (mass > 0.0) r.centroid /= mass;
    }
    return r;
}

}  // namespace

ShowcaseResult showcase(const ShowcaseConfig& c) {
    if (c.scenario != "labyrinth" && c.scenario != "spot" && c.scenario != "cortex")
        throw InvalidInput("unknown scenario '" + c.scenario + "' (labyrinth, spot, cortex)");
    check_compatibility(c.rbf.phs, PolySpec::make(c.rbf.deg, 2), c.rbf.k);
    if (!(c.dt > 0.0) || !(c.T >= 0.0)) throw InvalidInput("showcase needs dt > 0 and T >= 0");

    ShowcaseResult res;
    res.scenario = c.scenario;
    SurfaceMesh base;
    if (c.scenario == "cortex") {
        if (c.mesh_path.empty()) throw InvalidInput("the cortex scenario needs a mesh path");
        res.mesh = read_surface_mesh(c.mesh_path);
        base = res.mesh;
    } else {
        base = gen_sphere_geodesic(c.frequency);
        if (c.scenario == "labyrinth") {
            if (!(c.gamma >= 0.0 && c.gamma < 1.0)) throw InvalidInput("labyrinth gamma must lie in [0, 1)");
            res.mesh = project_to_implicit(base, DeformedSphere{c.gamma});
        } else {
            BumpySphere bumpy;
            bumpy.centers = gen_bump_centers(c.bumps, c.seed);
            res.mesh = project_to_implicit(base, bumpy);
        }
    }
    consistent_normals(res.mesh);
    log_info("showcase " + c.scenario + ": " + std::to_string(res.mesh.nodes.size()) + " nodes");
    res.rule = assemble_surface_rule(res.mesh, c.rbf);

    KernelSpec kernel = c.kernel;
    std::shared_ptr<const Eigen::MatrixXd> dist;
    if (kernel.distance == DistanceKind::geodesic || c.scenario == "spot") {
        dist = std::make_shared<Eigen::MatrixXd>(geodesic_matrix_cached(res.mesh, c.geodesic_cache));
        if (kernel.distance == DistanceKind::geodesic) kernel.geodesic = dist;
    }
    NeuralFieldModel model;
    model.firing = c.firing;
    model.depression = c.depression;
    model.weights = kernel_matrix(res.mesh.nodes.points, res.rule.weights, kernel);
    const SimState initial = showcase_initial(c, res.mesh, base, dist ? *dist : Eigen::MatrixXd(), model);

    const bool write = !c.out_dir.empty();
    auto write_frame = [&](const std::string& name, const SimState& s) {
        std::vector<ScalarField> fields{{"u", std::vector<double>(s.u.data(), s.u.data() + s.u.size())}};
        if (s.q.size()) fields.push_back({"q", std::vector<double>(s.q.data(), s.q.data() + s.q.size())});
        write_vtk(c.out_dir / name, res.mesh, fields);
        ++res.frames;
    };
    res.final_state = initial;
    try {
        integrate(model, initial, c.T, c.dt, c.stride, [&](long step, const SimState& s) {
            res.final_state = s;
            res.rows.push_back(summarize(step, s, res.mesh, res.rule));
            if (write) {
                char name[32];
                std::snprintf(name, sizeof name, "frame_%06ld.vtk", step);
                write_frame(name, s);
            }
        });
        res.completed = true;
    } catch (const NumericalError& e) {
        res.failure = e.what();
        log_warning("showcase " + c.scenario + " stopped: " + res.failure);
        if (write) write_frame("frame_last_good.vtk", res.final_state);
    }
    if (res.rows.size() >= 2) {
        const Vec3 a = res.rows.front().centroid, b = res.rows.back().centroid;
        if (a.norm() > 0.0 && b.norm() > 0.0)
            res.centroid_travel = std::acos(std::clamp(a.normalized().dot(b.normalized()), -1.0, 1.0));
    }
    if (write) write_showcase_summary(c.out_dir / "summary.csv", res);
    return res;
}

void write_showcase_summary(const std::filesystem::path& path, const ShowcaseResult& result) {
    std::ofstream os = open_output(path);
    os << "step,t,min_u,max_u,min_q,max_q,cx,cy,cz,active\n";
    for (const auto& r : result.rows)
        os << r.step << ',' << r.t << ',' << r.min_u << ',' << r.max_u << ',' << r.min_q << ',' << r.max_q << ','
           << r.centroid.x() << ',' << r.centroid.y() << ',' << r.centroid.z() << ',' << r.active << '\n';
}

}  // namespace nfrbf
