// Command-line front end. Exit codes: 0 success, 1 numerical or I/O failure, 2 usage error.

#include <cstdio>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"
#include "nfrbf/config.hpp"
#include "nfrbf/delaunay.hpp"
#include "nfrbf/error.hpp"
#include "nfrbf/harness.hpp"
#include "nfrbf/log.hpp"
#include "nfrbf/mesh_io.hpp"
#include "nfrbf/vtk.hpp"

using namespace nfrbf;

namespace {

constexpr double kPi = std::numbers::pi;

struct DomainArgs {
    std::string domain = "unit-square";
    std::string kind = "repulsion";
    int n = 2000;
    int level = 4;
    int frequency = 20;
    double gamma = 0.0;
    int bumps = 100;
    std::string mesh;
    std::uint64_t seed = 0;
};

struct RbfArgs {
    int phs = 3;
    int deg = 3;
    int k = 0;  // 0: default for the degree
    RbfParams params() const { return {{phs}, deg, k > 0 ? k : default_stencil_size(deg)}; }
};

void add_domain_options(CLI::App* app, DomainArgs& d) {
    app->add_option("--domain", d.domain,
                    "unit-square, square-2pi, torus, sphere, cyclide, deformed-sphere, bumpy-sphere or mesh")
        ->capture_default_str();
    app->add_option("--kind", d.kind, "square nodes: regular or repulsion")->capture_default_str();
    app->add_option("--n", d.n, "target node count (square, torus, cyclide)")->capture_default_str();
    app->add_option("--level", d.level, "icosahedral refinement level (sphere)")->capture_default_str();
    app->add_option("--frequency", d.frequency, "geodesic frequency (deformed and bumpy spheres)")
        ->capture_default_str();
    app->add_option("--gamma", d.gamma, "deformation in [0, 1) (deformed-sphere)")->capture_default_str();
    app->add_option("--bumps", d.bumps, "bump count (bumpy-sphere)")->capture_default_str();
    app->add_option("--mesh", d.mesh, "OFF or OBJ surface (domain mesh)");
    app->add_option("--seed", d.seed, "random seed")->capture_default_str();
}

void add_rbf_options(CLI::App* app, RbfArgs& r) {
    app->add_option("--phs", r.phs, "polyharmonic spline order")->capture_default_str();
    app->add_option("--deg", r.deg, "appended polynomial degree")->capture_default_str();
    app->add_option("--k", r.k, "stencil size (default 21, or 32 for degree 4)");
}

SquareNodeKind parse_kind(const std::string& s) {
    if (s == "regular") return SquareNodeKind::regular;
    if (s == "repulsion" || s == "random") return SquareNodeKind::repulsion;
    throw InvalidInput("--kind must be regular or repulsion");
}

DomainMesh build_mesh(const DomainArgs& d) {
    DomainMesh m;
    if (d.domain == "unit-square" || d.domain == "square-2pi") {
        SquareNodeOptions opt;
        opt.kind = parse_kind(d.kind);
        opt.n_target = d.n;
        opt.seed = d.seed;
        if (d.domain == "square-2pi") {
            opt.lo = -kPi;
            opt.hi = kPi;
        }
        m.planar = delaunay(gen_nodes_square(opt));
        return m;
    }
    if (d.domain == "torus") {
        m.surface = gen_nodes_torus_spiral(d.n);
    } else if (d.domain == "sphere") {
        m.surface = gen_sphere_icosahedral(d.level);
    } else if (d.domain == "cyclide") {
        m.surface = gen_cyclide_mesh(CyclideParams{}, d.n);
    } else if (d.domain == "deformed-sphere") {
        if (!(d.gamma >= 0.0 && d.gamma < 1.0)) throw InvalidInput("--gamma must lie in [0, 1)");
        m.surface = project_to_implicit(gen_sphere_geodesic(d.frequency), DeformedSphere{d.gamma});
    } else if (d.domain == "bumpy-sphere") {
        BumpySphere b;
        b.centers = gen_bump_centers(d.bumps, d.seed);
        m.surface = project_to_implicit(gen_sphere_geodesic(d.frequency), b);
    } else if (d.domain == "mesh") {
        if (d.mesh.empty()) throw InvalidInput("--domain mesh needs --mesh");
        m.surface = read_surface_mesh(d.mesh);
    } else {
        throw InvalidInput("unknown domain '" + d.domain + "'");
    }
    consistent_normals(*m.surface);
    return m;
}

std::string describe(const DomainArgs& d) {
    std::ostringstream os;
    os << "domain=" << d.domain << " kind=" << d.kind << " n=" << d.n << " level=" << d.level
       << " frequency=" << d.frequency << " gamma=" << d.gamma << " bumps=" << d.bumps << " mesh=" << d.mesh
       << " seed=" << d.seed;
    return os.str();
}

std::string describe(const RbfArgs& r) {
    const RbfParams p = r.params();
    return "phs=" + std::to_string(p.phs.order) + " deg=" + std::to_string(p.deg) + " k=" + std::to_string(p.k);
}

void validate(const RbfArgs& r) {
    const RbfParams p = r.params();
    check_compatibility(p.phs, PolySpec::make(p.deg, 2), p.k);
}

// Comma-separated integer lists such as "2,3,4".
template <class T>
std::vector<T> parse_list(const std::string& s, const char* what) {
    std::vector<T> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const long long v = std::stoll(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(static_cast<T>(v));
        } catch (const std::exception&) {
            throw InvalidInput(std::string(what) + ": '" + item + "' is not an integer");
        }
    }
    if (out.empty()) throw InvalidInput(std::string(what) + " is empty");
    return out;
}

void log_config(const std::string& command, const std::string& text) {
    if (verbosity() >= 1) std::cerr << "nfrbf " << command << ": " << text << '\n';
}

void print_report(const ConvergenceReport& r) {
    std::cout << std::setprecision(6);
    for (const auto& [deg, slope] : r.slopes) std::cout << "degree " << deg << ": slope " << slope << '\n';
    for (const auto& note : r.notes) std::cout << "note: " << note << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Neural-field simulation with RBF quadrature on flat domains and closed surfaces"};
    app.require_subcommand(1);
    app.fallthrough();
    int verbose = 0;
    bool quiet = false;
    app.add_flag("-v,--verbose", verbose, "progress messages (repeatable)");
    app.add_flag("-q,--quiet", quiet, "suppress warnings and the configuration line");

    DomainArgs dom;
    RbfArgs rbf;
    std::string out, summary, fn = "const-one", degrees = "2,3,4", resolutions, seeds = "0", diagnostics, config;
    std::string scenario;
    double sigma = 0.1, dt = 1e-3, T = 0.1;
    int grid = 100;

    auto* nodes = app.add_subcommand("nodes", "generate a node set (CSV)");
    add_domain_options(nodes, dom);
    nodes->add_option("--out", out, "output CSV")->required();

    auto* mesh = app.add_subcommand("mesh", "generate a triangulated domain (OFF)");
    add_domain_options(mesh, dom);
    mesh->add_option("--out", out, "output OFF")->required();

    auto* weights = app.add_subcommand("weights", "compute quadrature weights (rule CSV plus JSON sidecar)");
    add_domain_options(weights, dom);
    add_rbf_options(weights, rbf);
    weights->add_option("--out", out, "output rule CSV")->required();
    weights->add_option("--diagnostics", diagnostics, "per-element surface diagnostics CSV");

    auto* quad = app.add_subcommand("quad", "integrate a built-in test function");
    add_domain_options(quad, dom);
    add_rbf_options(quad, rbf);
    quad->add_option("--fn", fn, "test function")->capture_default_str();

    auto* emap = app.add_subcommand("error-map", "spatial error of Gaussian test functions on the unit square");
    add_domain_options(emap, dom);
    add_rbf_options(emap, rbf);
    emap->add_option("--sigma", sigma, "Gaussian width")->capture_default_str();
    emap->add_option("--grid", grid, "centres per direction")->capture_default_str();
    emap->add_option("--out", out, "output CSV")->required();

    auto* cq = app.add_subcommand("converge-quad", "quadrature convergence sweep");
    cq->add_option("--domain", dom.domain, "unit-square, torus, sphere or cyclide")->capture_default_str();
    cq->add_option("--kind", dom.kind, "square nodes: regular or repulsion")->capture_default_str();
    cq->add_option("--fn", fn, "test function")->capture_default_str();
    cq->add_option("--deg", degrees, "comma-separated degrees")->capture_default_str();
    cq->add_option("--n", resolutions, "comma-separated resolutions (sphere: levels)");
    cq->add_option("--seeds", seeds, "comma-separated seeds (random square nodes)")->capture_default_str();
    cq->add_option("--phs", rbf.phs, "polyharmonic spline order")->capture_default_str();
    cq->add_option("--k", rbf.k, "stencil size (default per degree)");
    cq->add_option("--out", out, "report CSV");
    cq->add_option("--summary", summary, "slope summary CSV");

    auto* cnf = app.add_subcommand("converge-nf", "manufactured neural-field convergence sweep");
    cnf->add_option("--domain", dom.domain, "flat or torus")->capture_default_str();
    cnf->add_option("--deg", degrees, "comma-separated degrees")->capture_default_str();
    cnf->add_option("--n", resolutions, "comma-separated node counts");
    cnf->add_option("--seeds", seeds, "comma-separated seeds")->capture_default_str();
    cnf->add_option("--dt", dt, "time step")->capture_default_str();
    cnf->add_option("--T", T, "final time")->capture_default_str();
    cnf->add_option("--phs", rbf.phs, "polyharmonic spline order")->capture_default_str();
    cnf->add_option("--k", rbf.k, "stencil size (default per degree)");
    cnf->add_option("--out", out, "report CSV");
    cnf->add_option("--summary", summary, "slope summary CSV");

    auto* sim = app.add_subcommand("simulate", "run a showcase scenario (VTK frames plus summary CSV)");
    sim->add_option("--config", config, "ini configuration file");
    sim->add_option("--scenario", scenario, "labyrinth, spot or cortex (without --config)");
    sim->add_option("--out", out, "output directory (overrides the config)");
    sim->add_option("--T", T, "final time (overrides the config)");

    auto* info = app.add_subcommand("info", "print build information and built-in names");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }
    set_verbosity(quiet ? 0 : 1 + verbose);
    apply_thread_config();

    try {
        if (*info) {
            std::cout << "nfrbf 0.1.0\n";
#ifdef _OPENMP
            std::cout << "openmp: yes (NFRBF_THREADS=" << configured_threads() << ")\n";
#else
            std::cout << "openmp: no\n";
#endif
            std::cout << "test functions: chebyshev-product square-gaussian deg4-poly torus-sin const-one "
                         "sphere-poly trig-xyz\n";
            std::cout << "domains: unit-square square-2pi torus sphere cyclide deformed-sphere bumpy-sphere mesh\n";
            std::cout << "scenarios: labyrinth spot cortex\n";
            return 0;
        }
        if (*nodes || *mesh) {
            log_config(nodes->parsed() ? "nodes" : "mesh", describe(dom) + " out=" + out);
            const DomainMesh m = build_mesh(dom);
            if (*nodes) {
                write_nodes_csv(out, m.nodes());
            } else if (m.surface) {
                write_off(out, *m.surface);
            } else {
                SurfaceMesh flat;
                flat.nodes = m.planar->nodes;
                flat.triangles = m.planar->triangles;
                write_off(out, flat);
            }
            return 0;
        }
        if (*weights || *quad || *emap) {
            validate(rbf);
            const std::string name = weights->parsed() ? "weights" : quad->parsed() ? "quad" : "error-map";
            std::optional<TestFunction> f;
            if (*quad) f = parse_test_function(fn);
            if (*emap && dom.domain != "unit-square") throw InvalidInput("error-map works on the unit square");
            log_config(name, describe(dom) + " " + describe(rbf) + (f ? " fn=" + fn : "") + " out=" + out);
            const DomainMesh m = build_mesh(dom);
            SurfaceDiagnostics diag;
            const QuadratureRule rule =
                m.planar ? assemble_rule(*m.planar, rbf.params())
                         : assemble_surface_rule(*m.surface, rbf.params(), diagnostics.empty() ? nullptr : &diag);
            if (*weights) {
                write_rule(out, rule);
                if (!diagnostics.empty()) {
                    if (!m.surface) throw InvalidInput("--diagnostics applies to surface domains");
                    write_surface_diagnostics(diagnostics, diag);
                }
                std::cout << std::setprecision(17) << "nodes " << rule.size() << " sum " << rule.sum()
                          << " negative " << rule.negative_count() << " stability " << rule.stability() << '\n';
            } else if (*quad) {
                std::vector<double> values;
                for (const Vec3& x : m.nodes().points) values.push_back(eval_test_function(*f, x));
                const double q = apply_rule(rule, values);
                std::cout << std::setprecision(17) << "integral " << q << '\n';
                QuadDomain qd;
                const std::map<std::string, QuadDomainKind> known{{"unit-square", QuadDomainKind::unit_square},
                                                                   {"torus", QuadDomainKind::torus},
                                                                   {"sphere", QuadDomainKind::sphere},
                                                                   {"cyclide", QuadDomainKind::cyclide}};
                if (known.count(dom.domain)) {
                    qd.kind = known.at(dom.domain);
                    try {
                        const double exact = exact_integral(qd, *f);
                        std::cout << "exact " << exact << "\nrelative_error " << std::abs(q - exact) / std::abs(exact)
                                  << '\n';
                    } catch (const InvalidInput&) {
                        // no closed-form reference for this pairing
                    }
                }
            } else {
                const ErrorMap map = error_map(rule, m.nodes().points, sigma, grid);
                write_error_map(out, map);
                std::cout << std::setprecision(6) << "max_abs " << map.max_abs << " mean " << map.mean
                          << " both_signs " << (map.both_signs ? "yes" : "no") << '\n';
            }
            return 0;
        }
        if (*cq) {
            QuadSweep sweep;
            sweep.domain.kind = parse_domain(dom.domain);
            sweep.domain.nodes = parse_kind(dom.kind);
            sweep.fn = parse_test_function(fn);
            sweep.degrees = parse_list<int>(degrees, "--deg");
            if (!resolutions.empty()) {
                sweep.resolutions = parse_list<int>(resolutions, "--n");
            } else if (sweep.domain.kind == QuadDomainKind::sphere) {
                sweep.resolutions = {3, 4, 5, 6};
            } else if (sweep.domain.kind != QuadDomainKind::unit_square) {
                sweep.resolutions = {1024, 2048, 4096, 8192};
            }
            sweep.seeds = parse_list<std::uint64_t>(seeds, "--seeds");
            sweep.phs = rbf.phs;
            if (rbf.k > 0) sweep.k = rbf.k;
            for (int deg : sweep.degrees)
                check_compatibility({sweep.phs}, PolySpec::make(deg, 2), sweep.k.value_or(default_stencil_size(deg)));
            exact_integral(sweep.domain, sweep.fn);  // reject unsupported pairings before any work
            log_config("converge-quad", "kind=" + dom.kind + " fn=" + fn + " deg=" + degrees + " n=" + resolutions +
                                            " seeds=" + seeds + " out=" + out + " summary=" + summary);
            const ConvergenceReport r = quad_convergence(sweep);
            if (!out.empty()) write_report(out, r);
            if (!summary.empty()) write_slope_summary(summary, r);
            print_report(r);
            return 0;
        }
        if (*cnf) {
            NfSweep sweep;
            if (dom.domain == "flat" || dom.domain == "unit-square") {
                sweep.base.domain = NfDomain::flat;
            } else if (dom.domain == "torus") {
                sweep.base.domain = NfDomain::torus;
                sweep.resolutions = {1024, 2048, 4096};
            } else {
                throw InvalidInput("converge-nf --domain must be flat or torus");
            }
            sweep.degrees = parse_list<int>(degrees, "--deg");
            if (!resolutions.empty()) sweep.resolutions = parse_list<int>(resolutions, "--n");
            sweep.seeds = parse_list<std::uint64_t>(seeds, "--seeds");
            sweep.base.dt = dt;
            sweep.base.T = T;
            sweep.base.phs = rbf.phs;
            if (rbf.k > 0) sweep.base.k = rbf.k;
            for (int deg : sweep.degrees)
                check_compatibility({rbf.phs}, PolySpec::make(deg, 2), rbf.k > 0 ? rbf.k : default_stencil_size(deg));
            if (!(dt > 0.0) || !(T > 0.0)) throw InvalidInput("--dt and --T must be positive");
            log_config("converge-nf", "domain=" + dom.domain + " deg=" + degrees + " n=" + resolutions +
                                          " seeds=" + seeds + " dt=" + std::to_string(dt) + " T=" + std::to_string(T) +
                                          " out=" + out + " summary=" + summary);
            const ConvergenceReport r = nf_convergence(sweep);
            if (!out.empty()) write_report(out, r);
            if (!summary.empty()) write_slope_summary(summary, r);
            print_report(r);
            return 0;
        }
        if (*sim) {
            ShowcaseConfig c;
            if (!config.empty()) {
                if (!scenario.empty()) throw InvalidInput("use either --config or --scenario");
                const std::filesystem::path cfg(config);
                c = showcase_from_ini(IniFile::load(cfg), cfg.parent_path());
            } else if (!scenario.empty()) {
                c = showcase_defaults(scenario);
            } else {
                throw InvalidInput("simulate needs --config or --scenario");
            }
            if (!out.empty()) c.out_dir = out;
            if (sim->count("--T")) c.T = T;
            if (c.out_dir.empty()) throw InvalidInput("simulate needs an output directory");
            log_config("simulate", describe(c));
            const ShowcaseResult r = showcase(c);
            std::cout << "frames " << r.frames << " completed " << (r.completed ? "yes" : "no") << '\n';
            if (!r.rows.empty())
                std::cout << std::setprecision(6) << "final max_u " << r.rows.back().max_u << " min_u "
                          << r.rows.back().min_u << " active " << r.rows.back().active << " centroid_travel "
                          << r.centroid_travel << '\n';
            if (!r.completed) {
                std::cerr << "nfrbf: " << r.failure << '\n';
                return 1;
            }
            return 0;
        }
    } catch (const InvalidInput& e) {
        std::cerr << "nfrbf: invalid input: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "nfrbf: error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
