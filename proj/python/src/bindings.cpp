// Python module _core: array-in, array-out wrappers around the library.

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "nfrbf/config.hpp"
#include "nfrbf/delaunay.hpp"
#include "nfrbf/error.hpp"
#include "nfrbf/harness.hpp"
#include "nfrbf/mesh_io.hpp"
#include "nfrbf/quad_surface.hpp"

namespace py = pybind11;
using namespace nfrbf;

namespace {

using Points = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Triangles = Eigen::Matrix<int, Eigen::Dynamic, 3, Eigen::RowMajor>;

Points to_array(const std::vector<Vec3>& pts, int dim) {
    Points out(static_cast<Eigen::Index>(pts.size()), dim);
    for (std::size_t i = 0; i < pts.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = pts[i].head(dim).transpose();
    return out;
}

Triangles to_array(const std::vector<Tri>& tris) {
    Triangles out(static_cast<Eigen::Index>(tris.size()), 3);
    for (std::size_t t = 0; t < tris.size(); ++t)
        for (int e = 0; e < 3; ++e) out(static_cast<Eigen::Index>(t), e) = tris[t][e];
    return out;
}

std::vector<Vec3> from_array(const Points& pts) {
    if (pts.cols() != 2 && pts.cols() != 3) throw InvalidInput("points must have 2 or 3 columns");
    std::vector<Vec3> out(static_cast<std::size_t>(pts.rows()), Vec3::Zero());
    for (Eigen::Index i = 0; i < pts.rows(); ++i) out[static_cast<std::size_t>(i)].head(pts.cols()) = pts.row(i).transpose();
    return out;
}

SurfaceMesh surface_from(const Points& pts, const Triangles& tris) {
    if (pts.cols() != 3) throw InvalidInput("surface points must have 3 columns");
    SurfaceMesh m;
    m.nodes.dim = 3;
    m.nodes.points = from_array(pts);
    m.nodes.boundary.assign(m.nodes.points.size(), false);
    const int n = static_cast<int>(m.nodes.points.size());
    for (Eigen::Index t = 0; t < tris.rows(); ++t) {
        Tri tri{tris(t, 0), tris(t, 1), tris(t, 2)};
        for (int v : tri)
            if (v < 0 || v >= n) throw InvalidInput("triangle index out of range");
        m.triangles.push_back(tri);
    }
    consistent_normals(m);
    return m;
}

py::tuple surface_tuple(const SurfaceMesh& m) { return py::make_tuple(to_array(m.nodes.points, 3), to_array(m.triangles)); }

RbfParams rbf_params(int phs, int deg, std::optional<int> k) {
    RbfParams p{{phs}, deg, k.value_or(default_stencil_size(deg))};
    check_compatibility(p.phs, PolySpec::make(deg, 2), p.k);
    return p;
}

py::dict rule_dict(const QuadratureRule& rule) {
    py::dict d;
    d["weights"] = Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(rule.weights.data(), static_cast<Eigen::Index>(rule.size())));
    d["domain_measure"] = rule.domain_measure;
    d["sum"] = rule.sum();
    d["stability"] = rule.stability();
    d["negative_count"] = rule.negative_count();
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Neural fields on flat domains and closed surfaces with RBF quadrature";

    // InvalidInput derives from both Error and ValueError
    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    const py::tuple invalid_bases = py::make_tuple(base, py::handle(PyExc_ValueError));
    py::register_exception<InvalidInput>(m, "InvalidInput", invalid_bases.ptr());
    py::register_exception<DegenerateGeometry>(m, "DegenerateGeometry", base.ptr());
    py::register_exception<NumericalError>(m, "NumericalError", base.ptr());

    // --- node sets and meshes
    m.def(
        "square_nodes",
        [](int n, const std::string& kind, std::uint64_t seed, double lo, double hi) {
            SquareNodeOptions opt;
            if (kind == "regular")
                opt.kind = SquareNodeKind::regular;
            else if (kind != "repulsion")
                throw InvalidInput("kind must be regular or repulsion");
            opt.n_target = n;
            opt.seed = seed;
            opt.lo = lo;
            opt.hi = hi;
            return to_array(gen_nodes_square(opt).points, 2);
        },
        py::arg("n"), py::arg("kind") = "repulsion", py::arg("seed") = 0, py::arg("lo") = 0.0, py::arg("hi") = 1.0,
        "Node set on the square [lo, hi]^2 as an (n, 2) array.");
    m.def(
        "delaunay", [](const Points& pts) {
            NodeSet nodes;
            nodes.points = from_array(pts);
            nodes.boundary.assign(nodes.points.size(), false);
            return to_array(delaunay(nodes).triangles);
        },
        py::arg("points"), "Counter-clockwise Delaunay triangles of planar points.");
    m.def(
        "sphere_mesh", [](int level) { return surface_tuple(gen_sphere_icosahedral(level)); }, py::arg("level"),
        "Icosahedral unit sphere (points, triangles) with 10 * 4^level + 2 nodes.");
    m.def(
        "torus_mesh", [](int n) { return surface_tuple(gen_nodes_torus_spiral(n)); }, py::arg("n"),
        "Torus with R = 3, r = 1 and about n nodes.");
    m.def(
        "cyclide_mesh", [](int n) { return surface_tuple(gen_cyclide_mesh(CyclideParams{}, n)); }, py::arg("n"),
        "Ring cyclide with about n nodes.");
    m.def(
        "deformed_sphere_mesh",
        [](double gamma, int frequency) {
            return surface_tuple(project_to_implicit(gen_sphere_geodesic(frequency), DeformedSphere{gamma}));
        },
        py::arg("gamma"), py::arg("frequency") = 20, "Deformed sphere on a geodesic grid of 10 f^2 + 2 nodes.");
    m.def(
        "read_mesh", [](const std::filesystem::path& p) { return surface_tuple(read_surface_mesh(p)); }, py::arg("path"),
        "Reads an OFF or OBJ surface.");

    // --- quadrature
    m.def(
        "flat_weights",
        [](const Points& pts, int phs, int deg, std::optional<int> k) {
            const RbfParams params = rbf_params(phs, deg, k);
            NodeSet nodes;
            nodes.points = from_array(pts);
            nodes.boundary.assign(nodes.points.size(), false);
            return rule_dict(assemble_rule(delaunay(nodes), params));
        },
        py::arg("points"), py::arg("phs") = 3, py::arg("deg") = 3, py::arg("k") = py::none(),
        "Quadrature rule over the convex hull of planar points: dict with weights, sum, stability.");
    m.def(
        "surface_weights",
        [](const Points& pts, const Triangles& tris, int phs, int deg, std::optional<int> k) {
            const RbfParams params = rbf_params(phs, deg, k);
            return rule_dict(assemble_surface_rule(surface_from(pts, tris), params));
        },
        py::arg("points"), py::arg("triangles"), py::arg("phs") = 3, py::arg("deg") = 3, py::arg("k") = py::none(),
        "Quadrature rule on a closed triangulated surface.");
    m.def(
        "test_function",
        [](const std::string& name, const Points& pts) {
            const TestFunction fn = parse_test_function(name);
            const auto xs = from_array(pts);
            Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
            for (std::size_t i = 0; i < xs.size(); ++i) v[static_cast<Eigen::Index>(i)] = eval_test_function(fn, xs[i]);
            return v;
        },
        py::arg("name"), py::arg("points"), "Built-in test function evaluated at each row.");
    m.def(
        "exact_integral",
        [](const std::string& domain, const std::string& fn) {
            QuadDomain d;
            d.kind = parse_domain(domain);
            return exact_integral(d, parse_test_function(fn));
        },
        py::arg("domain"), py::arg("fn"), "Reference integral of a test function.");
    m.def("fit_rate", [](const std::vector<std::pair<double, double>>& pts) { return fit_rate(pts); }, py::arg("h_error"),
          "Least-squares slope of log(error) against log(h).");

    // --- neural fields
    m.def(
        "firing_rate",
        [](const Eigen::VectorXd& u, const std::string& kind, double a, double b) {
            FiringRate f = kind == "sigmoid" ? FiringRate::sigmoid(a, b)
                           : kind == "spline" ? FiringRate::smooth_spline(a, b)
                                              : throw InvalidInput("kind must be sigmoid or spline");
            return Eigen::VectorXd(u.unaryExpr([&](double x) { return f(x); }));
        },
        py::arg("u"), py::arg("kind") = "sigmoid", py::arg("a") = 5.0, py::arg("b") = 0.5,
        "Firing rate: sigmoid(gain=a, threshold=b) or smooth spline (lo=a, hi=b).");
    m.def(
        "integrate_ab5",
        [](const std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>& f, const Eigen::VectorXd& y0, double t0,
           double T, double dt) {
            const OdeRhs rhs = [&](double t, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
                dy = f(t, y);
                if (dy.size() != y.size()) throw InvalidInput("right-hand side changed the state size");
            };
            return integrate_ab5(rhs, y0, t0, T, dt);
        },
        py::arg("f"), py::arg("y0"), py::arg("t0"), py::arg("T"), py::arg("dt"),
        "Fifth-order Adams-Bashforth solution of y' = f(t, y) at t0 + T.");
    m.def(
        "manufactured_error",
        [](const std::string& domain, int degree, int n, std::uint64_t seed, double dt, double T,
           std::optional<double> sigma_w) {
            NfRun run;
            if (domain == "torus")
                run.domain = NfDomain::torus;
            else if (domain != "flat")
                throw InvalidInput("domain must be flat or torus");
            run.degree = degree;
            run.n = n;
            run.seed = seed;
            run.dt = dt;
            run.T = T;
            if (sigma_w) run.solution.sigma_w = *sigma_w;
            rbf_params(run.phs, degree, run.k);
            return nf_error(run).rel_error;
        },
        py::arg("domain") = "flat", py::arg("degree") = 3, py::arg("n") = 1000, py::arg("seed") = 0,
        py::arg("dt") = 1e-3, py::arg("T") = 0.1, py::arg("sigma_w") = py::none(),
        "Final-time relative max-norm error of the manufactured neural-field solution.");
    m.def(
        "simulate",
        [](const std::filesystem::path& config, std::optional<std::filesystem::path> out_dir, std::optional<double> T) {
            ShowcaseConfig c = showcase_from_ini(IniFile::load(config), config.parent_path());
            if (out_dir) c.out_dir = *out_dir;
            if (T) c.T = *T;
            ShowcaseResult r;
            {
                py::gil_scoped_release release;
                r = showcase(c);
            }
            py::dict d;
            d["completed"] = r.completed;
            d["failure"] = r.failure;
            d["frames"] = r.frames;
            d["centroid_travel"] = r.centroid_travel;
            d["n"] = r.mesh.nodes.size();
            d["u"] = r.final_state.u;
            if (r.final_state.q.size() > 0) d["q"] = r.final_state.q;
            d["max_u"] = r.rows.empty() ? 0.0 : r.rows.back().max_u;
            return d;
        },
        py::arg("config"), py::arg("out_dir") = py::none(), py::arg("T") = py::none(),
        "Runs a showcase configuration file; returns a summary dict.");
}
