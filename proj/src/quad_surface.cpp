#include "nfrbf/quad_surface.hpp"

#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <limits>

#include "nfrbf/error.hpp"
#include "nfrbf/geometry.hpp"

namespace nfrbf {

void consistent_normals(SurfaceMesh& mesh) { orient_surface(mesh); }

Vec2 ElementFrame::plane_coords(const Vec3& x) const {
    const Vec3 d = x - origin;
    return {d.dot(e1), d.dot(e2)};
}

Vec3 ElementFrame::from_plane(const Vec2& xi) const { return origin + xi.x() * e1 + xi.y() * e2; }

ElementFrame element_frame(const SurfaceMesh& mesh, int triangle, double h) {
    if (mesh.normals.size() != mesh.triangles.size()) throw InvalidInput("element_frame: mesh has no normals");
    ElementFrame f;
    f.triangle = triangle;
    const auto& tri = mesh.triangles[triangle];
    const Vec3& v0 = mesh.nodes.points[tri[0]];
    const Vec3& v1 = mesh.nodes.points[tri[1]];
    f.origin = mesh.centroid(triangle);
    f.normal = mesh.normals[triangle];
    f.e1 = (v1 - v0).normalized();
    f.e2 = f.normal.cross(f.e1);
    f.projection = f.origin;
    f.central = false;
    f.condition = std::numeric_limits<double>::infinity();

    const auto& adj = mesh.adjacency[triangle];
    Eigen::Matrix3d a;
    Eigen::Vector3d b;
    for (int r = 0; r < 3; ++r) {
        if (adj[r] < 0) return f;
        const Vec3 dn = f.normal - mesh.normals[adj[r]];
        // edge r runs from tri[r] to tri[r+1]; tri[r] lies on both planes
        a.row(r) = dn.transpose();
        b[r] = dn.dot(mesh.nodes.points[tri[r]]);
    }
    const Eigen::JacobiSVD<Eigen::Matrix3d> svd(a);
    const auto& s = svd.singularValues();
    if (!(s[0] > 0.0)) return f;
    f.condition = s[2] > 0.0 ? s[0] / s[2] : std::numeric_limits<double>::infinity();
    if (f.condition > 1e8) return f;
    const Vec3 p = a.fullPivLu().solve(b);
    if (!p.allFinite() || (p - f.origin).norm() > 1e6 * h) return f;
    f.projection = p;
    f.central = true;
    return f;
}

std::optional<Vec2> node_preimage(const ElementFrame& f, const Vec3& x) {
    if (!f.central) return f.plane_coords(x);
    const Vec3 dir = x - f.projection;
    const double den = f.normal.dot(dir);
    const double num = f.normal.dot(f.origin - f.projection);
    if (std::abs(den) <= 1e-12 * dir.norm()) return std::nullopt;
    const double t = num / den;
    if (!(t > 0.0)) return std::nullopt;
    return f.plane_coords(f.projection + t * dir);
}

std::vector<double> local_jacobians(const SaddleSystem& planar, const std::vector<Vec3>& surface_points,
                                    int element) {
    const int k = planar.k();
    if (static_cast<int>(surface_points.size()) != k) throw InvalidInput("local_jacobians: size mismatch");
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(k + planar.p(), 3);
    for (int i = 0; i < k; ++i) rhs.row(i).head<3>() = surface_points[i].transpose();
    const Eigen::MatrixXd sol = planar.solve(rhs);
    std::array<LocalInterpolant, 3> coord;
    for (int a = 0; a < 3; ++a) coord[a] = {&planar, sol.col(a).head(k), sol.col(a).tail(planar.p())};
    std::vector<double> jac(k);
    for (int i = 0; i < k; ++i) {
        const Vec3 xi = planar.origin() + planar.scale() * planar.local_points()[i];
        Vec3 d1, d2;
        for (int a = 0; a < 3; ++a) {
            const Vec3 g = coord[a].grad(xi);
            d1[a] = g.x();
            d2[a] = g.y();
        }
        jac[i] = d1.cross(d2).norm();
        if (!(jac[i] > 0.0) || !std::isfinite(jac[i]))
            throw NumericalError("element " + std::to_string(element) + ": non-positive surface Jacobian");
    }
    return jac;
}

SurfaceElement surface_element(const SurfaceMesh& mesh, const KdTree& tree, int triangle, const RbfParams& params,
                               double h) {
    const PolySpec poly = PolySpec::make(params.deg, 2);
    SurfaceElement el;
    el.frame = element_frame(mesh, triangle, h);
    const auto& tri = mesh.triangles[triangle];
    const std::size_t n = tree.size();
    const std::size_t k = static_cast<std::size_t>(params.k);
    if (k > n) throw InvalidInput("stencil size exceeds the number of nodes");

    // nearest-first candidates; invalid pre-images are dropped and the stencil refilled
    std::size_t want = std::min(n, 2 * k);
    for (;;) {
        el.nodes.clear();
        el.preimages.clear();
        el.dropped = 0;
        for (int i : nearest_ordered(tree, el.frame.origin, want, &el.frame.e1)) {
            if (el.nodes.size() == k) break;
            std::optional<Vec2> xi;
            if (i == tri[0] || i == tri[1] || i == tri[2])
                xi = el.frame.plane_coords(mesh.nodes.points[i]);
            else
                xi = node_preimage(el.frame, mesh.nodes.points[i]);
            if (!xi) {
                ++el.dropped;
                continue;
            }
            el.nodes.push_back(i);
            el.preimages.push_back(*xi);
        }
        if (el.nodes.size() == k) break;
        if (want == n)
            throw DegenerateGeometry("element " + std::to_string(triangle) + ": only " +
                                     std::to_string(el.nodes.size()) + " nodes have valid pre-images");
        want = std::min(n, 2 * want);
    }

    std::vector<Vec3> planar(k), surface(k);
    for (std::size_t r = 0; r < k; ++r) {
        planar[r] = Vec3(el.preimages[r].x(), el.preimages[r].y(), 0.0);
        surface[r] = mesh.nodes.points[el.nodes[r]];
    }
    const SaddleSystem sys(planar, 2, params.phs, poly, triangle);
    el.condition = sys.condition();
    el.jacobians = local_jacobians(sys, surface, triangle);
    const auto corner = [&](int v) { return el.frame.plane_coords(mesh.nodes.points[tri[v]]); };
    el.planar_weights = element_weights(sys, corner(0), corner(1), corner(2));
    el.weights = el.planar_weights.cwiseProduct(Eigen::Map<const Eigen::VectorXd>(el.jacobians.data(), k));
    return el;
}

int SurfaceDiagnostics::fallback_count() const {
    int c = 0;
    for (char f : fallback) c += f != 0;
    return c;
}

QuadratureRule assemble_surface_rule(const SurfaceMesh& mesh, const RbfParams& params,
                                     SurfaceDiagnostics* diagnostics) {
    check_compatibility(params.phs, PolySpec::make(params.deg, 2), params.k);
    if (mesh.normals.size() != mesh.triangles.size() || mesh.adjacency.size() != mesh.triangles.size())
        throw InvalidInput("surface mesh must be oriented before assembling a rule");
    const KdTree tree(mesh.nodes.points, 3);
    const double h = covering_radius(mesh);
    const int m = static_cast<int>(mesh.triangles.size());
    std::vector<SurfaceElement> elements(m);
    std::vector<std::exception_ptr> errors(m);
#pragma omp parallel for schedule(dynamic, 16)
    for (int t = 0; t < m; ++t) {
        try {
            elements[t] = surface_element(mesh, tree, t, params, h);
        } catch (...) {
            errors[t] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    QuadratureRule rule;
    rule.weights.assign(mesh.nodes.size(), 0.0);
    for (const auto& el : elements)
        for (std::size_t r = 0; r < el.nodes.size(); ++r) rule.weights[el.nodes[r]] += el.weights[static_cast<Eigen::Index>(r)];
    rule.domain_measure = rule.sum();
    rule.phs_order = params.phs.order;
    rule.deg = params.deg;
    rule.k = params.k;
    rule.mesh_hash = mesh_hash(mesh);
    rule.domain = "surface";

    if (diagnostics) {
        SurfaceDiagnostics& d = *diagnostics;
        d = SurfaceDiagnostics{};
        for (const auto& el : elements) {
            d.fallback.push_back(el.frame.central ? 0 : 1);
            d.projection_condition.push_back(el.frame.condition);
            d.saddle_condition.push_back(el.condition);
            d.min_jacobian.push_back(*std::min_element(el.jacobians.begin(), el.jacobians.end()));
            d.negative_weights.push_back(static_cast<int>((el.weights.array() < 0.0).count()));
            d.dropped.push_back(el.dropped);
        }
    }
    return rule;
}

void write_surface_diagnostics(const std::filesystem::path& path, const SurfaceDiagnostics& d) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path);
    if (!os) throw Error("cannot write " + path.string());
    os << std::setprecision(17)
       << "element,fallback,projection_condition,saddle_condition,min_jacobian,negative_weights,dropped\n";
    for (std::size_t t = 0; t < d.fallback.size(); ++t)
        os << t << ',' << int(d.fallback[t]) << ',' << d.projection_condition[t] << ',' << d.saddle_condition[t] << ','
           << d.min_jacobian[t] << ',' << d.negative_weights[t] << ',' << d.dropped[t] << '\n';
}

}  // namespace nfrbf
