#include "nfrbf/rbf.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "nfrbf/error.hpp"
#include "nfrbf/log.hpp"

namespace nfrbf {

double phs_eval(int order, double r) {
    if (r <= 0.0) return 0.0;
    const double p = std::pow(r, order);
    return order % 2 == 1 ? p : p * std::log(r);
}

Vec3 phs_grad(int order, const Vec3& x, const Vec3& y) {
    const Vec3 diff = x - y;
    const double r = diff.norm();
    if (r <= 0.0) return Vec3::Zero();
    const double rl2 = std::pow(r, order - 2);
    const double factor = order % 2 == 1 ? order * rl2 : rl2 * (order * std::log(r) + 1.0);
    return factor * diff;
}

std::size_t poly_count(int deg, int dim) {
    std::size_t c = 1;
    for (int i = 1; i <= dim; ++i) c = c * static_cast<std::size_t>(deg + i) / static_cast<std::size_t>(i);
    return c;
}

PolySpec PolySpec::make(int deg, int dim) {
    if (deg < 0) throw InvalidInput("polynomial degree must be non-negative");
    if (dim != 2 && dim != 3) throw InvalidInput("polynomial dimension must be 2 or 3");
    PolySpec spec;
    spec.deg = deg;
    spec.dim = dim;
    for (int total = 0; total <= deg; ++total)
        for (int a = total; a >= 0; --a) {
            if (dim == 2) {
                spec.multi_indices.push_back({a, total - a, 0});
            } else {
                for (int b = total - a; b >= 0; --b) spec.multi_indices.push_back({a, b, total - a - b});
            }
        }
    return spec;
}

void check_compatibility(const PhsSpec& phs, const PolySpec& poly, int k) {
    if (phs.order < 1) throw InvalidInput("PHS order must be at least 1");
    if (poly.deg < phs.order / 2)
        throw InvalidInput("polynomial degree " + std::to_string(poly.deg) + " too low for PHS order " +
                           std::to_string(phs.order) + " (need deg >= " + std::to_string(phs.order / 2) + ")");
    if (k < 1 || static_cast<std::size_t>(k) < poly.count())
        throw InvalidInput("stencil size " + std::to_string(k) + " is smaller than the " + std::to_string(poly.count()) +
                           " polynomial terms of degree " + std::to_string(poly.deg));
}

double monomial(const std::array<int, 3>& alpha, const Vec3& x) {
    double v = 1.0;
    for (int a = 0; a < 3; ++a)
        for (int e = 0; e < alpha[a]; ++e) v *= x[a];
    return v;
}

// ---------------------------------------------------------------------------------------------

std::vector<int> nearest_ordered(const KdTree& tree, const Vec3& center, std::size_t count,
                                 const Vec3* tie_direction) {
    const std::size_t n = tree.size();
    std::size_t want = std::min(n, count + 8);
    for (;;) {
        std::vector<int> idx = tree.nearest(center, want);
        std::vector<double> d2(idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i) d2[i] = (tree.point(idx[i]) - center).squaredNorm();
        // a tie group reaching the end of the query may continue beyond it
        if (want < n && count > 0 && count <= idx.size() &&
            d2.back() - d2[count - 1] <= 1e-10 * d2.back()) {
            want = std::min(n, 2 * want);
            continue;
        }
        auto key = [&](std::size_t i) {
            return tie_direction ? -(tree.point(idx[i]) - center).dot(*tie_direction) : static_cast<double>(idx[i]);
        };
        std::vector<std::size_t> order(idx.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        const double tol = tie_direction ? 1e-10 : 0.0;
        std::size_t g = 0;
        while (g < order.size()) {
            std::size_t e = g + 1;
            while (e < order.size() && d2[e] - d2[g] <= tol * d2[e]) ++e;
            std::stable_sort(order.begin() + g, order.begin() + e, [&](std::size_t a, std::size_t b) {
                return key(a) < key(b);
            });
            g = e;
        }
        std::vector<int> out;
        out.reserve(count);
        for (std::size_t i = 0; i < std::min(count, order.size()); ++i) out.push_back(idx[order[i]]);
        return out;
    }
}

Stencil make_stencil(int element, const Vec3& center, const KdTree& tree, int k) {
    if (k < 1 || static_cast<std::size_t>(k) > tree.size())
        throw InvalidInput("stencil size " + std::to_string(k) + " exceeds the " + std::to_string(tree.size()) +
                           " available nodes");
    Stencil s;
    s.element = element;
    s.nodes = nearest_ordered(tree, center, static_cast<std::size_t>(k));
    Vec3 o = Vec3::Zero();
    for (int i : s.nodes) o += tree.point(i);
    s.origin = o / static_cast<double>(k);
    double r = 0.0;
    for (int i : s.nodes) r = std::max(r, (tree.point(i) - s.origin).norm());
    s.scale = r > 0.0 ? r : 1.0;
    return s;
}

std::vector<Stencil> build_stencils(const PlanarMesh& mesh, int k) {
    const KdTree tree(mesh.nodes.points, 2);
    std::vector<Stencil> out(mesh.triangles.size());
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        const Vec3 c = (mesh.nodes.points[tri[0]] + mesh.nodes.points[tri[1]] + mesh.nodes.points[tri[2]]) / 3.0;
        out[t] = make_stencil(static_cast<int>(t), c, tree, k);
    }
    return out;
}

std::vector<Stencil> build_stencils(const SurfaceMesh& mesh, int k) {
    const KdTree tree(mesh.nodes.points, 3);
    std::vector<Stencil> out(mesh.triangles.size());
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
        out[t] = make_stencil(static_cast<int>(t), mesh.centroid(t), tree, k);
    return out;
}

// ---------------------------------------------------------------------------------------------

namespace {

std::pair<Vec3, double> centroid_frame(const std::vector<Vec3>& points, int dim) {
    Vec3 o = Vec3::Zero();
    for (const auto& p : points) o += p;
    o /= static_cast<double>(std::max<std::size_t>(1, points.size()));
    if (dim == 2) o.z() = 0.0;
    double r = 0.0;
    for (const auto& p : points) {
        Vec3 d = p - o;
        if (dim == 2) d.z() = 0.0;
        r = std::max(r, d.norm());
    }
    return {o, r > 0.0 ? r : 1.0};
}

}  // namespace

SaddleSystem::SaddleSystem(const std::vector<Vec3>& points, int dim, const PhsSpec& phs, const PolySpec& poly,
                           int element)
    : SaddleSystem(points, dim, phs, poly, centroid_frame(points, dim).first, centroid_frame(points, dim).second,
                   element) {}

SaddleSystem::SaddleSystem(const std::vector<Vec3>& points, int dim, const PhsSpec& phs, const PolySpec& poly,
                           const Vec3& origin, double scale, int element)
    : dim_(dim), phs_(phs), poly_(poly), origin_(origin), scale_(scale), element_(element) {
    if (dim != 2 && dim != 3) throw InvalidInput("saddle system: dim must be 2 or 3");
    if (poly.dim != dim) throw InvalidInput("saddle system: polynomial dimension mismatch");
    if (!(scale > 0.0)) throw InvalidInput("saddle system: scale must be positive");
    check_compatibility(phs, poly, static_cast<int>(points.size()));
    local_.reserve(points.size());
    for (const auto& p : points) local_.push_back(to_local(p));
    assemble();
}

Vec3 SaddleSystem::to_local(const Vec3& x) const {
    Vec3 l = (x - origin_) / scale_;
    if (dim_ == 2) l.z() = 0.0;
    return l;
}

void SaddleSystem::assemble() {
    const int n = k(), q = p();
    m_ = Eigen::MatrixXd::Zero(n + q, n + q);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double v = phs_eval(phs_.order, (local_[i] - local_[j]).norm());
            m_(i, j) = v;
            m_(j, i) = v;
        }
        m_(i, i) = phs_eval(phs_.order, 0.0);
        for (int a = 0; a < q; ++a) {
            const double v = monomial(poly_.multi_indices[a], local_[i]);
            m_(i, n + a) = v;
            m_(n + a, i) = v;
        }
    }
    // the LU condition estimate can miss an exactly rank-deficient polynomial block
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m_.topRightCorner(n, q));
    const auto& sv = svd.singularValues();
    if (!(sv[q - 1] > 1e-12 * sv[0])) {
        std::ostringstream msg;
        msg << "element " << element_ << ": polynomial block is rank deficient (singular value ratio "
            << sv[q - 1] / sv[0] << "); nodes may be collinear";
        throw NumericalError(msg.str());
    }
    lu_.compute(m_);
    rcond_ = lu_.rcond();
    const double cond = condition();
    if (!(cond <= 1e14)) {
        std::ostringstream msg;
        msg << "element " << element_ << ": interpolation matrix is numerically singular (condition estimate "
            << cond << ")";
        throw NumericalError(msg.str());
    }
    if (cond > 1e12) {
        std::ostringstream msg;
        msg << "element " << element_ << ": ill-conditioned interpolation matrix (condition estimate " << cond << ")";
        log_warning(msg.str());
    }
}

Eigen::VectorXd SaddleSystem::solve(const Eigen::VectorXd& rhs) const { return lu_.solve(rhs); }

Eigen::MatrixXd SaddleSystem::solve(const Eigen::MatrixXd& rhs) const { return lu_.solve(rhs); }

Eigen::VectorXd SaddleSystem::basis_row(const Vec3& x) const {
    const Vec3 l = to_local(x);
    Eigen::VectorXd row(k() + p());
    for (int i = 0; i < k(); ++i) row[i] = phs_eval(phs_.order, (l - local_[i]).norm());
    for (int a = 0; a < p(); ++a) row[k() + a] = monomial(poly_.multi_indices[a], l);
    return row;
}

LocalInterpolant fit_local(const SaddleSystem& system, const Eigen::VectorXd& values) {
    if (values.size() != system.k())
        throw InvalidInput("fit_local: expected " + std::to_string(system.k()) + " values, got " +
                           std::to_string(values.size()));
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(system.k() + system.p());
    rhs.head(system.k()) = values;
    const Eigen::VectorXd sol = system.solve(rhs);
    LocalInterpolant s;
    s.system = &system;
    s.c = sol.head(system.k());
    s.d = sol.tail(system.p());
    return s;
}

double LocalInterpolant::eval(const Vec3& x) const {
    const Eigen::VectorXd row = system->basis_row(x);
    return row.head(system->k()).dot(c) + row.tail(system->p()).dot(d);
}

Vec3 LocalInterpolant::grad(const Vec3& x) const {
    const SaddleSystem& sys = *system;
    const Vec3 l = sys.to_local(x);
    Vec3 g = Vec3::Zero();
    for (int i = 0; i < sys.k(); ++i) g += c[i] * phs_grad(sys.phs().order, l, sys.local_points()[i]);
    for (int a = 0; a < sys.p(); ++a) {
        const auto& alpha = sys.poly().multi_indices[a];
        for (int axis = 0; axis < sys.dim(); ++axis) {
            if (alpha[axis] == 0) continue;
            auto lower = alpha;
            --lower[axis];
            g[axis] += d[a] * alpha[axis] * monomial(lower, l);
        }
    }
    if (sys.dim() == 2) g.z() = 0.0;
    return g / sys.scale();
}

// ---------------------------------------------------------------------------------------------

Projector::Projector(const PlanarMesh& mesh, const RbfParams& params) : mesh_(mesh) {
    const PolySpec poly = PolySpec::make(params.deg, 2);
    check_compatibility(params.phs, poly, params.k);
    const KdTree tree(mesh_.nodes.points, 2);
    const std::size_t n = mesh_.nodes.size();
    stencils_.reserve(n);
    systems_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        stencils_.push_back(make_stencil(static_cast<int>(i), mesh_.nodes.points[i], tree, params.k));
        std::vector<Vec3> pts;
        for (int j : stencils_.back().nodes) pts.push_back(mesh_.nodes.points[j]);
        systems_.emplace_back(pts, 2, params.phs, poly, stencils_.back().origin, stencils_.back().scale,
                              static_cast<int>(i));
    }
}

std::pair<int, Eigen::Vector3d> Projector::locate(const Vec2& x) const {
    const double tol = 1e-12;
    for (std::size_t t = 0; t < mesh_.triangles.size(); ++t) {
        const auto& tri = mesh_.triangles[t];
        const Vec2 a = mesh_.nodes.xy(tri[0]), b = mesh_.nodes.xy(tri[1]), c = mesh_.nodes.xy(tri[2]);
        const double area = signed_area(a, b, c);
        const Eigen::Vector3d bary(signed_area(x, b, c) / area, signed_area(a, x, c) / area,
                                   signed_area(a, b, x) / area);
        if (bary.minCoeff() >= -tol) return {static_cast<int>(t), bary};
    }
    return {-1, Eigen::Vector3d::Zero()};
}

double Projector::cell_value(int owner, const Eigen::VectorXd& values, const Vec2& x) const {
    const Stencil& s = stencils_[owner];
    Eigen::VectorXd local(static_cast<Eigen::Index>(s.nodes.size()));
    for (std::size_t i = 0; i < s.nodes.size(); ++i) local[static_cast<Eigen::Index>(i)] = values[s.nodes[i]];
    return fit_local(systems_[owner], local).eval(Vec3(x.x(), x.y(), 0.0));
}

double Projector::eval(const Eigen::VectorXd& values, const Vec2& x) const {
    if (values.size() != static_cast<Eigen::Index>(size()))
        throw InvalidInput("projector: value count does not match node count");
    const auto [t, bary] = locate(x);
    if (t < 0) throw InvalidInput("projector: point lies outside the triangulation");
    double v = 0.0;
    for (int r = 0; r < 3; ++r) {
        if (bary[r] == 0.0) continue;
        v += bary[r] * cell_value(mesh_.triangles[t][r], values, x);
    }
    return v;
}

double Projector::lagrange(int j, const Vec2& x) const {
    if (j < 0 || j >= static_cast<int>(size())) throw InvalidInput("projector: node index out of range");
    Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size()));
    e[j] = 1.0;
    return eval(e, x);
}

}  // namespace nfrbf
