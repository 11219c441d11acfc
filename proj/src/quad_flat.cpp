#include "nfrbf/quad_flat.hpp"

#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "json.hpp"
#include "nfrbf/error.hpp"

namespace nfrbf {

double QuadratureRule::sum() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

double QuadratureRule::abs_sum() const {
    double s = 0.0;
    for (double w : weights) s += std::abs(w);
    return s;
}

double QuadratureRule::stability() const { return (abs_sum() - sum()) / sum(); }

int QuadratureRule::negative_count() const {
    int c = 0;
    for (double w : weights) c += w < 0.0;
    return c;
}

double QuadratureRule::min_weight() const {
    double m = std::numeric_limits<double>::infinity();
    for (double w : weights) m = std::min(m, w);
    return m;
}

// ---------------------------------------------------------------------------------------------

namespace {

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

double ipow(double x, int e) {
    double v = 1.0;
    for (int i = 0; i < e; ++i) v *= x;
    return v;
}

}  // namespace

double tri_monomial_integral(int a, int b, const Vec2& p0, const Vec2& p1, const Vec2& p2) {
    if (a < 0 || b < 0) throw InvalidInput("monomial exponents must be non-negative");
    const double area = triangle_area(p0, p1, p2);
    const std::array<Vec2, 3> v{p0, p1, p2};
    // 2|T| a! b! / (a+b+2)! * sum over splits i0+i1+i2 = a, j0+j1+j2 = b of
    // prod_k C(i_k + j_k, i_k) x_k^i_k y_k^j_k
    double total = 0.0;
    for (int i0 = 0; i0 <= a; ++i0)
        for (int i1 = 0; i0 + i1 <= a; ++i1) {
            const int i2 = a - i0 - i1;
            const std::array<int, 3> ii{i0, i1, i2};
            for (int j0 = 0; j0 <= b; ++j0)
                for (int j1 = 0; j0 + j1 <= b; ++j1) {
                    const int j2 = b - j0 - j1;
                    const std::array<int, 3> jj{j0, j1, j2};
                    double term = 1.0;
                    for (int k = 0; k < 3; ++k)
                        term *= factorial(ii[k] + jj[k]) / (factorial(ii[k]) * factorial(jj[k])) *
                                ipow(v[k].x(), ii[k]) * ipow(v[k].y(), jj[k]);
                    total += term;
                }
        }
    return 2.0 * area * factorial(a) * factorial(b) / factorial(a + b + 2) * total;
}

namespace {

// integral of d * rho^(n-2) ds from the foot of the perpendicular, rho = sqrt(d^2 + s^2), n odd
double edge_antiderivative(int n, double d, double s) {
    double g = d * std::asinh(s / d);
    const double rho = std::hypot(d, s);
    for (int m = 3; m <= n; m += 2) g = d * s * std::pow(rho, m - 2) / (m - 1) + (m - 2.0) / (m - 1.0) * d * d * g;
    return g;
}

// signed integral over the triangle (c, p, q) in polar coordinates about c
double fan_integral(const Vec2& c, const Vec2& p, const Vec2& q, int order) {
    const Vec2 e = q - p;
    const double len = e.norm();
    if (len == 0.0) return 0.0;
    const Vec2 u = e / len;
    const Vec2 pc = p - c;
    const double cross = u.x() * pc.y() - u.y() * pc.x();
    const double d = std::abs(cross);
    // a sliver of height d contributes O(d len max Phi); below rounding level it is dropped
    if (d <= 1e-14 * std::max(len, pc.norm())) return 0.0;
    const double sign = cross > 0.0 ? -1.0 : 1.0;  // orientation of (c, p, q)
    const double sp = pc.dot(u);
    const double sq = sp + len;
    if (order % 2 == 1) {
        const int n = order + 2;
        return sign * (edge_antiderivative(n, d, sq) - edge_antiderivative(n, d, sp)) / n;
    }
    // F(rho) = int_0^rho r^(l+1) log r dr, integrated against d theta = d ds / rho^2
    const double l2 = order + 2.0;
    auto integrand = [&](double s) {
        const double rho2 = d * d + s * s;
        const double rho = std::sqrt(rho2);
        return std::pow(rho, l2) * (std::log(rho) / l2 - 1.0 / (l2 * l2)) * d / rho2;
    };
    const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, sp, sq, 12, 1e-12);
    return sign * v;
}

}  // namespace

double tri_phs_integral(const Vec2& center, const Vec2& p0, const Vec2& p1, const Vec2& p2, int order) {
    if (order < 1) throw InvalidInput("PHS order must be at least 1");
    const double orient = signed_area(p0, p1, p2);
    if (orient == 0.0) return 0.0;
    const double v = fan_integral(center, p0, p1, order) + fan_integral(center, p1, p2, order) +
                     fan_integral(center, p2, p0, order);
    return orient > 0.0 ? v : -v;
}

Eigen::VectorXd element_weights(const SaddleSystem& system, const Vec2& p0, const Vec2& p1, const Vec2& p2) {
    if (system.dim() != 2) throw InvalidInput("element_weights: system must be planar");
    auto local = [&](const Vec2& p) { return system.to_local(Vec3(p.x(), p.y(), 0.0)).head<2>().eval(); };
    const Vec2 a = local(p0), b = local(p1), c = local(p2);
    if (triangle_area(a, b, c) < 1e-14)
        throw DegenerateGeometry("element " + std::to_string(system.element()) + " is degenerate");
    const int k = system.k(), q = system.p();
    Eigen::VectorXd rhs(k + q);
    for (int i = 0; i < k; ++i) rhs[i] = tri_phs_integral(system.local_points()[i].head<2>(), a, b, c, system.phs().order);
    for (int j = 0; j < q; ++j) {
        const auto& alpha = system.poly().multi_indices[j];
        rhs[k + j] = tri_monomial_integral(alpha[0], alpha[1], a, b, c);
    }
    // the saddle matrix is symmetric, so the transposed solve is a plain solve
    const Eigen::VectorXd sol = system.solve(rhs);
    return sol.head(k) * (system.scale() * system.scale());
}

ElementWeights flat_element_weights(const PlanarMesh& mesh, const RbfParams& params) {
    const PolySpec poly = PolySpec::make(params.deg, 2);
    check_compatibility(params.phs, poly, params.k);
    ElementWeights out;
    out.stencils = build_stencils(mesh, params.k);
    const int m = static_cast<int>(mesh.triangles.size());
    out.weights.resize(m);
    out.condition.resize(m);
    std::vector<std::exception_ptr> errors(m);
#pragma omp parallel for schedule(dynamic, 32)
    for (int t = 0; t < m; ++t) {
        try {
            const Stencil& s = out.stencils[t];
            std::vector<Vec3> pts;
            pts.reserve(s.nodes.size());
            for (int i : s.nodes) pts.push_back(mesh.nodes.points[i]);
            const SaddleSystem sys(pts, 2, params.phs, poly, s.origin, s.scale, t);
            const auto& tri = mesh.triangles[t];
            out.weights[t] = element_weights(sys, mesh.nodes.xy(tri[0]), mesh.nodes.xy(tri[1]), mesh.nodes.xy(tri[2]));
            out.condition[t] = sys.condition();
        } catch (...) {
            errors[t] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

std::vector<double> accumulate_weights(std::size_t n, const std::vector<Stencil>& stencils,
                                       const std::vector<Eigen::VectorXd>& weights) {
    std::vector<double> w(n, 0.0);
    for (std::size_t t = 0; t < stencils.size(); ++t)
        for (std::size_t r = 0; r < stencils[t].nodes.size(); ++r)
            w[stencils[t].nodes[r]] += weights[t][static_cast<Eigen::Index>(r)];
    return w;
}

QuadratureRule assemble_rule(const PlanarMesh& mesh, const RbfParams& params) {
    const ElementWeights ew = flat_element_weights(mesh, params);
    QuadratureRule rule;
    rule.weights = accumulate_weights(mesh.nodes.size(), ew.stencils, ew.weights);
    rule.domain_measure = mesh.area();
    rule.phs_order = params.phs.order;
    rule.deg = params.deg;
    rule.k = params.k;
    rule.mesh_hash = mesh_hash(mesh);
    rule.domain = "flat";
    return rule;
}

double apply_rule(const QuadratureRule& rule, const Eigen::VectorXd& values) {
    if (values.size() != static_cast<Eigen::Index>(rule.size()))
        throw InvalidInput("apply_rule: " + std::to_string(values.size()) + " values for " +
                           std::to_string(rule.size()) + " weights");
    double s = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) s += rule.weights[i] * values[static_cast<Eigen::Index>(i)];
    return s;
}

double apply_rule(const QuadratureRule& rule, const std::vector<double>& values) {
    return apply_rule(rule, Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size())));
}

// ---------------------------------------------------------------------------------------------

void write_rule(const std::filesystem::path& path, const QuadratureRule& rule) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    {
        std::ofstream os(path);
        if (!os) throw Error("cannot write " + path.string());
        os << std::setprecision(17) << "node_index,weight\n";
        for (std::size_t i = 0; i < rule.size(); ++i) os << i << ',' << rule.weights[i] << '\n';
        if (!os) throw Error("write failed for " + path.string());
    }
    nlohmann::ordered_json meta;
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(rule.mesh_hash));
    meta["domain"] = rule.domain;
    meta["n"] = rule.size();
    meta["phs_order"] = rule.phs_order;
    meta["deg"] = rule.deg;
    meta["k"] = rule.k;
    meta["mesh_hash"] = hash;
    meta["domain_measure"] = rule.domain_measure;
    meta["weight_sum"] = rule.sum();
    meta["negative_weights"] = rule.negative_count();
    meta["min_weight"] = rule.min_weight();
    meta["stability"] = rule.stability();
    std::ofstream js(path.string() + ".json");
    if (!js) throw Error("cannot write " + path.string() + ".json");
    js << std::setprecision(17) << meta.dump(2) << '\n';
}

QuadratureRule read_rule(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw InvalidInput("cannot open " + path.string());
    std::string line;
    std::getline(is, line);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "node_index,weight") throw InvalidInput(path.string() + ": unexpected header '" + line + "'");
    QuadratureRule rule;
    while (std::getline(is, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw InvalidInput(path.string() + ": bad row '" + line + "'");
        const long idx = std::stol(line.substr(0, comma));
        if (idx != static_cast<long>(rule.weights.size()))
            throw InvalidInput(path.string() + ": node indices must be consecutive from 0");
        rule.weights.push_back(std::strtod(line.c_str() + comma + 1, nullptr));
    }
    std::ifstream js(path.string() + ".json");
    if (js) {
        const auto meta = nlohmann::json::parse(js);
        rule.domain = meta.value("domain", "");
        rule.phs_order = meta.value("phs_order", 3);
        rule.deg = meta.value("deg", 2);
        rule.k = meta.value("k", 21);
        rule.domain_measure = meta.value("domain_measure", rule.sum());
        rule.mesh_hash = std::stoull(meta.value("mesh_hash", std::string("0")), nullptr, 16);
    } else {
        rule.domain_measure = rule.sum();
    }
    return rule;
}

}  // namespace nfrbf
