#include "nfrbf/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <tuple>

#include <boost/math/tools/roots.hpp>

#include "nfrbf/delaunay.hpp"
#include "nfrbf/error.hpp"

namespace nfrbf {

namespace {

constexpr double kPi = std::numbers::pi;

// equally spaced nodes on the boundary of [lo, hi]^2, m segments per side, corners once
void add_square_boundary(NodeSet& nodes, double lo, double hi, int m) {
    const double side = hi - lo;
    for (int side_id = 0; side_id < 4; ++side_id)
        for (int i = 0; i < m; ++i) {
            const double t = lo + side * i / m;
            Vec3 p;
            switch (side_id) {
                case 0: p = {t, lo, 0.0}; break;
                case 1: p = {hi, t, 0.0}; break;
                case 2: p = {lo + hi - t, hi, 0.0}; break;
                default: p = {lo, lo + hi - t, 0.0}; break;
            }
            nodes.points.push_back(p);
            nodes.boundary.push_back(true);
        }
}

struct Polygon {
    std::vector<Vec2> v;
};

Polygon clip_halfplane(const Polygon& poly, int axis, double bound, bool keep_below) {
    Polygon out;
    const std::size_t n = poly.v.size();
    auto inside = [&](const Vec2& p) { return keep_below ? p[axis] <= bound : p[axis] >= bound; };
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = poly.v[i];
        const Vec2& b = poly.v[(i + 1) % n];
        const bool ia = inside(a), ib = inside(b);
        if (ia) out.v.push_back(a);
        if (ia != ib) {
            const double t = (bound - a[axis]) / (b[axis] - a[axis]);
            Vec2 p = a + t * (b - a);
            p[axis] = bound;
            out.v.push_back(p);
        }
    }
    return out;
}

Vec2 polygon_centroid(const Polygon& poly, const Vec2& fallback) {
    double a2 = 0.0;
    Vec2 c(0.0, 0.0);
    const std::size_t n = poly.v.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& p = poly.v[i];
        const Vec2& q = poly.v[(i + 1) % n];
        const double cr = p.x() * q.y() - q.x() * p.y();
        a2 += cr;
        c += (p + q) * cr;
    }
    if (std::abs(a2) < 1e-300) return fallback;
    return c / (3.0 * a2);
}

// one sweep of Lloyd relaxation restricted to interior nodes; Voronoi cells are clipped to
// the square
void lloyd_sweep(NodeSet& nodes, double lo, double hi) {
    const PlanarMesh mesh = delaunay(nodes);
    const std::size_t n = nodes.size();
    std::vector<std::vector<int>> incident(n);
    std::vector<Vec2> centers(mesh.triangles.size());
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        centers[t] = circumcenter(nodes.xy(tri[0]), nodes.xy(tri[1]), nodes.xy(tri[2]));
        for (int v : tri) incident[v].push_back(static_cast<int>(t));
    }
    std::vector<Vec3> moved = nodes.points;
    for (std::size_t i = 0; i < n; ++i) {
        if (nodes.boundary[i]) continue;
        const Vec2 x = nodes.xy(i);
        std::vector<std::pair<double, Vec2>> ring;
        for (int t : incident[i]) {
            const Vec2 d = centers[t] - x;
            ring.push_back({std::atan2(d.y(), d.x()), centers[t]});
        }
        std::sort(ring.begin(), ring.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        Polygon cell;
        for (const auto& r : ring) cell.v.push_back(r.second);
        cell = clip_halfplane(cell, 0, lo, false);
        cell = clip_halfplane(cell, 0, hi, true);
        cell = clip_halfplane(cell, 1, lo, false);
        cell = clip_halfplane(cell, 1, hi, true);
        const Vec2 c = polygon_centroid(cell, x);
        moved[i] = Vec3(c.x(), c.y(), 0.0);
    }
    nodes.points = std::move(moved);
}

}  // namespace

NodeSet gen_nodes_square(const SquareNodeOptions& opts) {
    if (opts.n_target < 16)
        throw InvalidInput("gen_nodes_square: n_target must be at least 16, got " + std::to_string(opts.n_target));
    if (!(opts.hi > opts.lo)) throw InvalidInput("gen_nodes_square: empty domain");
    const double lo = opts.lo, hi = opts.hi, side = hi - lo;

    NodeSet nodes;
    nodes.dim = 2;
    if (opts.kind == SquareNodeKind::regular) {
        const double s = side * std::sqrt(2.0 / (std::sqrt(3.0) * opts.n_target));
        const double dy = s * std::sqrt(3.0) / 2.0;
        const int m = std::max(2, static_cast<int>(std::lround(side / s)));
        add_square_boundary(nodes, lo, hi, m);
        const int rows = static_cast<int>(std::floor(side / dy));
        const double y0 = lo + 0.5 * (side - (rows - 1) * dy);
        const int cols = static_cast<int>(std::floor(side / s)) + 2;
        const double x0 = lo + 0.5 * (side - (cols - 1) * s) - 0.25 * s;
        const double margin = 0.45 * s;
        for (int j = 0; j < rows; ++j) {
            const double y = y0 + j * dy;
            if (y < lo + margin || y > hi - margin) continue;
            for (int i = 0; i < cols; ++i) {
                const double x = x0 + i * s + (j % 2 == 1 ? 0.5 * s : 0.0);
                if (x < lo + margin || x > hi - margin) continue;
                nodes.points.push_back({x, y, 0.0});
                nodes.boundary.push_back(false);
            }
        }
        return nodes;
    }

    const int m = std::max(2, static_cast<int>(std::lround(std::sqrt(static_cast<double>(opts.n_target)))));
    add_square_boundary(nodes, lo, hi, m);
    const int interior = opts.n_target - 4 * m;
    if (interior <= 0)
        throw InvalidInput("gen_nodes_square: n_target " + std::to_string(opts.n_target) +
                           " leaves no interior nodes");
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double pad = 0.25 * side / m;
    for (int i = 0; i < interior; ++i) {
        const double x = lo + pad + (side - 2 * pad) * unif(rng);
        const double y = lo + pad + (side - 2 * pad) * unif(rng);
        nodes.points.push_back({x, y, 0.0});
        nodes.boundary.push_back(false);
    }
    for (int sweep = 0; sweep < opts.relaxation_sweeps; ++sweep) lloyd_sweep(nodes, lo, hi);

    if (opts.cluster_boundary) {
        // monotone stretch of y that fixes the edges and compresses rows toward top and bottom
        constexpr double a = 0.3;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (nodes.boundary[i]) continue;
            const double t = (nodes.points[i].y() - lo) / side;
            nodes.points[i].y() = lo + side * (t - a * std::sin(2.0 * kPi * t) / (2.0 * kPi));
        }
    }
    return nodes;
}

double covering_radius(const PlanarMesh& mesh) {
    // hull edges are the edges used by a single triangle; with counter-clockwise triangles the
    // domain lies to their left
    std::map<std::pair<int, int>, int> count;
    for (const auto& t : mesh.triangles)
        for (int e = 0; e < 3; ++e) {
            const int a = t[e], b = t[(e + 1) % 3];
            ++count[{std::min(a, b), std::max(a, b)}];
        }
    std::vector<std::pair<Vec2, Vec2>> hull;
    for (const auto& t : mesh.triangles) {
        const bool ccw = signed_area(mesh.nodes.xy(t[0]), mesh.nodes.xy(t[1]), mesh.nodes.xy(t[2])) > 0.0;
        for (int e = 0; e < 3; ++e) {
            int a = t[e], b = t[(e + 1) % 3];
            if (count[{std::min(a, b), std::max(a, b)}] != 1) continue;
            if (!ccw) std::swap(a, b);
            hull.push_back({mesh.nodes.xy(a), mesh.nodes.xy(b)});
        }
    }
    // largest gap along each hull edge; nodes within rounding of a straight boundary count
    // as lying on it
    double radius = 0.0;
    for (const auto& [a, b] : hull) {
        const Vec2 e = b - a;
        const double len2 = e.squaredNorm();
        std::vector<double> ts{0.0, 1.0};
        for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
            const Vec2 d = mesh.nodes.xy(i) - a;
            const double t = d.dot(e) / len2;
            if (t <= 0.0 || t >= 1.0) continue;
            if ((d - t * e).squaredNorm() < 1e-18 * len2) ts.push_back(t);
        }
        std::sort(ts.begin(), ts.end());
        for (std::size_t k = 1; k < ts.size(); ++k) radius = std::max(radius, 0.5 * (ts[k] - ts[k - 1]) * std::sqrt(len2));
    }
    const double tol = 1e-12;
    for (const auto& t : mesh.triangles) {
        const Vec2 a = mesh.nodes.xy(t[0]), b = mesh.nodes.xy(t[1]), c = mesh.nodes.xy(t[2]);
        const Vec2 cc = circumcenter(a, b, c);
        bool inside = true;
        for (const auto& [p, q] : hull) {
            const Vec2 e = q - p;
            const double cross = e.x() * (cc.y() - p.y()) - e.y() * (cc.x() - p.x());
            if (cross < -tol * e.norm()) {
                inside = false;
                break;
            }
        }
        if (inside) radius = std::max(radius, (cc - a).norm());
    }
    return radius;
}

double covering_radius(const SurfaceMesh& mesh) {
    double radius = 0.0;
    for (const auto& t : mesh.triangles)
        radius = std::max(radius, circumradius(mesh.nodes.points[t[0]], mesh.nodes.points[t[1]], mesh.nodes.points[t[2]]));
    return radius;
}

double periodic_distance(const Vec2& x, const Vec2& y, double period) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j) best = std::min(best, (x - y + period * Vec2(i, j)).squaredNorm());
    return std::sqrt(best);
}

// ---------------------------------------------------------------------------------------------

Vec3 torus_map(double phi, double theta, const TorusParams& torus) {
    const double rho = torus.major + torus.minor * std::cos(theta);
    return {rho * std::cos(phi), rho * std::sin(phi), torus.minor * std::sin(theta)};
}

std::pair<double, double> torus_unmap(const Vec3& x, const TorusParams& torus) {
    const double planar = std::hypot(x.x(), x.y());
    const double off = std::hypot(planar - torus.major, x.z()) - torus.minor;
    if (std::abs(off) > 1e-8)
        throw InvalidInput("torus_unmap: point is " + std::to_string(off) + " away from the torus");
    return {std::atan2(x.y(), x.x()), std::atan2(x.z(), planar - torus.major)};
}

namespace {

// Staggered lattice on the periodic parameter square [-pi, pi)^2: `rings` rows of constant
// v, `per_ring` nodes each, odd rows shifted by half a spacing. Triangles are counter-
// clockwise in (u, v). Node (i, j) has index j * per_ring + i.
void staggered_lattice(int per_ring, int rings, std::vector<Vec2>& params, std::vector<Tri>& tris) {
    const double du = 2.0 * kPi / per_ring;
    const double dv = 2.0 * kPi / rings;
    params.clear();
    tris.clear();
    for (int j = 0; j < rings; ++j)
        for (int i = 0; i < per_ring; ++i)
            params.push_back({-kPi + (i + 0.5 * (j % 2)) * du, -kPi + j * dv});
    auto id = [&](int i, int j) { return ((j + rings) % rings) * per_ring + ((i + per_ring) % per_ring); };
    for (int j = 0; j < rings; ++j)
        for (int i = 0; i < per_ring; ++i) {
            if (j % 2 == 0) {
                tris.push_back({id(i, j), id(i + 1, j), id(i, j + 1)});
                tris.push_back({id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
            } else {
                tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
                tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
            }
        }
}

// ring and per-ring counts for an equilateral lattice on a periodic rectangle of lengths
// (lu, lv); rings is even so the stagger closes
std::pair<int, int> lattice_counts(double lu, double lv, int n_target) {
    const double s = std::sqrt(2.0 * lu * lv / (std::sqrt(3.0) * n_target));
    const int per_ring = std::max(3, static_cast<int>(std::lround(lu / s)));
    int rings = static_cast<int>(std::lround(lv / (s * std::sqrt(3.0) / 2.0)));
    rings = std::max(4, rings + (rings % 2));
    return {per_ring, rings};
}

SurfaceMesh finish_surface(std::vector<Vec3> points, std::vector<Tri> tris) {
    SurfaceMesh mesh;
    mesh.nodes.dim = 3;
    mesh.nodes.points = std::move(points);
    mesh.nodes.boundary.assign(mesh.nodes.points.size(), false);
    mesh.triangles = std::move(tris);
    orient_surface(mesh);
    return mesh;
}

}  // namespace

SurfaceMesh gen_nodes_torus_spiral(int n_target, const TorusParams& torus) {
    if (n_target < 100) throw InvalidInput("gen_nodes_torus_spiral: n_target must be at least 100");
    if (!(torus.major > torus.minor && torus.minor > 0.0)) throw InvalidInput("torus requires R > r > 0");
    const auto [per_ring, rings] = lattice_counts(2.0 * kPi * torus.major, 2.0 * kPi * torus.minor, n_target);
    std::vector<Vec2> params;
    std::vector<Tri> tris;
    staggered_lattice(per_ring, rings, params, tris);
    std::vector<Vec3> pts;
    pts.reserve(params.size());
    for (const auto& p : params) pts.push_back(torus_map(p.x(), p.y(), torus));
    return finish_surface(std::move(pts), std::move(tris));
}

// ---------------------------------------------------------------------------------------------

namespace {

void icosahedron(std::vector<Vec3>& pts, std::vector<Tri>& tris) {
    const double g = (1.0 + std::sqrt(5.0)) / 2.0;
    pts = {{-1, g, 0}, {1, g, 0}, {-1, -g, 0}, {1, -g, 0}, {0, -1, g}, {0, 1, g},
           {0, -1, -g}, {0, 1, -g}, {g, 0, -1}, {g, 0, 1}, {-g, 0, -1}, {-g, 0, 1}};
    for (auto& p : pts) p.normalize();
    tris = {{0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
            {11, 10, 2}, {10, 7, 6}, {7, 1, 8}, {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8},
            {3, 8, 9}, {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
    for (auto& t : tris) {
        const Vec3 c = pts[t[0]] + pts[t[1]] + pts[t[2]];
        if ((pts[t[1]] - pts[t[0]]).cross(pts[t[2]] - pts[t[0]]).dot(c) < 0.0) std::swap(t[1], t[2]);
    }
}

}  // namespace

SurfaceMesh gen_sphere_icosahedral(int level) {
    if (level < 0 || level > 9) throw InvalidInput("gen_sphere_icosahedral: level must be in [0, 9]");
    std::vector<Vec3> pts;
    std::vector<Tri> tris;
    icosahedron(pts, tris);
    for (int l = 0; l < level; ++l) {
        std::map<std::pair<int, int>, int> mid;
        auto midpoint = [&](int a, int b) {
            const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
            auto it = mid.find(key);
            if (it != mid.end()) return it->second;
            pts.push_back((pts[a] + pts[b]).normalized());
            const int id = static_cast<int>(pts.size()) - 1;
            mid.emplace(key, id);
            return id;
        };
        std::vector<Tri> next;
        next.reserve(4 * tris.size());
        for (const auto& t : tris) {
            const int ab = midpoint(t[0], t[1]), bc = midpoint(t[1], t[2]), ca = midpoint(t[2], t[0]);
            next.push_back({t[0], ab, ca});
            next.push_back({t[1], bc, ab});
            next.push_back({t[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        tris = std::move(next);
    }
    return finish_surface(std::move(pts), std::move(tris));
}

SurfaceMesh gen_sphere_geodesic(int frequency) {
    if (frequency < 1 || frequency > 200) throw InvalidInput("gen_sphere_geodesic: frequency must be in [1, 200]");
    std::vector<Vec3> corners;
    std::vector<Tri> faces;
    icosahedron(corners, faces);
    const int f = frequency;
    std::vector<Vec3> pts = corners;
    std::map<std::tuple<int, int, int>, int> edge_points;  // (lo corner, hi corner, steps from lo)
    std::vector<Tri> tris;
    for (const auto& face : faces) {
        // lattice point (i, j) = A + i/f (B - A) + j/f (C - A)
        std::vector<std::vector<int>> id(f + 1, std::vector<int>(f + 1, -1));
        for (int i = 0; i <= f; ++i)
            for (int j = 0; i + j <= f; ++j) {
                const int k = f - i - j;
                int corner = -1;
                if (i == f) corner = face[1];
                if (j == f) corner = face[2];
                if (k == f) corner = face[0];
                if (corner >= 0) {
                    id[i][j] = corner;
                    continue;
                }
                int a = -1, b = -1, steps = 0;  // edge from corner a toward b
                if (j == 0) a = face[0], b = face[1], steps = i;
                else if (i == 0) a = face[0], b = face[2], steps = j;
                else if (k == 0) a = face[1], b = face[2], steps = j;
                if (a >= 0) {
                    if (a > b) std::swap(a, b), steps = f - steps;
                    const auto key = std::make_tuple(a, b, steps);
                    auto it = edge_points.find(key);
                    if (it == edge_points.end()) {
                        pts.push_back((corners[a] * (f - steps) + corners[b] * steps).normalized());
                        it = edge_points.emplace(key, static_cast<int>(pts.size()) - 1).first;
                    }
                    id[i][j] = it->second;
                    continue;
                }
                const Vec3 p = corners[face[0]] * k + corners[face[1]] * i + corners[face[2]] * j;
                pts.push_back(p.normalized());
                id[i][j] = static_cast<int>(pts.size()) - 1;
            }
        for (int i = 0; i < f; ++i)
            for (int j = 0; i + j < f; ++j) {
                tris.push_back({id[i][j], id[i + 1][j], id[i][j + 1]});
                if (i + j + 1 < f) tris.push_back({id[i + 1][j], id[i + 1][j + 1], id[i][j + 1]});
            }
    }
    return finish_surface(std::move(pts), std::move(tris));
}

// ---------------------------------------------------------------------------------------------

double CyclideParams::b() const { return std::sqrt(a * a - c * c); }

CyclideParams make_cyclide(double a, std::optional<double> b, double c, double d) {
    if (!(a > c && c >= 0.0)) throw InvalidInput("cyclide: require a > c >= 0");
    if (!(d > c && d < a)) throw InvalidInput("cyclide: ring case requires c < d < a");
    CyclideParams p{a, c, d};
    if (b) {
        const double exact = p.b();
        if (std::abs(*b - exact) > 1e-2 * exact)
            throw InvalidInput("cyclide: b must equal sqrt(a^2 - c^2) = " + std::to_string(exact));
    }
    return p;
}

Vec3 cyclide_map(double u, double v, const CyclideParams& p) {
    const double b = p.b();
    const double cu = std::cos(u), su = std::sin(u), cv = std::cos(v), sv = std::sin(v);
    const double den = p.a - p.c * cu * cv;
    return {(p.d * (p.c - p.a * cu * cv) + b * b * cu) / den, b * su * (p.a - p.d * cv) / den,
            b * sv * (p.c * cu - p.d) / den};
}

std::pair<Vec3, Vec3> cyclide_tangents(double u, double v, const CyclideParams& p) {
    const double b = p.b();
    const double cu = std::cos(u), su = std::sin(u), cv = std::cos(v), sv = std::sin(v);
    const double den = p.a - p.c * cu * cv;
    const Vec3 num(p.d * (p.c - p.a * cu * cv) + b * b * cu, b * su * (p.a - p.d * cv), b * sv * (p.c * cu - p.d));
    const Vec3 num_u(p.d * p.a * su * cv - b * b * su, b * cu * (p.a - p.d * cv), -b * sv * p.c * su);
    const Vec3 num_v(p.d * p.a * cu * sv, b * su * p.d * sv, b * cv * (p.c * cu - p.d));
    const double den_u = p.c * su * cv;
    const double den_v = p.c * cu * sv;
    return {(num_u * den - num * den_u) / (den * den), (num_v * den - num * den_v) / (den * den)};
}

double cyclide_implicit(const Vec3& x, const CyclideParams& p) {
    const double b = p.b();
    const double s = x.squaredNorm() - p.d * p.d + b * b;
    const double t = p.a * x.x() - p.c * p.d;
    return s * s - 4.0 * t * t - 4.0 * b * b * x.y() * x.y();
}

SurfaceMesh gen_cyclide_mesh(const CyclideParams& params, int n_target) {
    if (n_target < 100) throw InvalidInput("gen_cyclide_mesh: n_target must be at least 100");
    make_cyclide(params.a, std::nullopt, params.c, params.d);
    // mean metric scale along each parameter sets the lattice aspect ratio
    constexpr int probe = 64;
    double su = 0.0, sv = 0.0;
    for (int i = 0; i < probe; ++i)
        for (int j = 0; j < probe; ++j) {
            const auto [tu, tv] = cyclide_tangents(-kPi + 2 * kPi * i / probe, -kPi + 2 * kPi * j / probe, params);
            su += tu.norm();
            sv += tv.norm();
        }
    su *= 2.0 * kPi / (probe * probe);
    sv *= 2.0 * kPi / (probe * probe);
    const auto [per_ring, rings] = lattice_counts(su, sv, n_target);
    std::vector<Vec2> uv;
    std::vector<Tri> tris;
    staggered_lattice(per_ring, rings, uv, tris);
    std::vector<Vec3> pts;
    pts.reserve(uv.size());
    for (const auto& q : uv) pts.push_back(cyclide_map(q.x(), q.y(), params));
    return finish_surface(std::move(pts), std::move(tris));
}

// ---------------------------------------------------------------------------------------------

std::vector<Vec3> gen_bump_centers(int count, std::uint64_t seed) {
    if (count < 1) throw InvalidInput("gen_bump_centers: count must be positive");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> jitter(0.0, 1.0);
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    const double spacing = std::sqrt(4.0 * kPi / count);
    std::vector<Vec3> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        const double z = 1.0 - (2.0 * i + 1.0) / count;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        Vec3 p(r * std::cos(golden * i), r * std::sin(golden * i), z);
        p += 0.25 * spacing * Vec3(jitter(rng), jitter(rng), jitter(rng));
        out.push_back(p.normalized());
    }
    return out;
}

double implicit_value(const DeformedSphere& s, const Vec3& x) {
    const double rho2 = x.x() * x.x() + x.y() * x.y();
    return rho2 + x.z() * x.z() / (1.0 - s.gamma / (1.0 + rho2 / 2.89)) - 1.0;
}

double implicit_value(const BumpySphere& s, const Vec3& x) {
    double bumps = 0.0;
    const double inv = 1.0 / (2.0 * s.width * s.width);
    for (const auto& c : s.centers) bumps += std::exp(-(x - c).squaredNorm() * inv);
    return x.squaredNorm() - 1.0 - s.amplitude * bumps;
}

namespace {

template <class Surface>
SurfaceMesh radial_projection(const SurfaceMesh& base, const Surface& surface, double hi) {
    SurfaceMesh out = base;
    for (std::size_t i = 0; i < base.nodes.size(); ++i) {
        const Vec3 dir = base.nodes.points[i].normalized();
        auto g = [&](double s) { return implicit_value(surface, s * dir); };
        const double g_lo = g(0.0), g_hi = g(hi);
        if (!(g_lo < 0.0 && g_hi >= 0.0))
            throw NumericalError("implicit surface: radial root not bracketed at node " + std::to_string(i));
        double s;
        if (g_hi == 0.0) {
            s = hi;
        } else {
            std::uintmax_t iters = 200;
            const auto [a, b] = boost::math::tools::toms748_solve(g, 0.0, hi, g_lo, g_hi,
                                                                   boost::math::tools::eps_tolerance<double>(50), iters);
            s = 0.5 * (a + b);
        }
        out.nodes.points[i] = s * dir;
    }
    orient_surface(out);
    return out;
}

}  // namespace

SurfaceMesh project_to_implicit(const SurfaceMesh& base, const DeformedSphere& surface) {
    if (!(surface.gamma >= 0.0 && surface.gamma < 1.0)) throw InvalidInput("deformed sphere: gamma must be in [0, 1)");
    // the radial profile is monotone and non-negative at radius 1
    return radial_projection(base, surface, 1.0 + 1e-6);
}

SurfaceMesh project_to_implicit(const SurfaceMesh& base, const BumpySphere& surface) {
    if (surface.amplitude < 0.0 || !(surface.width > 0.0)) throw InvalidInput("bumpy sphere: invalid bump parameters");
    const double hi = std::sqrt(1.0 + surface.amplitude * static_cast<double>(surface.centers.size())) + 0.5;
    return radial_projection(base, surface, hi);
}

}  // namespace nfrbf
