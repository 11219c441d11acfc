#include "nfrbf/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nfrbf/error.hpp"
#include "nfrbf/predicates.hpp"

namespace nfrbf {

namespace {

using predicates::incircle;
using predicates::orient2d;

constexpr int kGhost = -1;

// Ghost triangles keep the ghost vertex in slot 2; their slot-2 edge (v0, v1) is a hull edge
// and the outside of the hull lies to its left.
struct Cell {
    std::array<int, 3> v;
    std::array<int, 3> nb{-1, -1, -1};  // nb[i] lies across edge (v[i+1], v[i+2])
    bool alive = true;
};

class Triangulator {
public:
    explicit Triangulator(const std::vector<Vec2>& pts) : pts_(pts) {}

    std::vector<Tri> run();

private:
    bool is_ghost(int t) const { return cells_[t].v[2] == kGhost; }
    bool conflicts(int t, const Vec2& p) const;
    int locate(const Vec2& p, int start);
    void insert(int pid);
    void link(const std::vector<int>& fresh, int boundary_u, int boundary_w, int outside,
              int old_cell);
    int make_cell(int a, int b, int c);
    std::vector<int> insertion_order() const;

    const std::vector<Vec2>& pts_;
    std::vector<Cell> cells_;
    std::vector<char> mark_;
    int last_ = 0;
    std::uint64_t rng_ = 0x9e3779b97f4a7c15ull;
};

bool Triangulator::conflicts(int t, const Vec2& p) const {
    const Cell& c = cells_[t];
    if (c.v[2] != kGhost) return incircle(pts_[c.v[0]], pts_[c.v[1]], pts_[c.v[2]], p) > 0;
    const Vec2& a = pts_[c.v[0]];
    const Vec2& b = pts_[c.v[1]];
    const int o = orient2d(a, b, p);
    if (o > 0) return true;
    if (o < 0) return false;
    // collinear with the hull edge: conflict only strictly inside the segment
    return (p - a).dot(b - a) > 0.0 && (p - b).dot(a - b) > 0.0;
}

int Triangulator::locate(const Vec2& p, int start) {
    int t = start;
    const std::size_t guard = 4 * cells_.size() + 64;
    for (std::size_t step = 0; step < guard; ++step) {
        if (is_ghost(t)) return t;
        const Cell& c = cells_[t];
        rng_ = rng_ * 6364136223846793005ull + 1442695040888963407ull;
        const int offset = static_cast<int>((rng_ >> 33) % 3);
        int next = -1;
        for (int r = 0; r < 3; ++r) {
            const int i = (r + offset) % 3;
            if (orient2d(pts_[c.v[(i + 1) % 3]], pts_[c.v[(i + 2) % 3]], p) < 0) {
                next = c.nb[i];
                break;
            }
        }
        if (next < 0) return t;
        t = next;
    }
    throw NumericalError("delaunay: point location did not terminate");
}

int Triangulator::make_cell(int a, int b, int c) {
    Cell cell;
    if (a == kGhost)
        cell.v = {b, c, kGhost};
    else if (b == kGhost)
        cell.v = {c, a, kGhost};
    else
        cell.v = {a, b, c};
    cells_.push_back(cell);
    return static_cast<int>(cells_.size()) - 1;
}

void Triangulator::insert(int pid) {
    const Vec2& p = pts_[pid];
    const int seed = locate(p, last_);
    if (!is_ghost(seed))
        for (int v : cells_[seed].v)
            if (pts_[v] == p)
                throw InvalidInput("delaunay: duplicate node " + std::to_string(pid) + " coincides with node " +
                                   std::to_string(v));

    std::vector<int> cavity{seed};
    std::vector<int> stack{seed};
    std::vector<char>& mark = mark_;
    mark.resize(cells_.size(), 0);
    mark[seed] = 1;

    struct BoundaryEdge {
        int u, w, outside, inside;
    };
    std::vector<BoundaryEdge> boundary;
    while (!stack.empty()) {
        const int t = stack.back();
        stack.pop_back();
        for (int i = 0; i < 3; ++i) {
            const int o = cells_[t].nb[i];
            const int u = cells_[t].v[(i + 1) % 3];
            const int w = cells_[t].v[(i + 2) % 3];
            if (mark[o] == 1) continue;
            if (mark[o] == 0 && conflicts(o, p)) {
                mark[o] = 1;
                cavity.push_back(o);
                stack.push_back(o);
            } else {
                mark[o] = 2;
                boundary.push_back({u, w, o, t});
            }
        }
    }
    // boundary neighbours were only tentatively marked; reset them for the next insertion
    for (const auto& e : boundary) mark[e.outside] = 0;
    for (int t : cavity) {
        mark[t] = 0;
        cells_[t].alive = false;
    }

    std::vector<int> fresh;
    fresh.reserve(boundary.size());
    for (const auto& e : boundary) fresh.push_back(make_cell(e.u, e.w, pid));
    mark.resize(cells_.size(), 0);

    for (std::size_t k = 0; k < fresh.size(); ++k) link(fresh, boundary[k].u, boundary[k].w, boundary[k].outside, boundary[k].inside);

    for (int t : fresh)
        if (!is_ghost(t)) {
            last_ = t;
            break;
        }
}

void Triangulator::link(const std::vector<int>& fresh, int bu, int bw, int outside, int old_cell) {
    // find the fresh cell built on (bu, bw)
    int self = -1;
    for (int t : fresh) {
        const auto& v = cells_[t].v;
        for (int i = 0; i < 3; ++i)
            if (v[(i + 1) % 3] == bu && v[(i + 2) % 3] == bw) {
                cells_[t].nb[i] = outside;
                self = t;
            }
    }
    Cell& out = cells_[outside];
    for (int j = 0; j < 3; ++j)
        if (out.nb[j] == old_cell && out.v[(j + 1) % 3] == bw && out.v[(j + 2) % 3] == bu) out.nb[j] = self;

    // internal edges of the star
    Cell& me = cells_[self];
    for (int i = 0; i < 3; ++i) {
        const int a = me.v[(i + 1) % 3];
        const int b = me.v[(i + 2) % 3];
        if (a == bu && b == bw) continue;
        for (int t : fresh) {
            if (t == self) continue;
            const auto& v = cells_[t].v;
            for (int j = 0; j < 3; ++j)
                if (v[(j + 1) % 3] == b && v[(j + 2) % 3] == a) me.nb[i] = t;
        }
    }
}

std::vector<int> Triangulator::insertion_order() const {
    // snake order over a coarse grid keeps consecutive insertions spatially close
    const std::size_t n = pts_.size();
    Vec2 lo = pts_[0], hi = pts_[0];
    for (const auto& p : pts_) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const int g = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(n) / 4.0)));
    const Vec2 span = (hi - lo).cwiseMax(Vec2(1e-300, 1e-300));
    std::vector<std::pair<long, int>> keyed(n);
    for (std::size_t i = 0; i < n; ++i) {
        int cx = std::min(g - 1, static_cast<int>((pts_[i].x() - lo.x()) / span.x() * g));
        const int cy = std::min(g - 1, static_cast<int>((pts_[i].y() - lo.y()) / span.y() * g));
        if (cy % 2 == 1) cx = g - 1 - cx;
        keyed[i] = {static_cast<long>(cy) * g + cx, static_cast<int>(i)};
    }
    std::stable_sort(keyed.begin(), keyed.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<int> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = keyed[i].second;
    return order;
}

std::vector<Tri> Triangulator::run() {
    const std::size_t n = pts_.size();
    if (n < 3) throw DegenerateGeometry("delaunay: need at least 3 nodes, got " + std::to_string(n));
    std::vector<int> order = insertion_order();

    // seed triangle: first three non-collinear nodes in insertion order
    int i1 = -1, i2 = -1;
    for (std::size_t k = 1; k < n && i1 < 0; ++k)
        if (pts_[order[k]] != pts_[order[0]]) i1 = static_cast<int>(k);
    if (i1 < 0) throw InvalidInput("delaunay: all nodes coincide");
    for (std::size_t k = i1 + 1; k < n && i2 < 0; ++k)
        if (orient2d(pts_[order[0]], pts_[order[i1]], pts_[order[k]]) != 0) i2 = static_cast<int>(k);
    if (i2 < 0) throw DegenerateGeometry("delaunay: all nodes are collinear");

    int a = order[0], b = order[i1], c = order[i2];
    if (orient2d(pts_[a], pts_[b], pts_[c]) < 0) std::swap(b, c);
    const std::vector<int> seed{make_cell(a, b, c), make_cell(b, a, kGhost), make_cell(c, b, kGhost),
                                make_cell(a, c, kGhost)};
    for (int t : seed) {
        auto& v = cells_[t].v;
        for (int i = 0; i < 3; ++i)
            for (int s : seed) {
                if (s == t) continue;
                const auto& w = cells_[s].v;
                for (int j = 0; j < 3; ++j)
                    if (w[(j + 1) % 3] == v[(i + 2) % 3] && w[(j + 2) % 3] == v[(i + 1) % 3]) cells_[t].nb[i] = s;
            }
    }
    last_ = seed[0];

    for (std::size_t k = 1; k < n; ++k)
        if (static_cast<int>(k) != i1 && static_cast<int>(k) != i2) insert(order[k]);

    std::vector<Tri> out;
    for (const auto& cell : cells_)
        if (cell.alive && cell.v[2] != kGhost) out.push_back({cell.v[0], cell.v[1], cell.v[2]});
    return out;
}

}  // namespace

std::vector<Tri> delaunay_triangles(const std::vector<Vec2>& points) {
    Triangulator tri(points);
    return tri.run();
}

PlanarMesh delaunay(const NodeSet& nodes) {
    if (nodes.dim != 2) throw InvalidInput("delaunay: node set must be 2-D");
    std::vector<Vec2> pts(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) pts[i] = nodes.xy(i);

    PlanarMesh mesh;
    mesh.nodes = nodes;
    mesh.triangles = delaunay_triangles(pts);

    std::vector<char> used(nodes.size(), 0);
    for (const auto& t : mesh.triangles)
        for (int v : t) used[v] = 1;
    for (std::size_t i = 0; i < used.size(); ++i)
        if (!used[i]) throw NumericalError("delaunay: node " + std::to_string(i) + " is not a triangle vertex");
    compute_centroids(mesh);
    return mesh;
}

}  // namespace nfrbf
