#include "nfrbf/geodesic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include "nfrbf/error.hpp"

namespace nfrbf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Planar wavefront update of C from A and B; infinity when the update is not causal.
double triangle_update(const Vec3& c_pt, const Vec3& a_pt, double ta, const Vec3& b_pt, double tb) {
    const Vec3 e = b_pt - a_pt;
    const double len = e.norm();
    const Vec3 ex = e / len;
    const Vec3 ac = c_pt - a_pt;
    const double cx = ac.dot(ex);
    const double cy = (ac - cx * ex).norm();
    const double nx = (tb - ta) / len;
    if (std::abs(nx) >= 1.0) return kInf;
    const double ny = std::sqrt(1.0 - nx * nx);
    // the characteristic through C must cross segment AB
    const double foot = cx - cy * nx / ny;
    if (foot < 0.0 || foot > len) return kInf;
    return ta + nx * cx + ny * cy;
}

std::vector<std::vector<int>> incident_triangles(const SurfaceMesh& mesh) {
    std::vector<std::vector<int>> inc(mesh.nodes.size());
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t)
        for (int v : mesh.triangles[t]) inc[v].push_back(t);
    return inc;
}

void check_connected(const SurfaceMesh& mesh) {
    const std::size_t n = mesh.nodes.size();
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& t : mesh.triangles)
        for (int e = 0; e < 3; ++e) {
            const int a = find(t[e]), b = find(t[(e + 1) % 3]);
            if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
    std::vector<int> size(n, 0);
    for (std::size_t i = 0; i < n; ++i) ++size[find(static_cast<int>(i))];
    std::ostringstream msg;
    int components = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (size[i] > 0) {
            if (components > 0) msg << ", ";
            msg << "{root " << i << ": " << size[i] << " nodes}";
            ++components;
        }
    if (components > 1)
        throw DegenerateGeometry("geodesic: mesh has " + std::to_string(components) + " components " + msg.str());
}

Eigen::VectorXd march(const SurfaceMesh& mesh, const std::vector<std::vector<int>>& inc, int source) {
    const auto& p = mesh.nodes.points;
    const std::size_t n = p.size();
    Eigen::VectorXd dist = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), kInf);
    std::vector<char> done(n, 0);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[source] = 0.0;
    heap.push({0.0, source});
    while (!heap.empty()) {
        const auto [d, v] = heap.top();
        heap.pop();
        if (done[v] || d > dist[v]) continue;
        done[v] = 1;
        for (int t : inc[v]) {
            const auto& tri = mesh.triangles[t];
            for (int k = 0; k < 3; ++k) {
                const int x = tri[k];
                if (x == v || done[x]) continue;
                const int y = tri[0] != v && tri[0] != x ? tri[0] : (tri[1] != v && tri[1] != x ? tri[1] : tri[2]);
                double cand = dist[v] + (p[x] - p[v]).norm();
                if (done[y]) cand = std::min(cand, triangle_update(p[x], p[v], dist[v], p[y], dist[y]));
                if (cand < dist[x]) {
                    dist[x] = cand;
                    heap.push({cand, x});
                }
            }
        }
    }
    return dist;
}

}  // namespace

Eigen::VectorXd geodesic_from(const SurfaceMesh& mesh, int source) {
    if (source < 0 || source >= static_cast<int>(mesh.nodes.size()))
        throw InvalidInput("geodesic: source index out of range");
    check_connected(mesh);
    return march(mesh, incident_triangles(mesh), source);
}

Eigen::MatrixXd geodesic_matrix(const SurfaceMesh& mesh) {
    check_connected(mesh);
    const auto inc = incident_triangles(mesh);
    const int n = static_cast<int>(mesh.nodes.size());
    Eigen::MatrixXd d(n, n);
#pragma omp parallel for schedule(dynamic, 16)
    for (int s = 0; s < n; ++s) d.row(s) = march(mesh, inc, s).transpose();
    for (int i = 0; i < n; ++i) {
        d(i, i) = 0.0;
        for (int j = i + 1; j < n; ++j) {
            const double avg = 0.5 * (d(i, j) + d(j, i));
            d(i, j) = avg;
            d(j, i) = avg;
        }
    }
    return d;
}

std::filesystem::path geodesic_cache_path(const std::filesystem::path& dir, const SurfaceMesh& mesh) {
    char name[64];
    std::snprintf(name, sizeof(name), "geodesic_%016llx.bin", static_cast<unsigned long long>(mesh_hash(mesh)));
    return dir / name;
}

namespace {

constexpr char kMagic[8] = {'N', 'F', 'G', 'E', 'O', 'D', '0', '1'};

template <class T>
void put_le(std::ostream& os, T v) {
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
    os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <class T>
bool get_le(std::istream& is, T& v) {
    unsigned char buf[sizeof(T)];
    if (!is.read(reinterpret_cast<char*>(buf), sizeof(T))) return false;
    if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
    std::memcpy(&v, buf, sizeof(T));
    return true;
}

}  // namespace

void write_geodesic_cache(const std::filesystem::path& file, const Eigen::MatrixXd& d, std::uint64_t hash) {
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    const auto tmp = std::filesystem::path(file.string() + ".tmp");
    {
        std::ofstream os(tmp, std::ios::binary);
        if (!os) throw Error("geodesic cache: cannot write " + tmp.string());
        os.write(kMagic, 8);
        put_le<std::uint64_t>(os, static_cast<std::uint64_t>(d.rows()));
        put_le<std::uint64_t>(os, hash);
        for (Eigen::Index i = 0; i < d.rows(); ++i)
            for (Eigen::Index j = 0; j < d.cols(); ++j) put_le<double>(os, d(i, j));
        if (!os) throw Error("geodesic cache: write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, file);
}

bool read_geodesic_cache(const std::filesystem::path& file, std::uint64_t hash, Eigen::MatrixXd& out) {
    std::ifstream is(file, std::ios::binary);
    if (!is) return false;
    char magic[8];
    if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) return false;
    std::uint64_t n = 0, h = 0;
    if (!get_le(is, n) || !get_le(is, h) || h != hash) return false;
    out.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::uint64_t i = 0; i < n; ++i)
        for (std::uint64_t j = 0; j < n; ++j)
            if (!get_le(is, out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)))) return false;
    return true;
}

Eigen::MatrixXd geodesic_matrix_cached(const SurfaceMesh& mesh, const std::filesystem::path& dir) {
    if (dir.empty()) return geodesic_matrix(mesh);
    const auto file = geodesic_cache_path(dir, mesh);
    const std::uint64_t hash = mesh_hash(mesh);
    Eigen::MatrixXd d;
    if (read_geodesic_cache(file, hash, d) && d.rows() == static_cast<Eigen::Index>(mesh.nodes.size())) return d;
    d = geodesic_matrix(mesh);
    write_geodesic_cache(file, d, hash);
    return d;
}

}  // namespace nfrbf
