#include "nfrbf/mesh_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "nfrbf/error.hpp"

namespace nfrbf {

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw InvalidInput("cannot open " + path.string());
    return is;
}

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path);
    if (!os) throw Error("cannot write " + path.string());
    os << std::setprecision(17);
    return os;
}

// next line that is neither empty nor a comment
bool content_line(std::istream& is, std::string& line) {
    while (std::getline(is, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
}

SurfaceMesh finish(SurfaceMesh mesh, const std::filesystem::path& path) {
    mesh.nodes.dim = 3;
    mesh.nodes.boundary.assign(mesh.nodes.points.size(), false);
    const int n = static_cast<int>(mesh.nodes.points.size());
    for (const auto& t : mesh.triangles)
        for (int v : t)
            if (v < 0 || v >= n) throw InvalidInput(path.string() + ": face index " + std::to_string(v) + " out of range");
    if (!is_watertight(mesh)) throw InvalidInput(path.string() + ": mesh is not closed");
    orient_surface(mesh);
    return mesh;
}

}  // namespace

SurfaceMesh read_off(const std::filesystem::path& path) {
    auto is = open_in(path);
    std::string line;
    if (!content_line(is, line)) throw InvalidInput(path.string() + ": empty file");
    std::istringstream head(line);
    std::string magic;
    head >> magic;
    long nv = -1, nf = -1;
    if (magic == "OFF") {
        if (!(head >> nv >> nf)) {
            if (!content_line(is, line)) throw InvalidInput(path.string() + ": missing counts");
            std::istringstream counts(line);
            counts >> nv >> nf;
        }
    } else {
        throw InvalidInput(path.string() + ": not an OFF file");
    }
    if (nv < 3 || nf < 1) throw InvalidInput(path.string() + ": bad vertex/face counts");
    SurfaceMesh mesh;
    for (long i = 0; i < nv; ++i) {
        if (!content_line(is, line)) throw InvalidInput(path.string() + ": truncated vertex list");
        std::istringstream ls(line);
        Vec3 p;
        if (!(ls >> p.x() >> p.y() >> p.z())) throw InvalidInput(path.string() + ": bad vertex line " + line);
        mesh.nodes.points.push_back(p);
    }
    for (long f = 0; f < nf; ++f) {
        if (!content_line(is, line)) throw InvalidInput(path.string() + ": truncated face list");
        std::istringstream ls(line);
        int k = 0;
        Tri t;
        if (!(ls >> k >> t[0] >> t[1] >> t[2]) || k != 3)
            throw InvalidInput(path.string() + ": only triangular faces are supported");
        mesh.triangles.push_back(t);
    }
    return finish(std::move(mesh), path);
}

SurfaceMesh read_obj(const std::filesystem::path& path) {
    auto is = open_in(path);
    std::string line;
    SurfaceMesh mesh;
    while (content_line(is, line)) {
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "v") {
            Vec3 p;
            if (!(ls >> p.x() >> p.y() >> p.z())) throw InvalidInput(path.string() + ": bad vertex line " + line);
            mesh.nodes.points.push_back(p);
        } else if (tag == "f") {
            std::vector<int> idx;
            std::string tok;
            while (ls >> tok) {
                // "i", "i/t", "i//n", "i/t/n"
                const int v = std::stoi(tok.substr(0, tok.find('/')));
                idx.push_back(v > 0 ? v - 1 : static_cast<int>(mesh.nodes.points.size()) + v);
            }
            if (idx.size() != 3) throw InvalidInput(path.string() + ": only triangular faces are supported");
            mesh.triangles.push_back({idx[0], idx[1], idx[2]});
        }
    }
    return finish(std::move(mesh), path);
}

SurfaceMesh read_surface_mesh(const std::filesystem::path& path) {
    auto ext = path.extension().string();
    for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (ext == ".off") return read_off(path);
    if (ext == ".obj") return read_obj(path);
    throw InvalidInput("unsupported mesh format: " + path.string());
}

void write_off(const std::filesystem::path& path, const SurfaceMesh& mesh) {
    auto os = open_out(path);
    os << "OFF\n" << mesh.nodes.size() << ' ' << mesh.triangles.size() << " 0\n";
    for (const auto& p : mesh.nodes.points) os << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
    for (const auto& t : mesh.triangles) os << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

void write_nodes_csv(const std::filesystem::path& path, const NodeSet& nodes) {
    auto os = open_out(path);
    os << (nodes.dim == 2 ? "x,y,boundary\n" : "x,y,z,boundary\n");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& p = nodes.points[i];
        os << p.x() << ',' << p.y();
        if (nodes.dim == 3) os << ',' << p.z();
        os << ',' << (i < nodes.boundary.size() && nodes.boundary[i] ? 1 : 0) << '\n';
    }
}

NodeSet read_nodes_csv(const std::filesystem::path& path) {
    auto is = open_in(path);
    std::string line;
    if (!std::getline(is, line)) throw InvalidInput(path.string() + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    NodeSet nodes;
    if (line == "x,y,boundary") nodes.dim = 2;
    else if (line == "x,y,z,boundary") nodes.dim = 3;
    else throw InvalidInput(path.string() + ": unexpected header '" + line + "'");
    while (std::getline(is, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(ls, cell, ',')) vals.push_back(std::stod(cell));
        if (static_cast<int>(vals.size()) != nodes.dim + 1) throw InvalidInput(path.string() + ": bad row '" + line + "'");
        nodes.points.push_back({vals[0], vals[1], nodes.dim == 3 ? vals[2] : 0.0});
        nodes.boundary.push_back(vals.back() != 0.0);
    }
    return nodes;
}

}  // namespace nfrbf
