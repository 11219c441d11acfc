#include "nfrbf/vtk.hpp"

#include <fstream>
#include <iomanip>

#include "nfrbf/error.hpp"

namespace nfrbf {

void write_vtk(const std::filesystem::path& path, const std::vector<Vec3>& points, const std::vector<Tri>& triangles,
               const std::vector<ScalarField>& fields) {
    for (const auto& [name, values] : fields) {
        if (values.size() != points.size())
            throw InvalidInput("write_vtk: field '" + name + "' has " + std::to_string(values.size()) +
                               " values for " + std::to_string(points.size()) + " points");
        if (name.empty() || name.find_first_of(" \t\n") != std::string::npos)
            throw InvalidInput("write_vtk: field names must be non-empty without whitespace");
    }
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot write " + path.string());
    os << std::setprecision(17);
    os << "# vtk DataFile Version 3.0\nnfrbf\nASCII\nDATASET POLYDATA\n";
    os << "POINTS " << points.size() << " double\n";
    for (const Vec3& p : points) os << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
    os << "POLYGONS " << triangles.size() << ' ' << 4 * triangles.size() << '\n';
    for (const Tri& t : triangles) os << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    if (!fields.empty()) {
        os << "POINT_DATA " << points.size() << '\n';
        for (const auto& [name, values] : fields) {
            os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
            for (double v : values) os << v << '\n';
        }
    }
    if (!os) throw Error("write failed for " + path.string());
}

void write_vtk(const std::filesystem::path& path, const SurfaceMesh& mesh, const std::vector<ScalarField>& fields) {
    write_vtk(path, mesh.nodes.points, mesh.triangles, fields);
}

}  // namespace nfrbf
