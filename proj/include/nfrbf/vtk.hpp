#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "nfrbf/mesh.hpp"

namespace nfrbf {

using ScalarField = std::pair<std::string, std::vector<double>>;

/// Legacy ASCII VTK polydata: POINTS, POLYGONS (triangles) and one SCALARS block per field,
/// numbers written with 17 significant digits. Flat points are written with z = 0.
void write_vtk(const std::filesystem::path& path, const std::vector<Vec3>& points, const std::vector<Tri>& triangles,
               const std::vector<ScalarField>& fields);
void write_vtk(const std::filesystem::path& path, const SurfaceMesh& mesh, const std::vector<ScalarField>& fields);

}  // namespace nfrbf
