#pragma once

#include <filesystem>

#include "nfrbf/mesh.hpp"

namespace nfrbf {

/// ASCII OFF or OBJ (chosen by extension), vertices and triangular faces only. The result is
/// oriented with outward normals; open meshes are rejected.
SurfaceMesh read_surface_mesh(const std::filesystem::path& path);

SurfaceMesh read_off(const std::filesystem::path& path);
SurfaceMesh read_obj(const std::filesystem::path& path);
void write_off(const std::filesystem::path& path, const SurfaceMesh& mesh);

/// CSV with header `x,y,boundary` (2-D) or `x,y,z,boundary` (3-D).
void write_nodes_csv(const std::filesystem::path& path, const NodeSet& nodes);
NodeSet read_nodes_csv(const std::filesystem::path& path);

}  // namespace nfrbf
