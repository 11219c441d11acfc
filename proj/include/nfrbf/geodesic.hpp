#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <Eigen/Dense>

#include "nfrbf/mesh.hpp"

namespace nfrbf {

/// Dense approximate geodesic distances between all nodes of a closed surface mesh.
///
/// Each row is a first-order fast-marching solve from one source (planar wavefront updates
/// inside triangles, edge updates where the wavefront update is not causal). The result is
/// symmetrized by averaging and has a zero diagonal. Throws DegenerateGeometry for a
/// disconnected mesh.
Eigen::MatrixXd geodesic_matrix(const SurfaceMesh& mesh);

/// Distances from one source node.
Eigen::VectorXd geodesic_from(const SurfaceMesh& mesh, int source);

/// Cache file layout (little-endian):
///   8 bytes  magic "NFGEOD01"
///   8 bytes  uint64 n
///   8 bytes  uint64 mesh hash
///   n*n      float64, row-major
std::filesystem::path geodesic_cache_path(const std::filesystem::path& dir, const SurfaceMesh& mesh);

/// Loads the matrix from `dir` if a matching cache file exists, otherwise computes and
/// stores it. An empty `dir` disables caching.
Eigen::MatrixXd geodesic_matrix_cached(const SurfaceMesh& mesh, const std::filesystem::path& dir);

void write_geodesic_cache(const std::filesystem::path& file, const Eigen::MatrixXd& d, std::uint64_t hash);
/// Returns false if the file is missing or its header does not match.
bool read_geodesic_cache(const std::filesystem::path& file, std::uint64_t hash, Eigen::MatrixXd& out);

}  // namespace nfrbf
