#pragma once

#include "nfrbf/mesh.hpp"

namespace nfrbf {

/// Delaunay triangulation of a planar node set (incremental Bowyer-Watson with ghost
/// triangles and exact predicates). Triangles are counter-clockwise.
///
/// Throws DegenerateGeometry when fewer than three non-collinear nodes exist and
/// InvalidInput on duplicate nodes.
PlanarMesh delaunay(const NodeSet& nodes);

/// Convenience overload for raw 2-D points.
std::vector<Tri> delaunay_triangles(const std::vector<Vec2>& points);

}  // namespace nfrbf
