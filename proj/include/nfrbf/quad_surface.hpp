#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "nfrbf/kdtree.hpp"
#include "nfrbf/mesh.hpp"
#include "nfrbf/quad_flat.hpp"
#include "nfrbf/rbf.hpp"

namespace nfrbf {

/// Winding made consistent across edges and oriented outward (positive signed volume);
/// fills unit triangle normals. Throws DegenerateGeometry for non-orientable input.
void consistent_normals(SurfaceMesh& mesh);

/// Plane of a flat triangle together with the apex of the central projection onto the
/// curved element. In orthogonal mode the apex is at infinity along the normal.
struct ElementFrame {
    int triangle = -1;
    Vec3 origin = Vec3::Zero();  ///< triangle centroid
    Vec3 e1 = Vec3::UnitX();
    Vec3 e2 = Vec3::UnitY();
    Vec3 normal = Vec3::UnitZ();
    Vec3 projection = Vec3::Zero();
    bool central = false;
    double condition = 0.0;  ///< condition number of the cutting-plane system

    Vec2 plane_coords(const Vec3& x) const;
    Vec3 from_plane(const Vec2& xi) const;
};

/// Apex p with (n_j - n_r) . (p - v_r) = 0 for the three edge neighbours r, v_r a vertex of
/// the shared edge. Falls back to orthogonal projection when a neighbour is missing, the
/// system condition exceeds 1e8, or |p - centroid| > 1e6 h.
ElementFrame element_frame(const SurfaceMesh& mesh, int triangle, double h);

/// Plane coordinates of the pre-image of a surface point, or nullopt when the projection line
/// is parallel to the plane or the point lies behind the apex.
std::optional<Vec2> node_preimage(const ElementFrame& frame, const Vec3& x);

/// Per-element pipeline output.
struct SurfaceElement {
    ElementFrame frame;
    std::vector<int> nodes;       ///< stencil, nearest first after dropping invalid pre-images
    std::vector<Vec2> preimages;  ///< plane coordinates
    std::vector<double> jacobians;
    Eigen::VectorXd planar_weights;  ///< weights of the flat triangle rule
    Eigen::VectorXd weights;         ///< planar_weights * jacobians
    double condition = 0.0;          ///< saddle system
    int dropped = 0;
};

/// Area distortion |d1 mu x d2 mu| of the plane-to-surface map at each pre-image, from
/// coordinate interpolants fitted on the planar stencil. Throws NumericalError if any value is
/// not positive.
std::vector<double> local_jacobians(const SaddleSystem& planar, const std::vector<Vec3>& surface_points,
                                    int element);

SurfaceElement surface_element(const SurfaceMesh& mesh, const KdTree& tree, int triangle, const RbfParams& params,
                               double h);

struct SurfaceDiagnostics {
    std::vector<char> fallback;
    std::vector<double> projection_condition;
    std::vector<double> saddle_condition;
    std::vector<double> min_jacobian;
    std::vector<int> negative_weights;
    std::vector<int> dropped;

    int fallback_count() const;
};

/// Surface RBF-QF rule; `domain_measure` is the sum of the weights.
QuadratureRule assemble_surface_rule(const SurfaceMesh& mesh, const RbfParams& params,
                                     SurfaceDiagnostics* diagnostics = nullptr);

/// CSV: element,fallback,projection_condition,saddle_condition,min_jacobian,negative_weights,dropped
void write_surface_diagnostics(const std::filesystem::path& path, const SurfaceDiagnostics& diag);

}  // namespace nfrbf
