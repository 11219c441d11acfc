#pragma once

#include <array>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "nfrbf/kdtree.hpp"
#include "nfrbf/mesh.hpp"

namespace nfrbf {

/// Polyharmonic spline r^l (odd l) or r^l log r (even l).
struct PhsSpec {
    int order = 3;
};

double phs_eval(int order, double r);
/// Gradient of Phi(|x - y|) with respect to x; zero at x = y.
Vec3 phs_grad(int order, const Vec3& x, const Vec3& y);

/// Monomials x^a y^b (z^c) of total degree <= deg, ordered by degree then lexicographically.
struct PolySpec {
    int deg = 2;
    int dim = 2;
    std::vector<std::array<int, 3>> multi_indices;

    static PolySpec make(int deg, int dim);
    std::size_t count() const { return multi_indices.size(); }
};

/// binomial(deg + dim, deg)
std::size_t poly_count(int deg, int dim);

/// Throws InvalidInput unless l >= 1, deg >= floor(l/2) and k >= poly_count(deg, dim).
void check_compatibility(const PhsSpec& phs, const PolySpec& poly, int k);

struct RbfParams {
    PhsSpec phs;
    int deg = 2;
    int k = 21;
};

/// Stencil of an element: the k nodes nearest its centre, closest first, ties to the lower
/// index. The local frame is the stencil centroid and the largest node distance from it.
struct Stencil {
    int element = -1;
    std::vector<int> nodes;
    Vec3 origin = Vec3::Zero();
    double scale = 1.0;
};

Stencil make_stencil(int element, const Vec3& center, const KdTree& tree, int k);

/// The `count` nearest nodes, closest first. Without `tie_direction` equal distances go to the
/// lower index. With it, distances equal to 1e-10 relative form a tie group ordered by
/// decreasing (x - center) . direction, which keeps selections covariant under symmetries of
/// the node set when rounding would otherwise decide.
std::vector<int> nearest_ordered(const KdTree& tree, const Vec3& center, std::size_t count,
                                 const Vec3* tie_direction = nullptr);
/// One stencil per triangle, centred on the triangle centroid.
std::vector<Stencil> build_stencils(const PlanarMesh& mesh, int k);
std::vector<Stencil> build_stencils(const SurfaceMesh& mesh, int k);

/// Local PHS + polynomial interpolation system
///
///   [ A    P ] [c]   [f]
///   [ P^T  0 ] [d] = [0]
///
/// assembled in shifted and scaled coordinates x^ = (x - origin) / scale and factorized with
/// partial pivoting. Only the first `dim` components of each point are used.
class SaddleSystem {
public:
    SaddleSystem(const std::vector<Vec3>& points, int dim, const PhsSpec& phs, const PolySpec& poly,
                 int element = -1);
    /// Uses an explicit frame instead of the point centroid and radius.
    SaddleSystem(const std::vector<Vec3>& points, int dim, const PhsSpec& phs, const PolySpec& poly,
                 const Vec3& origin, double scale, int element = -1);

    int k() const { return static_cast<int>(local_.size()); }
    int p() const { return static_cast<int>(poly_.count()); }
    int dim() const { return dim_; }
    int element() const { return element_; }
    const PhsSpec& phs() const { return phs_; }
    const PolySpec& poly() const { return poly_; }
    const Vec3& origin() const { return origin_; }
    double scale() const { return scale_; }
    const std::vector<Vec3>& local_points() const { return local_; }

    const Eigen::MatrixXd& matrix() const { return m_; }
    Eigen::MatrixXd rbf_block() const { return m_.topLeftCorner(k(), k()); }
    Eigen::MatrixXd poly_block() const { return m_.topRightCorner(k(), p()); }
    /// Reciprocal condition estimate (1-norm).
    double rcond() const { return rcond_; }
    double condition() const { return rcond_ > 0.0 ? 1.0 / rcond_ : std::numeric_limits<double>::infinity(); }

    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
    Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;

    Vec3 to_local(const Vec3& x) const;
    /// Row of basis values [Phi(|x^ - x^_i|), x^^alpha] at a physical point.
    Eigen::VectorXd basis_row(const Vec3& x) const;

private:
    void assemble();

    std::vector<Vec3> local_;
    int dim_;
    PhsSpec phs_;
    PolySpec poly_;
    Vec3 origin_;
    double scale_;
    int element_;
    Eigen::MatrixXd m_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
    double rcond_ = 0.0;
};

/// Interpolant s(x) = sum_i c_i Phi(|x^ - x^_i|) + sum_a d_a x^^a.
struct LocalInterpolant {
    const SaddleSystem* system = nullptr;
    Eigen::VectorXd c;
    Eigen::VectorXd d;

    double eval(const Vec3& x) const;
    /// Gradient with respect to physical coordinates (first dim components).
    Vec3 grad(const Vec3& x) const;
};

LocalInterpolant fit_local(const SaddleSystem& system, const Eigen::VectorXd& values);

double monomial(const std::array<int, 3>& alpha, const Vec3& x);

/// Continuous interpolatory projector on a flat node set: each node owns the interpolant on
/// its own k-nearest stencil, and the value at x is the barycentric blend of the three
/// interpolants owned by the vertices of the Delaunay triangle containing x.
class Projector {
public:
    Projector(const PlanarMesh& mesh, const RbfParams& params);

    std::size_t size() const { return mesh_.nodes.size(); }
    const PlanarMesh& mesh() const { return mesh_; }

    /// Throws InvalidInput when x lies outside every triangle.
    double eval(const Eigen::VectorXd& values, const Vec2& x) const;
    /// Value of the j-th Lagrange function L_j at x.
    double lagrange(int j, const Vec2& x) const;
    /// Containing triangle and barycentric coordinates; triangle -1 when outside.
    std::pair<int, Eigen::Vector3d> locate(const Vec2& x) const;

private:
    double cell_value(int owner, const Eigen::VectorXd& stencil_values, const Vec2& x) const;

    PlanarMesh mesh_;
    std::vector<Stencil> stencils_;
    std::vector<SaddleSystem> systems_;
};

}  // namespace nfrbf
