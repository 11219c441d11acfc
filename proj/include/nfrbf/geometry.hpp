#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nfrbf/mesh.hpp"

namespace nfrbf {

// ---------------------------------------------------------------------------------------------
// Flat node families

enum class SquareNodeKind { regular, repulsion };

struct SquareNodeOptions {
    SquareNodeKind kind = SquareNodeKind::repulsion;
    int n_target = 2000;
    std::uint64_t seed = 0;
    bool cluster_boundary = false;
    double lo = 0.0;  ///< the domain is [lo, hi]^2
    double hi = 1.0;
    int relaxation_sweeps = 30;
};

/// Nodes in a square with equally spaced boundary nodes and either an equilateral interior
/// lattice or relaxed pseudo-random interior nodes. Deterministic given the options.
NodeSet gen_nodes_square(const SquareNodeOptions& opts);

/// Covering radius of a flat triangulation over its convex hull: the largest circumradius
/// among triangles whose circumcentre lies in the hull, or the largest half-gap between
/// consecutive nodes along a hull edge if that is larger.
double covering_radius(const PlanarMesh& mesh);

/// Surface proxy: largest flat-triangle circumradius.
double covering_radius(const SurfaceMesh& mesh);

/// Doubly periodic distance on a square cell of side `period`.
double periodic_distance(const Vec2& x, const Vec2& y, double period);

// ---------------------------------------------------------------------------------------------
// Torus

struct TorusParams {
    double major = 3.0;
    double minor = 1.0;
};

Vec3 torus_map(double phi, double theta, const TorusParams& torus = {});

/// Inverse of torus_map with angles in (-pi, pi]. Rejects points farther than 1e-8 from the
/// surface.
std::pair<double, double> torus_unmap(const Vec3& x, const TorusParams& torus = {});

/// Staggered ring lattice on the torus ("spiral nodes"); triangles are built in parameter
/// space and mapped to the surface.
SurfaceMesh gen_nodes_torus_spiral(int n_target, const TorusParams& torus = {});

// ---------------------------------------------------------------------------------------------
// Sphere and cyclide

/// Icosahedron refined `level` times by edge bisection, vertices projected to the unit sphere.
SurfaceMesh gen_sphere_icosahedral(int level);

/// Icosahedral geodesic grid of the given frequency (10 f^2 + 2 vertices).
SurfaceMesh gen_sphere_geodesic(int frequency);

struct CyclideParams {
    double a = 1.0;
    double c = 0.1983;
    double d = 0.5;
    /// b is determined by a and c (b^2 = a^2 - c^2); 0.98 is the rounded default.
    double b() const;
};

/// Validates a, b, c, d; `b` may be supplied and must agree with sqrt(a^2 - c^2) to 1% relative.
CyclideParams make_cyclide(double a, std::optional<double> b, double c, double d);

Vec3 cyclide_map(double u, double v, const CyclideParams& p);
/// Partial derivatives of cyclide_map with respect to u and v.
std::pair<Vec3, Vec3> cyclide_tangents(double u, double v, const CyclideParams& p);
double cyclide_implicit(const Vec3& x, const CyclideParams& p);

SurfaceMesh gen_cyclide_mesh(const CyclideParams& params, int n_target);

/// Dense periodic trapezoidal rule over the cyclide parameter square:
/// integral of f(x) dS with `samples` points per direction.
template <class F>
double cyclide_surface_integral(const CyclideParams& p, int samples, F&& f);

// ---------------------------------------------------------------------------------------------
// Implicit star-shaped surfaces

struct DeformedSphere {
    double gamma = 0.0;
};

struct BumpySphere {
    std::vector<Vec3> centers;
    double amplitude = 0.1;
    double width = 0.1;
};

/// Roughly evenly spaced, randomly perturbed points on the unit sphere.
std::vector<Vec3> gen_bump_centers(int count, std::uint64_t seed);

double implicit_value(const DeformedSphere& s, const Vec3& x);
double implicit_value(const BumpySphere& s, const Vec3& x);

/// Moves every node of `base` radially onto the implicit surface; connectivity is kept.
SurfaceMesh project_to_implicit(const SurfaceMesh& base, const DeformedSphere& surface);
SurfaceMesh project_to_implicit(const SurfaceMesh& base, const BumpySphere& surface);

// ---------------------------------------------------------------------------------------------

template <class F>
double cyclide_surface_integral(const CyclideParams& p, int samples, F&& f) {
    const double pi = 3.14159265358979323846;
    const double h = 2.0 * pi / samples;
    double total = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double u = -pi + i * h;
        double row = 0.0;
        for (int j = 0; j < samples; ++j) {
            const double v = -pi + j * h;
            const auto [xu, xv] = cyclide_tangents(u, v, p);
            row += f(cyclide_map(u, v, p)) * xu.cross(xv).norm();
        }
        total += row;
    }
    return total * h * h;
}

}  // namespace nfrbf
