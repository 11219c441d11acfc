#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nfrbf/geometry.hpp"
#include "nfrbf/neural_field.hpp"
#include "nfrbf/quad_flat.hpp"
#include "nfrbf/quad_surface.hpp"

namespace nfrbf {

// ---------------------------------------------------------------------------------------------
// Test functions and quadrature domains

enum class TestFunction {
    chebyshev_product,  ///< T5(2x-1) T4(2y-1) + 1
    square_gaussian,    ///< exp(-10 [(x-1/2)^2 + (y-1/2)^2])
    deg4_poly,          ///< x^3 - y^4
    torus_sin,          ///< sin(7x) + 1
    const_one,
    sphere_poly,  ///< x^3 y^2 z^4 + 5
    trig_xyz,     ///< sin x cos 2y cos 3z
};

/// Accepts snake_case or kebab-case names; throws InvalidInput for unknown names.
TestFunction parse_test_function(std::string_view name);
std::string to_string(TestFunction fn);
double eval_test_function(TestFunction fn, const Vec3& x);

enum class QuadDomainKind { unit_square, torus, sphere, cyclide };

struct QuadDomain {
    QuadDomainKind kind = QuadDomainKind::unit_square;
    SquareNodeKind nodes = SquareNodeKind::repulsion;  ///< unit square only
    TorusParams torus;
    CyclideParams cyclide;
};

/// Accepts unit-square, torus, sphere, cyclide (either separator).
QuadDomainKind parse_domain(std::string_view name);
std::string to_string(QuadDomainKind kind);

/// Reference integral. Closed forms where they exist; the cyclide uses a 4096^2 periodic
/// trapezoid in parameter space. Throws InvalidInput for combinations without a reference.
double exact_integral(const QuadDomain& domain, TestFunction fn);

/// Stencil size used when none is given: 21 up to degree 3, 32 for degree 4 and above.
int default_stencil_size(int deg);

/// Node set and triangulation at one resolution. For the sphere `resolution` is the
/// icosahedral refinement level, otherwise the target node count.
struct DomainMesh {
    std::optional<PlanarMesh> planar;
    std::optional<SurfaceMesh> surface;
    const NodeSet& nodes() const { return planar ? planar->nodes : surface->nodes; }
};
DomainMesh build_domain_mesh(const QuadDomain& domain, int resolution, std::uint64_t seed);
QuadratureRule build_rule(const DomainMesh& mesh, const RbfParams& params);

// ---------------------------------------------------------------------------------------------
// Convergence reports

struct ConvergenceRecord {
    long n = 0;
    double h_proxy = 0.0;  ///< n^{-1/2}
    int degree = 0;
    std::uint64_t seed = 0;
    double rel_error = 0.0;
    double stability = 0.0;  ///< (sum |w| - sum w) / sum w of the rule used
};

struct ConvergenceReport {
    std::string config;  ///< one-line echo of the sweep configuration
    std::vector<ConvergenceRecord> records;
    std::map<int, double> slopes;  ///< per degree, fitted on median errors
    std::vector<std::string> notes;

    /// Median error per resolution for one degree, ordered by n.
    std::vector<ConvergenceRecord> medians(int degree) const;
};

/// Least-squares slope of log(error) against log(h). Non-positive or non-finite errors are
/// skipped with a note. Throws InvalidInput with fewer than two usable points.
double fit_rate(const std::vector<std::pair<double, double>>& h_error, std::vector<std::string>* notes = nullptr);

struct QuadSweep {
    QuadDomain domain;
    TestFunction fn = TestFunction::chebyshev_product;
    std::vector<int> degrees{1, 2, 3, 4};
    std::vector<int> resolutions{500, 1000, 2000, 4000, 8000};
    std::vector<std::uint64_t> seeds{0, 1, 2};  ///< only random flat nodes use more than the first
    int phs = 3;
    std::optional<int> k;
};

ConvergenceReport quad_convergence(const QuadSweep& sweep);

/// CSV with header `n,h_proxy,degree,seed,rel_error,stability`.
void write_report(const std::filesystem::path& path, const ConvergenceReport& report);
/// CSV with header `degree,slope,resolutions`.
void write_slope_summary(const std::filesystem::path& path, const ConvergenceReport& report);

// ---------------------------------------------------------------------------------------------
// Error map on the unit square

struct ErrorMap {
    int grid = 0;
    std::vector<Vec2> centers;  ///< row-major, cell centres of a grid x grid partition
    std::vector<double> values;
    double max_abs = 0.0;
    double mean = 0.0;
    bool both_signs = false;
};

/// E(x0) = (Q f - Q_n f) / Q f for unit-mass Gaussians of width sigma on the periodic unit cell
/// centred at each grid point. Q f = erf(1 / (2 sqrt(2) sigma))^2 independently of x0.
ErrorMap error_map(const QuadratureRule& rule, const std::vector<Vec3>& points, double sigma = 0.1, int grid = 100);
/// CSV with header `x0,y0,error`.
void write_error_map(const std::filesystem::path& path, const ErrorMap& map);

// ---------------------------------------------------------------------------------------------
// Manufactured neural-field convergence

enum class NfDomain { flat, torus };

struct NfRun {
    NfDomain domain = NfDomain::flat;
    int degree = 3;
    int n = 1000;
    std::uint64_t seed = 0;
    double dt = 1e-3;
    double T = 0.1;
    int phs = 3;
    std::optional<int> k;
    Manufactured solution;
};

struct NfResult {
    long n = 0;
    double rel_error = 0.0;  ///< final-time max-norm error over max |u|
    double stability = 0.0;
};

/// Flat: nodes on [-pi, pi]^2 and the periodic kernel. Torus (R = 3, r = 1): the same
/// manufactured solution in angle coordinates, kernel columns scaled by 1 / (R + r cos theta).
NfResult nf_error(const NfRun& run);

struct NfSweep {
    NfRun base;
    std::vector<int> degrees{2, 3, 4};
    std::vector<int> resolutions{500, 1000, 2000, 4000};
    std::vector<std::uint64_t> seeds{0};
};

ConvergenceReport nf_convergence(const NfSweep& sweep);

// ---------------------------------------------------------------------------------------------
// Showcase scenarios

struct ShowcaseRow {
    long step = 0;
    double t = 0.0;
    double min_u = 0.0, max_u = 0.0;
    double min_q = 1.0, max_q = 1.0;
    Vec3 centroid = Vec3::Zero();  ///< activity-weighted centroid of {u > max u / 2}
    long active = 0;               ///< nodes with u > max u / 2
};

struct ShowcaseResult {
    std::string scenario;
    SurfaceMesh mesh;
    QuadratureRule rule;
    std::vector<ShowcaseRow> rows;
    SimState final_state;  ///< last finite state observed
    bool completed = false;
    std::string failure;
    int frames = 0;
    /// Great-circle angle between the first and last activity centroids (radial projection).
    double centroid_travel = 0.0;
};

struct ShowcaseConfig {
    std::string scenario = "labyrinth";  ///< labyrinth | spot | cortex
    double gamma = 0.0;                  ///< labyrinth deformation
    int frequency = 20;                  ///< geodesic sphere frequency for labyrinth and spot
    std::filesystem::path mesh_path;     ///< cortex input mesh (OFF or OBJ)
    KernelSpec kernel = KernelSpec::difference(5.0, 0.05, 5.0, 0.1);
    FiringRate firing = FiringRate::smooth_spline(0.06, 0.54);
    std::optional<Depression> depression;
    RbfParams rbf{{3}, 3, 32};
    double dt = 1e-2;
    double T = 200.0;
    long stride = 100;                 ///< summary rows and frames every `stride` steps
    std::filesystem::path out_dir;     ///< frames and summary; empty disables output
    std::filesystem::path geodesic_cache;
    std::uint64_t seed = 0;            ///< bump placement for the spot scenario
    int bumps = 100;
    double band_width = 0.0;           ///< cortex initial band half-width (0: 2 sigma_i)
};

/// Scenario defaults: labyrinth uses the difference kernel (5, 0.05, 5, 0.1); spot uses
/// (5, 0.05, 7, 0.1) with depression (tau 20, beta 5); cortex uses (5, 3, 5, 6).
ShowcaseConfig showcase_defaults(std::string_view scenario);

/// Labyrinth cross pattern before rotation, evaluated at a unit vector.
double labyrinth_pattern(const Vec3& p);
/// Rotation taking the north pole to the normalized (0.5, 0.3, sqrt(0.34)).
Eigen::Matrix3d labyrinth_rotation();

ShowcaseResult showcase(const ShowcaseConfig& config);
/// CSV with header `step,t,min_u,max_u,min_q,max_q,cx,cy,cz,active`.
void write_showcase_summary(const std::filesystem::path& path, const ShowcaseResult& result);

}  // namespace nfrbf
