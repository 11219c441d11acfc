#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "nfrbf/mesh.hpp"

namespace nfrbf {

/// Firing-rate nonlinearity: logistic sigmoid, or a C^4 step that is 0 below `lo`, 1 above `hi`
/// and a degree-9 polynomial in between.
struct FiringRate {
    enum class Kind { sigmoid, smooth_spline };
    Kind kind = Kind::sigmoid;
    double gain = 5.0;
    double threshold = 0.5;
    double lo = 0.06;
    double hi = 0.54;
    /// Coefficients c_0..c_9 of p in the normalized variable s = (u - lo) / (hi - lo).
    std::array<double, 10> coeffs{};

    static FiringRate sigmoid(double gain = 5.0, double threshold = 0.5);
    static FiringRate smooth_spline(double lo = 0.06, double hi = 0.54);

    double operator()(double u) const;
    double derivative(double u) const;
    /// Sigmoid only; throws InvalidInput unless 0 < y < 1.
    double inverse(double y) const;
};

/// Degree-9 Hermite step on [0, 1]: p(0) = 0, p(1) = 1, derivatives 1..4 zero at both ends.
std::array<double, 10> smooth_spline_coefficients();

enum class DistanceKind { euclidean, periodic, geodesic, image_sum };

/// Gaussian A / (2 pi s^2) exp(-d^2 / (2 s^2)), or a difference A_e G(s_e) - A_i G(s_i).
/// `image_sum` replaces the wrapped distance by a sum over periodic images within
/// `image_radius` periods.
struct KernelSpec {
    enum class Kind { gaussian, difference, constant };
    Kind kind = Kind::gaussian;
    double sigma = 0.05;
    double amplitude = 1.0;
    double a_e = 5.0, sigma_e = 0.05;
    double a_i = 5.0, sigma_i = 0.1;
    DistanceKind distance = DistanceKind::euclidean;
    double period = 2.0 * 3.14159265358979323846;
    int image_radius = 2;
    std::shared_ptr<const Eigen::MatrixXd> geodesic;  ///< node-to-node distances for `geodesic`

    static KernelSpec gaussian(double sigma, double amplitude = 1.0);
    static KernelSpec difference(double a_e, double sigma_e, double a_i, double sigma_i);

    /// Radial profile at distance r.
    double profile(double r) const;
};

/// Normalized Gaussian 1 / (2 pi s^2) exp(-r^2 / (2 s^2)).
double gauss2d(double r, double sigma);

/// sum over |i|, |j| <= radius of gauss2d(|x - y + period (i, j)|, sigma).
double periodic_gauss(const Vec2& x, const Vec2& y, double sigma, double period, int radius = 2);

/// Kernel value between nodes i and j of `points` (first two components for the periodic kinds).
double kernel_value(const KernelSpec& kernel, const std::vector<Vec3>& points, int i, int j);

struct KernelOptions {
    std::size_t max_nodes = 16384;
    /// Optional per-source factor multiplying column j (e.g. an inverse parametrization Jacobian).
    std::vector<double> column_scale;
};

/// Dense W with W_ij = w(x_i, x_j) mu_j (times column_scale_j). Throws InvalidInput when the
/// node count exceeds the cap.
Eigen::MatrixXd kernel_matrix(const std::vector<Vec3>& points, const std::vector<double>& weights,
                              const KernelSpec& kernel, const KernelOptions& options = {});

struct Depression {
    double tau = 20.0;
    double beta = 5.0;
};

struct SimState {
    double t = 0.0;
    Eigen::VectorXd u;
    Eigen::VectorXd q;  ///< empty unless depression is enabled
};

/// du/dt = -u + W (q . f(u)) + g(t); tau dq/dt = 1 - q - beta q f(u).
struct NeuralFieldModel {
    Eigen::MatrixXd weights;
    FiringRate firing;
    std::function<void(double t, Eigen::VectorXd& out)> forcing;  ///< adds g(t) into `out`
    std::optional<Depression> depression;

    std::size_t size() const { return static_cast<std::size_t>(weights.rows()); }
    SimState initial_state(const Eigen::VectorXd& u0) const;
    /// Derivatives of u and (with depression) q.
    void rhs(const SimState& state, Eigen::VectorXd& du, Eigen::VectorXd& dq) const;
};

/// Generic first-order system y' = F(t, y).
using OdeRhs = std::function<void(double t, const Eigen::VectorXd& y, Eigen::VectorXd& dy)>;
/// Called with (step index, t, y) at step 0, every `stride` steps, and at the final step.
using OdeObserver = std::function<void(long step, double t, const Eigen::VectorXd& y)>;

/// Fifth-order Adams-Bashforth with four classical Runge-Kutta bootstrap steps. T must be an
/// integer multiple of dt to 1e-9 relative. Throws NumericalError naming the step when the
/// state becomes non-finite.
Eigen::VectorXd integrate_ab5(const OdeRhs& f, Eigen::VectorXd y0, double t0, double T, double dt, long stride = 0,
                              const OdeObserver& observer = {});

/// Integrates the model; the observer receives the state at the requested stride.
SimState integrate(const NeuralFieldModel& model, const SimState& initial, double T, double dt, long stride = 0,
                   const std::function<void(long step, const SimState&)>& observer = {});

/// Manufactured solution u(t, x) = f^{-1}[G_u(x - x0(t)) + offset] on the periodic square
/// [-pi, pi]^2 with x0(t) = radius (cos t, sin t) and periodic (image-sum) Gaussians, solving
///   u_t = -u + int G_w(x - y) f(u(y)) dy + F(t, x).
/// Convolution of periodic Gaussians is exact, so F = u_t + u - [G_sqrt(s_w^2 + s_u^2) + offset].
struct Manufactured {
    double sigma_u = 1.1;
    double sigma_w = 1.0 / 40.0;
    double offset = 0.1;
    double radius = 0.2;
    double period = 2.0 * 3.14159265358979323846;
    int image_radius = 2;
    FiringRate firing = FiringRate::sigmoid(5.0, 0.5);

    Vec2 center(double t) const;
    double u(double t, const Vec2& x) const;
    double dudt(double t, const Vec2& x) const;
    double forcing(double t, const Vec2& x) const;
    /// The kernel the forcing assumes: Gaussian of width sigma_w on the wrapped distance.
    KernelSpec kernel() const;
};

}  // namespace nfrbf
