#include "nfrbf/neural_field.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "nfrbf/error.hpp"
#include "nfrbf/geometry.hpp"

namespace nfrbf {

namespace {

constexpr double kPi = std::numbers::pi;

double horner(const std::array<double, 10>& c, double s) {
    double v = 0.0;
    for (int i = 9; i >= 0; --i) v = v * s + c[i];
    return v;
}

}  // namespace

std::array<double, 10> smooth_spline_coefficients() { return {0, 0, 0, 0, 0, 126, -420, 540, -315, 70}; }

FiringRate FiringRate::sigmoid(double gain, double threshold) {
    if (!(gain > 0.0)) throw InvalidInput("sigmoid gain must be positive");
    FiringRate f;
    f.kind = Kind::sigmoid;
    f.gain = gain;
    f.threshold = threshold;
    return f;
}

FiringRate FiringRate::smooth_spline(double lo, double hi) {
    if (!(hi > lo)) throw InvalidInput("spline firing rate needs lo < hi");
    FiringRate f;
    f.kind = Kind::smooth_spline;
    f.lo = lo;
    f.hi = hi;
    f.coeffs = smooth_spline_coefficients();
    return f;
}

double FiringRate::operator()(double u) const {
    if (kind == Kind::sigmoid) return 1.0 / (1.0 + std::exp(-gain * (u - threshold)));
    if (u <= lo) return 0.0;
    if (u >= hi) return 1.0;
    return horner(coeffs, (u - lo) / (hi - lo));
}

double FiringRate::derivative(double u) const {
    if (kind == Kind::sigmoid) {
        const double y = (*this)(u);
        return gain * y * (1.0 - y);
    }
    if (u <= lo || u >= hi) return 0.0;
    const double s = (u - lo) / (hi - lo);
    double v = 0.0;
    for (int i = 9; i >= 1; --i) v = v * s + i * coeffs[i];
    return v / (hi - lo);
}

double FiringRate::inverse(double y) const {
    if (kind != Kind::sigmoid) throw InvalidInput("only the sigmoid firing rate is invertible");
    if (!(y > 0.0 && y < 1.0)) throw InvalidInput("sigmoid inverse needs 0 < y < 1, got " + std::to_string(y));
    return threshold - std::log(1.0 / y - 1.0) / gain;
}

double gauss2d(double r, double sigma) {
    return std::exp(-r * r / (2.0 * sigma * sigma)) / (2.0 * kPi * sigma * sigma);
}

double periodic_gauss(const Vec2& x, const Vec2& y, double sigma, double period, int radius) {
    double s = 0.0;
    for (int i = -radius; i <= radius; ++i)
        for (int j = -radius; j <= radius; ++j) s += gauss2d((x - y + period * Vec2(i, j)).norm(), sigma);
    return s;
}

KernelSpec KernelSpec::gaussian(double sigma, double amplitude) {
    if (!(sigma > 0.0)) throw InvalidInput("kernel width must be positive");
    KernelSpec k;
    k.kind = Kind::gaussian;
    k.sigma = sigma;
    k.amplitude = amplitude;
    return k;
}

KernelSpec KernelSpec::difference(double a_e, double sigma_e, double a_i, double sigma_i) {
    if (!(sigma_e > 0.0 && sigma_i > 0.0)) throw InvalidInput("kernel widths must be positive");
    KernelSpec k;
    k.kind = Kind::difference;
    k.a_e = a_e;
    k.sigma_e = sigma_e;
    k.a_i = a_i;
    k.sigma_i = sigma_i;
    return k;
}

double KernelSpec::profile(double r) const {
    switch (kind) {
        case Kind::gaussian: return amplitude * gauss2d(r, sigma);
        case Kind::difference: return a_e * gauss2d(r, sigma_e) - a_i * gauss2d(r, sigma_i);
        case Kind::constant: return amplitude;
    }
    return 0.0;
}

double kernel_value(const KernelSpec& k, const std::vector<Vec3>& points, int i, int j) {
    switch (k.distance) {
        case DistanceKind::euclidean: return k.profile((points[i] - points[j]).norm());
        case DistanceKind::periodic:
            return k.profile(periodic_distance(points[i].head<2>(), points[j].head<2>(), k.period));
        case DistanceKind::geodesic: return k.profile((*k.geodesic)(i, j));
        case DistanceKind::image_sum: {
            const Vec2 d = points[i].head<2>() - points[j].head<2>();
            double s = 0.0;
            for (int a = -k.image_radius; a <= k.image_radius; ++a)
                for (int b = -k.image_radius; b <= k.image_radius; ++b)
                    s += k.profile((d + k.period * Vec2(a, b)).norm());
            return s;
        }
    }
    return 0.0;
}

Eigen::MatrixXd kernel_matrix(const std::vector<Vec3>& points, const std::vector<double>& weights,
                              const KernelSpec& kernel, const KernelOptions& options) {
    const std::size_t n = points.size();
    if (weights.size() != n) throw InvalidInput("kernel_matrix: weights and nodes differ in length");
    if (n > options.max_nodes)
        throw InvalidInput("kernel_matrix: " + std::to_string(n) + " nodes exceed the dense limit of " +
                           std::to_string(options.max_nodes) + "; lower n");
    if (!options.column_scale.empty() && options.column_scale.size() != n)
        throw InvalidInput("kernel_matrix: column_scale length mismatch");
    if (kernel.distance == DistanceKind::geodesic &&
        (!kernel.geodesic || kernel.geodesic->rows() != static_cast<Eigen::Index>(n) ||
         kernel.geodesic->cols() != static_cast<Eigen::Index>(n)))
        throw InvalidInput("kernel_matrix: geodesic distances must be an n x n matrix");
    const int m = static_cast<int>(n);
    Eigen::MatrixXd w(m, m);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            double c = kernel_value(kernel, points, i, j) * weights[j];
            if (!options.column_scale.empty()) c *= options.column_scale[j];
            w(i, j) = c;
        }
    return w;
}

SimState NeuralFieldModel::initial_state(const Eigen::VectorXd& u0) const {
    if (u0.size() != weights.rows()) throw InvalidInput("initial state length does not match the kernel matrix");
    SimState s;
    s.u = u0;
    if (depression) s.q = Eigen::VectorXd::Ones(u0.size());
    return s;
}

void NeuralFieldModel::rhs(const SimState& s, Eigen::VectorXd& du, Eigen::VectorXd& dq) const {
    const Eigen::VectorXd fu = s.u.unaryExpr([this](double v) { return firing(v); });
    if (depression) {
        du.noalias() = weights * s.q.cwiseProduct(fu);
        dq = ((1.0 - s.q.array()) - depression->beta * s.q.array() * fu.array()) / depression->tau;
    } else {
        du.noalias() = weights * fu;
        dq.resize(0);
    }
    du -= s.u;
    if (forcing) forcing(s.t, du);
}

Eigen::VectorXd integrate_ab5(const OdeRhs& f, Eigen::VectorXd y, double t0, double T, double dt, long stride,
                              const OdeObserver& observer) {
    if (!(dt > 0.0) || !(T >= 0.0)) throw InvalidInput("integration needs dt > 0 and T >= 0");
    const long steps = std::lround(T / dt);
    if (std::abs(steps * dt - T) > 1e-9 * std::max(T, dt))
        throw InvalidInput("final time must be an integer multiple of the step");
    static constexpr double ab[5] = {1901.0 / 720, -2774.0 / 720, 2616.0 / 720, -1274.0 / 720, 251.0 / 720};

    // hist[0] is the newest derivative
    std::array<Eigen::VectorXd, 5> hist;
    Eigen::VectorXd k1, k2, k3, k4, tmp;
    if (observer) observer(0, t0, y);
    for (long n = 0; n < steps; ++n) {
        const double t = t0 + n * dt;
        for (int r = 4; r > 0; --r) std::swap(hist[r], hist[r - 1]);
        f(t, y, hist[0]);
        if (n < 4) {
            k1 = hist[0];
            tmp = y + 0.5 * dt * k1;
            f(t + 0.5 * dt, tmp, k2);
            tmp = y + 0.5 * dt * k2;
            f(t + 0.5 * dt, tmp, k3);
            tmp = y + dt * k3;
            f(t + dt, tmp, k4);
            y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        } else {
            y += dt * (ab[0] * hist[0] + ab[1] * hist[1] + ab[2] * hist[2] + ab[3] * hist[3] + ab[4] * hist[4]);
        }
        if (!y.allFinite())
            throw NumericalError("non-finite state at step " + std::to_string(n + 1) + " (t = " +
                                 std::to_string(t + dt) + ")");
        const long done = n + 1;
        if (observer && (done == steps || (stride > 0 && done % stride == 0))) observer(done, t0 + done * dt, y);
    }
    return y;
}

SimState integrate(const NeuralFieldModel& model, const SimState& initial, double T, double dt, long stride,
                   const std::function<void(long, const SimState&)>& observer) {
    const Eigen::Index n = initial.u.size();
    if (n != model.weights.rows()) throw InvalidInput("state length does not match the kernel matrix");
    const bool dep = model.depression.has_value();
    if (dep && initial.q.size() != n) throw InvalidInput("depression needs a synaptic resource per node");
    const Eigen::Index m = dep ? 2 * n : n;

    auto unpack = [&](double t, const Eigen::VectorXd& y) {
        SimState s;
        s.t = t;
        s.u = y.head(n);
        if (dep) s.q = y.tail(n);
        return s;
    };
    const OdeRhs f = [&](double t, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
        const SimState s = unpack(t, y);
        Eigen::VectorXd du, dq;
        model.rhs(s, du, dq);
        dy.resize(m);
        dy.head(n) = du;
        if (dep) dy.tail(n) = dq;
    };
    Eigen::VectorXd y0(m);
    y0.head(n) = initial.u;
    if (dep) y0.tail(n) = initial.q;
    OdeObserver obs;
    if (observer) obs = [&](long step, double t, const Eigen::VectorXd& y) { observer(step, unpack(t, y)); };
    const Eigen::VectorXd y = integrate_ab5(f, std::move(y0), initial.t, T, dt, stride, obs);
    return unpack(initial.t + std::lround(T / dt) * dt, y);
}

Vec2 Manufactured::center(double t) const { return radius * Vec2(std::cos(t), std::sin(t)); }

double Manufactured::u(double t, const Vec2& x) const {
    return firing.inverse(periodic_gauss(x, center(t), sigma_u, period, image_radius) + offset);
}

double Manufactured::dudt(double t, const Vec2& x) const {
    const Vec2 c = center(t);
    const Vec2 v = radius * Vec2(-std::sin(t), std::cos(t));
    double y = offset, dy = 0.0;
    for (int i = -image_radius; i <= image_radius; ++i)
        for (int j = -image_radius; j <= image_radius; ++j) {
            const Vec2 d = x - c + period * Vec2(i, j);
            const double g = gauss2d(d.norm(), sigma_u);
            y += g;
            dy += g * d.dot(v) / (sigma_u * sigma_u);
        }
    // (f^{-1})'(y) = 1 / (gain y (1 - y)) for the sigmoid
    return dy / (firing.gain * y * (1.0 - y));
}

double Manufactured::forcing(double t, const Vec2& x) const {
    const double s = std::sqrt(sigma_w * sigma_w + sigma_u * sigma_u);
    return dudt(t, x) + u(t, x) - (periodic_gauss(x, center(t), s, period, image_radius) + offset);
}

KernelSpec Manufactured::kernel() const {
    KernelSpec k = KernelSpec::gaussian(sigma_w);
    k.distance = DistanceKind::periodic;
    k.period = period;
    return k;
}

}  // namespace nfrbf
