#include "adapoly/filter_bounds.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

namespace adapoly {

namespace {

constexpr double pi = std::numbers::pi;

double inv_abs_sin(double x) {
    const double s = std::abs(std::sin(x));
    return s == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / s;
}

/// (sin u - u cos u) / u^3, series-stabilized: the direct form loses all
/// significant digits below u ~ 1e-5.
double sin_minus_ucos_over_u3(double u) {
    if (u < 0.5) {
        const double u2 = u * u;
        return 1.0 / 3.0 +
               u2 * (-1.0 / 30.0 +
                     u2 * (1.0 / 840.0 +
                           u2 * (-1.0 / 45360.0 + u2 * (1.0 / 3991680.0))));
    }
    return (std::sin(u) - u * std::cos(u)) / (u * u * u);
}

double sinc(double u) { return u == 0.0 ? 1.0 : std::sin(u) / u; }

double adaptive_simpson_step(const std::function<double(double)>& f, double a,
                             double b, double fa, double fm, double fb,
                             double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol) {
    const double m = 0.5 * (a + b);
    const double fa = f(a);
    const double fm = f(m);
    const double fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson_step(f, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace

double j_theta(double theta, double alpha, double beta) {
    if (theta == alpha)
        return inv_abs_sin(alpha) + inv_abs_sin(0.5 * (alpha + beta)) +
               inv_abs_sin(0.5 * (alpha - beta));
    if (theta == beta)
        return inv_abs_sin(beta) + inv_abs_sin(0.5 * (alpha + beta)) +
               inv_abs_sin(0.5 * (alpha - beta));
    return inv_abs_sin(0.5 * (theta + alpha)) + inv_abs_sin(0.5 * (theta - alpha)) +
           inv_abs_sin(0.5 * (theta + beta)) + inv_abs_sin(0.5 * (theta - beta));
}

double c_m_constant(double m) {
    if (!(m > 0.0)) throw ConfigError("c_m_constant: exponent must be positive");

    static std::map<double, double> cache;
    static std::mutex mutex;
    {
        std::lock_guard<std::mutex> lock(mutex);
        const auto it = cache.find(m);
        if (it != cache.end()) return it->second;
    }

    const double tol = 1e-10;

    // Left half [0, pi/2]: smooth, with limit 1/3 at u = 0.
    const auto integrand_left = [m](double u) {
        return std::pow(sinc(u), m - 1.0) * sin_minus_ucos_over_u3(u);
    };
    const double left = adaptive_simpson(integrand_left, 0.0, 0.5 * pi, 0.5 * tol);

    // Right half: substitute u = pi - s, then s = w^(1/m) to absorb the
    // (sin s)^(m-1) endpoint factor, leaving a smooth integrand:
    //   int_{pi/2}^{pi} f du = (1/m) int_0^{(pi/2)^m} h(w^(1/m)) dw,
    //   h(s) = (sin s / s)^(m-1) (sin s + (pi - s) cos s) / (pi - s)^(m+2).
    const auto integrand_right = [m](double w) {
        const double s = std::pow(w, 1.0 / m);
        const double phi =
            (std::sin(s) + (pi - s) * std::cos(s)) / std::pow(pi - s, m + 2.0);
        return std::pow(sinc(s), m - 1.0) * phi;
    };
    const double right =
        adaptive_simpson(integrand_right, 0.0, std::pow(0.5 * pi, m), 0.5 * tol * m) / m;

    const double value = left + right;
    std::lock_guard<std::mutex> lock(mutex);
    cache.emplace(m, value);
    return value;
}

double undamped_bound(double theta, int k, double alpha, double beta) {
    if (k < 1) throw ConfigError("undamped_bound: degree must be >= 1");
    return j_theta(theta, alpha, beta) / (pi * (k + 1));
}

double damped_bound(double theta, int k_i, int k, double m, double alpha,
                    double beta) {
    if (k_i < 1 || k_i > k) throw ConfigError("damped_bound: need 1 <= k_i <= k");
    if (m < 0.0) throw ConfigError("damped_bound: damping exponent must be >= 0");
    if (m == 0.0) return undamped_bound(theta, k_i, alpha, beta);
    const double j = j_theta(theta, alpha, beta);
    const double d = std::pow(sinc(k_i * pi / (k + 1)), m);
    return d * j / (pi * (k_i + 1)) + m * c_m_constant(m) * j / (k + 1) +
           m * pi * (pi - theta) / (3.0 * (k + 1) * (k + 1));
}

double projector_bound(const ChebFilter& f, const Vectord& eigen_thetas, int k_i) {
    if (eigen_thetas.size() == 0)
        throw ConfigError("projector_bound: empty eigenvalue angle list");
    if (k_i < 1 || k_i > f.k_max)
        throw ConfigError("projector_bound: need 1 <= k_i <= k_max");
    double j_star = 0.0;
    for (index_t i = 0; i < eigen_thetas.size(); ++i)
        j_star = std::max(j_star, j_theta(eigen_thetas(i), f.alpha, f.beta));
    const int k = f.k_max;
    if (f.m == 0.0) return j_star / (pi * (k_i + 1));
    const double d = std::pow(sinc(k_i * pi / (k + 1)), f.m);
    return d * j_star / (pi * (k_i + 1)) + f.m * c_m_constant(f.m) * j_star / (k + 1) +
           f.m * pi * pi / (3.0 * (k + 1) * (k + 1));
}

}  // namespace adapoly
