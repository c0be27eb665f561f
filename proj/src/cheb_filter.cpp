#include "adapoly/cheb_filter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace adapoly {

namespace {

constexpr double pi = std::numbers::pi;

using ArrayMap = Eigen::Map<Eigen::ArrayXd>;
using ConstArrayMap = Eigen::Map<const Eigen::ArrayXd>;

ArrayMap as_array(BlockMatrixd& b) { return {b.data(), b.size()}; }
ConstArrayMap as_array(const BlockMatrixd& b) { return {b.data(), b.size()}; }

}  // namespace

std::vector<double> chebyshev_step_coeffs(double alpha, double beta, int k) {
    if (!(0.0 <= beta && beta < alpha && alpha <= pi))
        throw ConfigError("chebyshev_step_coeffs: need 0 <= beta < alpha <= pi");
    if (k < 0) throw ConfigError("chebyshev_step_coeffs: negative degree");
    std::vector<double> c(static_cast<std::size_t>(k) + 1);
    c[0] = (alpha - beta) / pi;
    // An endpoint equal to the double nearest pi means "exactly pi", where
    // every sin(j alpha) vanishes; honor that instead of sin(j * rounded pi).
    const bool alpha_is_pi = alpha == pi;
    const bool beta_is_pi = beta == pi;
    for (int j = 1; j <= k; ++j) {
        const double sa = alpha_is_pi ? 0.0 : std::sin(j * alpha);
        const double sb = beta_is_pi ? 0.0 : std::sin(j * beta);
        c[j] = (2.0 / pi) * (sa - sb) / j;
    }
    return c;
}

std::vector<double> lanczos_damping(int k, double m) {
    if (k < 1) throw ConfigError("lanczos_damping: degree must be >= 1");
    if (m < 0.0) throw ConfigError("lanczos_damping: exponent must be >= 0");
    std::vector<double> d(static_cast<std::size_t>(k) + 1);
    d[0] = 1.0;  // sinc limit at j = 0
    for (int j = 1; j <= k; ++j) {
        const double u = j * pi / (k + 1);
        d[j] = std::pow(std::sin(u) / u, m);
    }
    return d;
}

std::vector<double> jackson_damping(int k) {
    if (k < 1) throw ConfigError("jackson_damping: degree must be >= 1");
    std::vector<double> d(static_cast<std::size_t>(k) + 1);
    d[0] = 1.0;
    const double h = pi / (k + 2);
    for (int j = 1; j <= k; ++j)
        d[j] = ((k + 2 - j) * std::sin(h) * std::cos(j * h) +
                std::cos(h) * std::sin(j * h)) /
               ((k + 2) * std::sin(h));
    return d;
}

ChebFilter build_filter(double a, double b, const SpectrumBounds& bounds, int k,
                        double m, DampingKind damping) {
    if (!std::isfinite(bounds.lambda_min) || !std::isfinite(bounds.lambda_max) ||
        !(bounds.lambda_min < bounds.lambda_max))
        throw ConfigError("build_filter: invalid spectrum bounds");
    if (!(bounds.lambda_min <= a && a < b && b <= bounds.lambda_max))
        throw ConfigError("build_filter: target interval must lie inside the spectrum bounds");
    if (k < 1) throw ConfigError("build_filter: degree must be >= 1");
    if (m < 0.0) throw ConfigError("build_filter: damping exponent must be >= 0");

    ChebFilter f;
    f.interval_a = a;
    f.interval_b = b;
    f.k_max = k;
    f.m = m;
    f.bounds = bounds;
    const double span = bounds.lambda_max - bounds.lambda_min;
    f.l1 = 2.0 / span;
    f.l2 = -(bounds.lambda_max + bounds.lambda_min) / span;
    f.alpha = std::acos(f.map_clamped(a));
    f.beta = std::acos(f.map_clamped(b));
    if (!(f.alpha > f.beta))
        throw ConfigError("build_filter: interval collapses under the spectral map");

    const std::vector<double> c = chebyshev_step_coeffs(f.alpha, f.beta, k);
    const std::vector<double> d =
        damping == DampingKind::lanczos ? lanczos_damping(k, m) : jackson_damping(k);
    f.coeffs.resize(c.size());
    for (std::size_t j = 0; j < c.size(); ++j) f.coeffs[j] = c[j] * d[j];
    f.active_degree = k;
    return f;
}

double eval_filter_scalar(const ChebFilter& f, double x, int degree) {
    const double t = f.map_clamped(x);
    double acc = f.coeffs[0];
    if (degree >= 1) {
        double t_prev = 1.0;
        double t_cur = t;
        acc += f.coeffs[1] * t_cur;
        for (int j = 2; j <= degree; ++j) {
            const double t_next = 2.0 * t * t_cur - t_prev;
            acc += f.coeffs[j] * t_next;
            t_prev = t_cur;
            t_cur = t_next;
        }
    }
    return acc;
}

Vectord eval_filter_scalar(const ChebFilter& f, const Vectord& x, int degree,
                           index_t* clamped) {
    if (degree < 0 || degree > f.k_max)
        throw ConfigError("eval_filter_scalar: degree out of range");
    Vectord out(x.size());
    index_t n_clamped = 0;
    for (index_t i = 0; i < x.size(); ++i) {
        bool c = false;
        f.map_clamped(x(i), &c);
        n_clamped += c ? 1 : 0;
        out(i) = eval_filter_scalar(f, x(i), degree);
    }
    if (clamped) *clamped += n_clamped;
    return out;
}

Matrixd clenshaw_apply(const ChebFilter& f, const TiledMatrixd& a,
                       const Eigen::Ref<const Matrixd>& x, int degree,
                       std::int64_t* spmv_count) {
    if (degree < 0 || degree > f.k_max)
        throw ConfigError("clenshaw_apply: degree out of range");
    if (x.rows() != a.n_cols)
        throw DimensionError("clenshaw_apply: operand row count does not match A");
    const index_t q = x.cols();
    if (q == 0) return Matrixd(x.rows(), 0);

    // The recurrence divides by the trailing coefficient; reduce the degree
    // to the largest nonzero coefficient index first.
    int deg = degree;
    while (deg > 0 && f.coeffs[deg] == 0.0) --deg;

    if (spmv_count) *spmv_count += static_cast<std::int64_t>(deg) * q;

    if (deg == 0) return f.coeffs[0] * x;

    BlockMatrixd y = to_block_layout<double>(x, a.t_k);
    BlockMatrixd aw(a.n_rows, q, a.t_k);

    if (deg == 1) {
        maspmm(a, y, aw);
        Matrixd out = from_block_layout(aw);
        return f.coeffs[0] * x + f.coeffs[1] * (f.l1 * out + f.l2 * x);
    }

    BlockMatrixd w(a.n_rows, q, a.t_k);
    BlockMatrixd v(a.n_rows, q, a.t_k);
    const double l1 = f.l1;
    const double l2 = f.l2;

    as_array(w) = f.coeffs[deg] * as_array(y);
    maspmm(a, w, aw);
    as_array(v) = 2.0 * l1 * as_array(aw) +
                  (2.0 * l2 + f.coeffs[deg - 1] / f.coeffs[deg]) * as_array(w);
    std::swap(v, w);
    for (int j = deg - 2; j >= 1; --j) {
        aw.set_zero();
        maspmm(a, w, aw);
        as_array(v) = 2.0 * l1 * as_array(aw) + 2.0 * l2 * as_array(w) -
                      as_array(v) + f.coeffs[j] * as_array(y);
        std::swap(v, w);
    }
    aw.set_zero();
    maspmm(a, w, aw);
    as_array(v) = l1 * as_array(aw) + l2 * as_array(w) - as_array(v) +
                  f.coeffs[0] * as_array(y);
    return from_block_layout(v);
}

int initial_degree(double alpha, double beta, double c) {
    const double width = alpha - beta;
    if (!(width > 0.0)) throw ConfigError("initial_degree: need alpha > beta");
    if (!(c > width)) throw ConfigError("initial_degree: constant must exceed alpha - beta");
    const int k1 = static_cast<int>(std::ceil(c / width)) - 1;
    return std::max(k1, 1);
}

int adaptive_degree(const ChebFilter& f, const Vectord& ritz, index_t e_i,
                    double tau_a) {
    const index_t p = ritz.size();
    if (p < 1) throw ConfigError("adaptive_degree: empty Ritz set");
    if (e_i < 1 || e_i > p)
        throw ConfigError("adaptive_degree: in-interval count out of range");
    if (!(tau_a > 0.0)) throw ConfigError("adaptive_degree: threshold must be positive");

    const int floor_degree = std::min(3, f.k_max);

    Eigen::ArrayXd t(p);
    for (index_t i = 0; i < p; ++i) t(i) = f.map_clamped(ritz(i));

    Eigen::ArrayXd h_prev = Eigen::ArrayXd::Ones(p);
    Eigen::ArrayXd h_cur = t;
    Eigen::ArrayXd gamma = Eigen::ArrayXd::Constant(p, f.coeffs[0]);
    std::vector<double> mags(static_cast<std::size_t>(p));
    for (int j = 1; j <= f.k_max; ++j) {
        gamma += f.coeffs[j] * h_cur;
        for (index_t i = 0; i < p; ++i) mags[static_cast<std::size_t>(i)] = std::abs(gamma(i));
        std::sort(mags.begin(), mags.end(), std::greater<double>());
        const double denom = mags[static_cast<std::size_t>(e_i - 1)];
        const double num = mags[static_cast<std::size_t>(p - 1)];
        if (denom > 0.0 && num / denom < tau_a)
            return std::min(std::max(j, floor_degree), f.k_max);
        const Eigen::ArrayXd h_next = 2.0 * t * h_cur - h_prev;
        h_prev = h_cur;
        h_cur = h_next;
    }
    return f.k_max;
}

}  // namespace adapoly
