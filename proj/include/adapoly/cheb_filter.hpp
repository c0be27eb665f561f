#pragma once

#include <cstdint>
#include <vector>

#include "adapoly/tiled_matrix.hpp"
#include "adapoly/types.hpp"

namespace adapoly {

/// Estimated enclosure of the operator spectrum. The filter's linear map
/// sends [lambda_min, lambda_max] onto [-1, 1].
struct SpectrumBounds {
    double lambda_min = 0.0;
    double lambda_max = 0.0;

    /// max(|lambda_min|, |lambda_max|), the operator-norm proxy used for
    /// relative convergence thresholds.
    double scale() const {
        return std::max(std::abs(lambda_min), std::abs(lambda_max));
    }
};

/// Fourier coefficients of the step function that is 1 on the angle interval
/// (beta, alpha) and 0 outside: c_0 = (alpha - beta)/pi,
/// c_j = (2/pi) (sin(j alpha) - sin(j beta))/j. Requires 0 <= beta < alpha <= pi.
std::vector<double> chebyshev_step_coeffs(double alpha, double beta, int k);

/// Exponent-m Lanczos damping factors d_j = (sin(j pi/(k+1)) / (j pi/(k+1)))^m
/// for j = 0..k, with d_0 = 1 (sinc limit). m = 0 gives all ones.
std::vector<double> lanczos_damping(int k, double m);

/// Jackson damping factors, offered as an alternative coefficient family.
std::vector<double> jackson_damping(int k);

enum class DampingKind { lanczos, jackson };

/// Damped Chebyshev approximation of the spectral-window step function.
/// Immutable once built; the evaluation degree is passed per call, so one
/// filter serves every truncation depth up to k_max.
struct ChebFilter {
    double interval_a = 0.0;  // target interval in original coordinates
    double interval_b = 0.0;
    double alpha = 0.0;  // arccos of the mapped left endpoint
    double beta = 0.0;   // arccos of the mapped right endpoint
    int k_max = 0;
    double m = 0.0;
    double l1 = 0.0;  // linear spectral map l(x) = l1 x + l2
    double l2 = 0.0;
    SpectrumBounds bounds;
    std::vector<double> coeffs;  // c_j * d_j, j = 0..k_max
    int active_degree = 0;       // initialized to k_max

    double map(double x) const { return l1 * x + l2; }

    /// Map and clamp into the Chebyshev domain [-1, 1]; sets *clamped when
    /// the argument fell outside the estimated spectrum.
    double map_clamped(double x, bool* clamped = nullptr) const {
        const double t = map(x);
        if (t < -1.0 || t > 1.0) {
            if (clamped) *clamped = true;
            return t < -1.0 ? -1.0 : 1.0;
        }
        return t;
    }
};

/// Build the degree-k filter for [a, b] inside the given spectrum bounds.
ChebFilter build_filter(double a, double b, const SpectrumBounds& bounds, int k,
                        double m, DampingKind damping = DampingKind::lanczos);

/// Pointwise filter values at the given degree via the forward three-term
/// recurrence. Arguments outside the bounds are clamped to the domain edge;
/// *clamped counts how many were.
Vectord eval_filter_scalar(const ChebFilter& f, const Vectord& x, int degree,
                           index_t* clamped = nullptr);
double eval_filter_scalar(const ChebFilter& f, double x, int degree);

/// rho(l(A)) X by Clenshaw's backward recurrence: exactly `degree` products
/// of A against an n x q block, all through the tiled kernel. When the
/// trailing coefficient is zero the degree is first reduced to the largest
/// nonzero coefficient index. Degrees 0 and 1 use the direct formula.
/// spmv_count, when given, is incremented by (effective degree) * q.
Matrixd clenshaw_apply(const ChebFilter& f, const TiledMatrixd& a,
                       const Eigen::Ref<const Matrixd>& x, int degree,
                       std::int64_t* spmv_count = nullptr);

/// Setup-phase degree k1 = ceil(C / (alpha - beta)) - 1, floored at 1.
/// Requires C > alpha - beta.
int initial_degree(double alpha, double beta, double c);

/// Smallest degree j such that the magnitude-sorted filter values at the
/// Ritz points satisfy |gamma_p / gamma_e| < tau_a, accumulated one
/// coefficient at a time; k_max when no degree qualifies. The result is
/// floored at 3 (and never exceeds k_max).
int adaptive_degree(const ChebFilter& f, const Vectord& ritz, index_t e_i,
                    double tau_a);

}  // namespace adapoly
