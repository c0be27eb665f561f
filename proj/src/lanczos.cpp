#include "adapoly/lanczos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "adapoly/dense_kernels.hpp"
#include "adapoly/philox.hpp"

namespace adapoly {

namespace {

struct LanczosRun {
    double lower = 0.0;
    double upper = 0.0;
    bool early_breakdown = false;  // invariant subspace hit before `steps`
};

LanczosRun lanczos_pass(const CsrMatrixd& a, index_t steps, const Philox4x32& rng,
                        std::uint64_t draw_offset, std::int64_t* spmv_count) {
    const index_t n = a.n_rows;
    Matrixd basis(n, steps);
    Vectord alphas(steps);
    Vectord betas(steps);  // betas[j] computed after step j

    Vectord v(n);
    for (index_t i = 0; i < n; ++i)
        v(i) = rng.gaussian(draw_offset + static_cast<std::uint64_t>(i));
    basis.col(0) = v / v.norm();

    double scale = 0.0;
    index_t completed = 0;
    double beta_res = 0.0;
    bool breakdown = false;
    for (index_t j = 0; j < steps; ++j) {
        Vectord w = csr_spmv(a, basis.col(j));
        if (spmv_count) ++*spmv_count;
        alphas(j) = basis.col(j).dot(w);
        w -= alphas(j) * basis.col(j);
        if (j > 0) w -= betas(j - 1) * basis.col(j - 1);
        // Full reorthogonalization; the second pass removes what the first
        // left behind once w has shrunk.
        for (int pass = 0; pass < 2; ++pass)
            w -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).transpose() * w);
        const double beta = w.norm();
        betas(j) = beta;
        completed = j + 1;
        scale = std::max({scale, std::abs(alphas(j)), beta});
        if (beta <= scale * 1e-13) {
            beta_res = beta;
            breakdown = true;
            break;
        }
        if (j + 1 < steps)
            basis.col(j + 1) = w / beta;
        else
            beta_res = beta;
    }

    Matrixd tri = Matrixd::Zero(completed, completed);
    for (index_t j = 0; j < completed; ++j) {
        tri(j, j) = alphas(j);
        if (j + 1 < completed) {
            tri(j, j + 1) = betas(j);
            tri(j + 1, j) = betas(j);
        }
    }
    const EigDecomposition eig = sym_eig(tri);
    const double r_min = beta_res * std::abs(eig.eigenvectors(completed - 1, 0));
    const double r_max = beta_res * std::abs(eig.eigenvectors(completed - 1, completed - 1));
    LanczosRun run;
    run.lower = eig.eigenvalues(0) - r_min;
    run.upper = eig.eigenvalues(completed - 1) + r_max;
    run.early_breakdown = breakdown && completed < steps;
    return run;
}

}  // namespace

SpectrumBounds estimate_spectrum_bounds(const CsrMatrixd& a, int steps,
                                        std::uint64_t seed,
                                        std::int64_t* spmv_count) {
    if (a.n_rows != a.n_cols)
        throw DimensionError("estimate_spectrum_bounds: matrix not square");
    if (a.n_rows == 0) throw DimensionError("estimate_spectrum_bounds: empty matrix");
    if (steps < 2) throw ConfigError("estimate_spectrum_bounds: need steps >= 2");
    const index_t n = a.n_rows;
    const index_t effective_steps = std::min<index_t>(steps, n);

    const Philox4x32 rng(seed, rng_stream::lanczos);
    double lower = std::numeric_limits<double>::infinity();
    double upper = -std::numeric_limits<double>::infinity();
    for (int attempt = 0; attempt <= 3; ++attempt) {
        const LanczosRun run = lanczos_pass(
            a, effective_steps, rng, static_cast<std::uint64_t>(attempt) * n, spmv_count);
        lower = std::min(lower, run.lower);
        upper = std::max(upper, run.upper);
        if (!run.early_breakdown) break;
    }

    // A (near-)degenerate spectrum leaves the linear map undefined; widen.
    const double magnitude = std::max(std::abs(lower), std::abs(upper));
    if (!(upper - lower > 1e-12 * magnitude)) {
        const double pad = std::max(
            1e-8, std::numeric_limits<double>::epsilon() * static_cast<double>(n) * magnitude);
        lower -= pad;
        upper += pad;
    }
    return {lower, upper};
}

}  // namespace adapoly
