#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "adapoly/cheb_filter.hpp"
#include "adapoly/csr_matrix.hpp"
#include "adapoly/tiled_matrix.hpp"
#include "adapoly/types.hpp"

namespace adapoly {

struct SolverConfig {
    double interval_a = 0.0;
    double interval_b = 0.0;
    double tau_c = 1e-10;      // convergence threshold, relative to ||A||
    double tau_a = 1e-3;       // adaptive-degree threshold
    double m = 0.5;            // damping exponent
    double c = 1.4;            // initial-degree constant
    double k_multiplier = 2.5; // k = ceil(k_multiplier * k1)
    double mu = 1.8;           // subspace oversampling factor
    index_t max_iter = 100;
    index_t lanczos_steps = 40;
    index_t trace_probes = 30;
    std::uint64_t rng_seed = 0;
    std::optional<index_t> p_override;
    std::optional<index_t> tile_ti;
    std::optional<index_t> tile_tk;
    bool spurious_detection = true;  // test hook; leave on
    bool collect_diagnostics = false;
};

/// Evolving iteration state: locked pairs, the active basis, and the
/// bookkeeping the stall-based spurious exclusion needs. Owned by solve();
/// exposed as a type so the iteration's data model is explicit.
struct SolverState {
    std::vector<double> locked_values;
    Matrixd locked_vectors;  // first n_lock columns are valid
    Matrixd active_basis;    // current Ritz vectors not yet locked
    index_t n_lock = 0;
    index_t n_check_prev = 0;
    index_t iteration = 0;
    int degree = 0;          // filter degree used by the current iteration
    Vectord ritz_values;     // latest Rayleigh-Ritz values (active block)
    Vectord ritz_residuals;  // residuals of the in-interval subset
};

struct IterationRecord {
    index_t iteration = 0;
    int degree = 0;
    index_t active_width = 0;
    index_t e_in_interval = 0;
    index_t n_locked_total = 0;
    double max_residual = 0.0;  // over in-interval Ritz pairs; 0 when e = 0
    std::int64_t spmv_filter = 0;
    std::int64_t spmv_residual = 0;
    double orth_error = -1.0;  // ||[V Vhat]^T [V Vhat] - I||_F, diagnostics only
};

struct StageTimings {
    double setup = 0.0;
    double filter = 0.0;
    double orth = 0.0;
    double rayleigh_ritz = 0.0;
    double residuals = 0.0;
    double other = 0.0;
};

struct SolveResult {
    Vectord eigenvalues;   // ascending, all inside [a, b]
    Matrixd eigenvectors;  // n x e, column i pairs with eigenvalues(i)
    bool converged = false;
    bool dense_fallback = false;
    index_t iterations = 0;
    std::int64_t spmv_total = 0;
    double avg_degree = 0.0;
    double max_residual = 0.0;  // re-measured over returned pairs
    std::vector<int> degree_history;
    std::vector<IterationRecord> history;
    SpectrumBounds bounds;
    double e_estimate = 0.0;
    index_t subspace_dim = 0;  // p
    StageTimings timings;
};

/// Boundary-distance threshold min_j min(|ritz_j - a|, |ritz_j - b|) used to
/// separate trustworthy in-interval Ritz pairs from suspected spurious ones.
/// All entries must lie inside [a, b]; the array must be non-empty.
double spurious_threshold(const Vectord& ritz_in_interval, double a, double b);

/// Residual norms ||A v_j - lambda_j v_j||_2, one per column.
Vectord compute_residuals(const CsrMatrixd& a, const Matrixd& vectors,
                          const Vectord& values,
                          std::int64_t* spmv_count = nullptr);

/// Hutchinson estimate of the eigenvalue count in the filter's interval:
/// mean of v^T rho(A) v over Rademacher probes, with the filter applied at
/// full degree. Returns the raw real estimate.
double estimate_eigcount(const TiledMatrixd& a, const ChebFilter& f, index_t probes,
                         std::uint64_t seed, std::int64_t* spmv_count = nullptr);

/// Filtered subspace iteration with adaptive polynomial degree, deflation,
/// and spurious-Ritz exclusion. Finds all eigenpairs of the symmetric
/// operator inside [config.interval_a, config.interval_b].
SolveResult solve(const CsrMatrixd& a, const SolverConfig& config);

}  // namespace adapoly
