#include "adapoly/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "adapoly/dense_kernels.hpp"
#include "adapoly/lanczos.hpp"
#include "adapoly/philox.hpp"

namespace adapoly {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void validate_config(const SolverConfig& cfg) {
    if (!(cfg.interval_a < cfg.interval_b))
        throw ConfigError("solve: need interval_a < interval_b");
    if (!(cfg.tau_c > 0.0 && cfg.tau_c < 1.0))
        throw ConfigError("solve: tau_c must lie in (0,1)");
    if (!(cfg.tau_a > 0.0 && cfg.tau_a < 1.0))
        throw ConfigError("solve: tau_a must lie in (0,1)");
    if (!(cfg.mu >= 1.0)) throw ConfigError("solve: mu must be >= 1");
    if (cfg.m < 0.0) throw ConfigError("solve: damping exponent must be >= 0");
    if (!(cfg.c > 0.0)) throw ConfigError("solve: initial-degree constant must be positive");
    if (!(cfg.k_multiplier >= 1.0)) throw ConfigError("solve: k_multiplier must be >= 1");
    if (cfg.max_iter < 1) throw ConfigError("solve: max_iter must be >= 1");
    if (cfg.lanczos_steps < 2) throw ConfigError("solve: lanczos_steps must be >= 2");
    if (cfg.trace_probes < 1) throw ConfigError("solve: trace_probes must be >= 1");
    if (cfg.p_override && *cfg.p_override < 1)
        throw ConfigError("solve: p_override must be >= 1");
}

/// Sort eigenpairs ascending and load them into the result.
void emit_pairs(SolveResult& res, const std::vector<double>& values,
                const Matrixd& vectors, index_t count) {
    std::vector<index_t> order(static_cast<std::size_t>(count));
    std::iota(order.begin(), order.end(), index_t{0});
    std::sort(order.begin(), order.end(),
              [&](index_t i, index_t j) { return values[i] < values[j]; });
    res.eigenvalues.resize(count);
    res.eigenvectors.resize(vectors.rows(), count);
    for (index_t i = 0; i < count; ++i) {
        res.eigenvalues(i) = values[static_cast<std::size_t>(order[i])];
        res.eigenvectors.col(i) = vectors.col(order[i]);
    }
}

/// Replace missing basis columns with fresh random directions orthogonal to
/// the existing ones. Only reached when orthogonalization dropped dependent
/// columns, which indicates a numerically collapsed filtered block.
Matrixd top_up_basis(const Matrixd& q, index_t target_cols, std::uint64_t seed,
                     std::uint64_t draw_offset) {
    const index_t n = q.rows();
    Matrixd full(n, target_cols);
    full.leftCols(q.cols()) = q;
    const Philox4x32 rng(seed, rng_stream::basis_topup);
    index_t have = q.cols();
    std::uint64_t draw = draw_offset;
    while (have < target_cols) {
        Vectord v(n);
        for (index_t i = 0; i < n; ++i) v(i) = rng.gaussian(draw++);
        for (int pass = 0; pass < 2; ++pass)
            v -= full.leftCols(have) * (full.leftCols(have).transpose() * v);
        const double nrm = v.norm();
        if (nrm <= 1e-8) continue;
        full.col(have) = v / nrm;
        ++have;
    }
    return full;
}

}  // namespace

double spurious_threshold(const Vectord& ritz_in_interval, double a, double b) {
    if (ritz_in_interval.size() == 0)
        throw ConfigError("spurious_threshold: empty Ritz set");
    double tau = std::numeric_limits<double>::infinity();
    for (index_t i = 0; i < ritz_in_interval.size(); ++i) {
        const double x = ritz_in_interval(i);
        if (x < a || x > b)
            throw ConfigError("spurious_threshold: Ritz value outside the interval");
        tau = std::min(tau, std::min(x - a, b - x));
    }
    return tau;
}

Vectord compute_residuals(const CsrMatrixd& a, const Matrixd& vectors,
                          const Vectord& values, std::int64_t* spmv_count) {
    if (vectors.cols() != values.size())
        throw DimensionError("compute_residuals: unpaired inputs");
    if (vectors.rows() != a.n_cols)
        throw DimensionError("compute_residuals: vector length does not match A");
    const Matrixd av = naive_spmm(a, vectors);
    if (spmv_count) *spmv_count += vectors.cols();
    Vectord r(values.size());
    for (index_t j = 0; j < values.size(); ++j)
        r(j) = (av.col(j) - values(j) * vectors.col(j)).norm();
    return r;
}

double estimate_eigcount(const TiledMatrixd& a, const ChebFilter& f, index_t probes,
                         std::uint64_t seed, std::int64_t* spmv_count) {
    if (probes < 1) throw ConfigError("estimate_eigcount: need at least one probe");
    Matrixd v(a.n_rows, probes);
    fill_rademacher(v, seed, rng_stream::trace_probes);
    const Matrixd w = clenshaw_apply(f, a, v, f.k_max, spmv_count);
    double acc = 0.0;
    for (index_t c = 0; c < probes; ++c) acc += v.col(c).dot(w.col(c));
    return acc / static_cast<double>(probes);
}

SolveResult solve(const CsrMatrixd& a, const SolverConfig& cfg) {
    validate_config(cfg);
    if (a.n_rows != a.n_cols) throw DimensionError("solve: matrix not square");
    const index_t n = a.n_rows;
    const double lo = cfg.interval_a;
    const double hi = cfg.interval_b;

    SolveResult res;
    const auto setup_start = Clock::now();

    // --- Setup: spectrum bounds, filter, eigenvalue count, subspace size.
    res.bounds = estimate_spectrum_bounds(a, static_cast<int>(cfg.lanczos_steps),
                                          cfg.rng_seed, &res.spmv_total);
    if (!(res.bounds.lambda_min <= lo && hi <= res.bounds.lambda_max))
        throw ConfigError("solve: target interval lies outside the estimated spectrum [" +
                          std::to_string(res.bounds.lambda_min) + ", " +
                          std::to_string(res.bounds.lambda_max) + "]");
    const double a_norm = res.bounds.scale();

    const double span = res.bounds.lambda_max - res.bounds.lambda_min;
    const double l1 = 2.0 / span;
    const double l2 = -(res.bounds.lambda_max + res.bounds.lambda_min) / span;
    const auto mapc = [&](double x) { return std::clamp(l1 * x + l2, -1.0, 1.0); };
    const double alpha = std::acos(mapc(lo));
    const double beta = std::acos(mapc(hi));
    if (!(alpha > beta))
        throw ConfigError("solve: interval collapses under the spectral map");
    const int k1 = initial_degree(alpha, beta, cfg.c);
    const int k_max = std::max<int>(
        k1, static_cast<int>(std::ceil(cfg.k_multiplier * static_cast<double>(k1))));
    const ChebFilter filter = build_filter(lo, hi, res.bounds, k_max, cfg.m);

    const index_t ti = cfg.tile_ti.value_or(default_tile_ti);
    const index_t tk = cfg.tile_tk.value_or(default_tile_tk);
    const TiledMatrixd tiled = csr_to_tiled(a, ti, tk);

    res.e_estimate =
        estimate_eigcount(tiled, filter, cfg.trace_probes, cfg.rng_seed, &res.spmv_total);

    index_t p = 0;
    if (cfg.p_override) {
        p = *cfg.p_override;
    } else {
        if (res.e_estimate < 0.5) {
            // No eigenvalues detected in the interval; nothing to iterate on.
            res.converged = true;
            res.eigenvalues.resize(0);
            res.eigenvectors.resize(n, 0);
            res.timings.setup = seconds_since(setup_start);
            return res;
        }
        const auto e_ceil =
            static_cast<index_t>(std::ceil(std::max(res.e_estimate, 0.0)));
        p = std::max<index_t>(
            {static_cast<index_t>(std::ceil(cfg.mu * static_cast<double>(e_ceil))),
             e_ceil + 5, 10});
    }
    res.subspace_dim = std::min(p, n);

    if (p >= n) {
        // Subspace as large as the problem: the dense path is cheaper and exact.
        const EigDecomposition eig = sym_eig(a.to_dense());
        std::vector<double> vals;
        Matrixd vecs(n, n);
        index_t count = 0;
        for (index_t i = 0; i < n; ++i) {
            if (eig.eigenvalues(i) >= lo && eig.eigenvalues(i) <= hi) {
                vals.push_back(eig.eigenvalues(i));
                vecs.col(count++) = eig.eigenvectors.col(i);
            }
        }
        emit_pairs(res, vals, vecs, count);
        const Vectord final_res =
            compute_residuals(a, res.eigenvectors, res.eigenvalues, &res.spmv_total);
        res.max_residual = final_res.size() > 0 ? final_res.maxCoeff() : 0.0;
        res.converged = true;
        res.dense_fallback = true;
        res.timings.setup = seconds_since(setup_start);
        return res;
    }

    Matrixd initial(n, p);
    fill_gaussian(initial, cfg.rng_seed, rng_stream::initial_basis);

    SolverState st;
    st.locked_vectors.resize(n, p);
    st.active_basis = cholesky_qr(initial);
    if (st.active_basis.cols() < p)
        st.active_basis = top_up_basis(st.active_basis, p, cfg.rng_seed, 0);
    st.degree = std::min(k1, k_max);

    res.timings.setup = seconds_since(setup_start);

    // --- Filtered subspace iteration.
    int empty_streak = 0;
    while (st.iteration < cfg.max_iter) {
        ++st.iteration;
        IterationRecord rec;
        rec.iteration = st.iteration;
        rec.degree = st.degree;
        rec.active_width = p - st.n_lock;

        auto t = Clock::now();
        const Matrixd filtered =
            clenshaw_apply(filter, tiled, st.active_basis, st.degree, &rec.spmv_filter);
        res.timings.filter += seconds_since(t);

        t = Clock::now();
        Matrixd stacked(n, p);
        stacked.leftCols(st.n_lock) = st.locked_vectors.leftCols(st.n_lock);
        stacked.rightCols(p - st.n_lock) = filtered;
        Matrixd q = cholesky_qr(stacked);
        if (q.cols() < p)
            q = top_up_basis(q, p, cfg.rng_seed,
                             static_cast<std::uint64_t>(st.iteration) << 32);
        const Matrixd q_active = q.rightCols(p - st.n_lock);
        res.timings.orth += seconds_since(t);

        t = Clock::now();
        RitzPairs ritz = rayleigh_ritz(a, q_active);
        st.active_basis = std::move(ritz.vectors);
        st.ritz_values = std::move(ritz.values);
        res.timings.rayleigh_ritz += seconds_since(t);

        t = Clock::now();
        if (cfg.collect_diagnostics) {
            Matrixd joint(n, p);
            joint.leftCols(st.n_lock) = st.locked_vectors.leftCols(st.n_lock);
            joint.rightCols(p - st.n_lock) = st.active_basis;
            rec.orth_error =
                (joint.transpose() * joint - Matrixd::Identity(p, p)).norm();
        }

        std::vector<index_t> in_interval;
        for (index_t j = 0; j < st.ritz_values.size(); ++j)
            if (st.ritz_values(j) >= lo && st.ritz_values(j) <= hi)
                in_interval.push_back(j);
        const auto e_i = static_cast<index_t>(in_interval.size());
        rec.e_in_interval = e_i;
        rec.n_locked_total = st.n_lock;

        if (e_i == 0) {
            ++empty_streak;
            res.degree_history.push_back(st.degree);
            res.history.push_back(rec);
            res.iterations = st.iteration;
            res.timings.other += seconds_since(t);
            if (st.iteration > 3 && empty_streak >= 10) {
                // Persistently empty target interval; report the (empty or
                // partial) locked set as converged.
                res.converged = true;
                break;
            }
            continue;
        }
        empty_streak = 0;

        const int next_degree =
            adaptive_degree(filter, st.ritz_values, e_i, cfg.tau_a);
        res.timings.other += seconds_since(t);

        t = Clock::now();
        Matrixd vectors_in(n, e_i);
        Vectord values_in(e_i);
        for (index_t c = 0; c < e_i; ++c) {
            vectors_in.col(c) = st.active_basis.col(in_interval[static_cast<std::size_t>(c)]);
            values_in(c) = st.ritz_values(in_interval[static_cast<std::size_t>(c)]);
        }
        st.ritz_residuals =
            compute_residuals(a, vectors_in, values_in, &rec.spmv_residual);
        rec.max_residual = st.ritz_residuals.maxCoeff();
        res.timings.residuals += seconds_since(t);

        t = Clock::now();
        const double tau_s = spurious_threshold(values_in, lo, hi);

        // Positions (0..e_i-1) still subject to the convergence test.
        std::vector<index_t> test_set(static_cast<std::size_t>(e_i));
        std::iota(test_set.begin(), test_set.end(), index_t{0});
        if (cfg.spurious_detection && tau_s > 0.0) {
            std::vector<index_t> checked;
            for (index_t c = 0; c < e_i; ++c)
                if (st.ritz_residuals(c) < tau_s) checked.push_back(c);
            const index_t n_check = static_cast<index_t>(checked.size()) + st.n_lock;
            if (n_check > 0 && n_check == st.n_check_prev) test_set = checked;
            st.n_check_prev = n_check;
        }

        const double lock_threshold = cfg.tau_c * a_norm;
        std::vector<bool> lock_flag(static_cast<std::size_t>(st.ritz_values.size()), false);
        index_t n_new_locks = 0;
        index_t n_unconverged = 0;
        for (const index_t c : test_set) {
            if (st.ritz_residuals(c) < lock_threshold) {
                const index_t j = in_interval[static_cast<std::size_t>(c)];
                lock_flag[static_cast<std::size_t>(j)] = true;
                st.locked_values.push_back(st.ritz_values(j));
                st.locked_vectors.col(st.n_lock + n_new_locks) = st.active_basis.col(j);
                ++n_new_locks;
            } else {
                ++n_unconverged;
            }
        }
        st.n_lock += n_new_locks;
        rec.n_locked_total = st.n_lock;

        if (n_new_locks > 0) {
            Matrixd shrunk(n, st.active_basis.cols() - n_new_locks);
            index_t kept = 0;
            for (index_t j = 0; j < st.active_basis.cols(); ++j)
                if (!lock_flag[static_cast<std::size_t>(j)])
                    shrunk.col(kept++) = st.active_basis.col(j);
            st.active_basis = std::move(shrunk);
        }

        res.degree_history.push_back(st.degree);
        res.history.push_back(rec);
        res.iterations = st.iteration;
        st.degree = next_degree;
        res.timings.other += seconds_since(t);

        if (n_unconverged == 0) {
            res.converged = true;
            break;
        }
    }

    // --- Assemble: ascending pairs, re-measured residuals.
    emit_pairs(res, st.locked_values, st.locked_vectors, st.n_lock);
    if (st.n_lock > 0) {
        const Vectord final_res =
            compute_residuals(a, res.eigenvectors, res.eigenvalues, &res.spmv_total);
        res.max_residual = final_res.maxCoeff();
    }
    for (const IterationRecord& r : res.history)
        res.spmv_total += r.spmv_filter + r.spmv_residual;
    if (!res.degree_history.empty())
        res.avg_degree =
            std::accumulate(res.degree_history.begin(), res.degree_history.end(), 0.0) /
            static_cast<double>(res.degree_history.size());
    return res;
}

}  // namespace adapoly
