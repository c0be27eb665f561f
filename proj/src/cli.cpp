#include "adapoly/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "adapoly/cheb_filter.hpp"
#include "adapoly/filter_bounds.hpp"
#include "adapoly/lanczos.hpp"
#include "adapoly/matrix_market.hpp"
#include "adapoly/philox.hpp"
#include "adapoly/run_report.hpp"
#include "adapoly/solver.hpp"

namespace adapoly::cli {

namespace {

std::pair<double, double> parse_pair(const std::string& text, const char* what) {
    const auto sep = text.find(':');
    if (sep == std::string::npos)
        throw ConfigError(std::string(what) + " must be written as a:b, got '" + text + "'");
    try {
        std::size_t used_a = 0;
        std::size_t used_b = 0;
        const double a = std::stod(text.substr(0, sep), &used_a);
        const double b = std::stod(text.substr(sep + 1), &used_b);
        if (used_a != sep || used_b != text.size() - sep - 1)
            throw std::invalid_argument("trailing characters");
        return {a, b};
    } catch (const std::exception&) {
        throw ConfigError(std::string(what) + " must be written as a:b, got '" + text + "'");
    }
}

/// Apply `key=value` lines to a SolverConfig. '#' starts a comment.
void apply_config_file(SolverConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::string line;
    index_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config file line " + std::to_string(line_no) +
                              ": expected key=value");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "interval_a") cfg.interval_a = std::stod(value);
            else if (key == "interval_b") cfg.interval_b = std::stod(value);
            else if (key == "tau_c") cfg.tau_c = std::stod(value);
            else if (key == "tau_a") cfg.tau_a = std::stod(value);
            else if (key == "m") cfg.m = std::stod(value);
            else if (key == "C") cfg.c = std::stod(value);
            else if (key == "k_multiplier") cfg.k_multiplier = std::stod(value);
            else if (key == "mu") cfg.mu = std::stod(value);
            else if (key == "max_iter") cfg.max_iter = std::stoll(value);
            else if (key == "lanczos_steps") cfg.lanczos_steps = std::stoll(value);
            else if (key == "trace_probes") cfg.trace_probes = std::stoll(value);
            else if (key == "rng_seed") cfg.rng_seed = std::stoull(value);
            else if (key == "p_override") cfg.p_override = std::stoll(value);
            else if (key == "tile_ti") cfg.tile_ti = std::stoll(value);
            else if (key == "tile_tk") cfg.tile_tk = std::stoll(value);
            else
                throw ConfigError("config file line " + std::to_string(line_no) +
                                  ": unknown key '" + key + "'");
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError("config file line " + std::to_string(line_no) +
                              ": bad value for '" + key + "'");
        }
    }
}

std::ostream& open_output(std::ofstream& file, const std::string& path,
                          std::ostream& fallback) {
    if (path.empty()) return fallback;
    file.open(path);
    if (!file) throw ConfigError("cannot open output file: " + path);
    return file;
}

void write_eigenvectors(const std::string& path, const Matrixd& vectors) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open eigenvector file: " + path);
    out << vectors.rows() << " " << vectors.cols() << "\n";
    out << std::setprecision(17);
    for (index_t r = 0; r < vectors.rows(); ++r) {
        for (index_t c = 0; c < vectors.cols(); ++c) {
            if (c) out << " ";
            out << vectors(r, c);
        }
        out << "\n";
    }
}

CsrMatrixd load_symmetric_matrix(const std::string& path) {
    CsrMatrixd a = read_matrix_market(path);
    if (a.n_rows != a.n_cols || !a.is_symmetric())
        throw ConfigError("matrix '" + path + "' is not symmetric");
    return a;
}

}  // namespace

std::pair<double, double> parse_interval(const std::string& text) {
    const auto [a, b] = parse_pair(text, "interval");
    if (!(a < b)) throw ConfigError("interval must satisfy a < b, got '" + text + "'");
    return {a, b};
}

int resolved_thread_count(const std::optional<int>& threads) {
    if (threads && *threads > 0) return *threads;
    if (const char* env = std::getenv("ADAPOLY_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void apply_thread_count(const std::optional<int>& threads) {
#ifdef _OPENMP
    omp_set_num_threads(resolved_thread_count(threads));
#else
    (void)threads;
#endif
}

int run_solve(const SolveFlags& flags, std::ostream& out, std::ostream& err) {
    try {
        SolverConfig cfg;
        if (!flags.config_file.empty()) apply_config_file(cfg, flags.config_file);
        if (flags.interval)
            std::tie(cfg.interval_a, cfg.interval_b) = parse_interval(*flags.interval);
        if (flags.tau_c) cfg.tau_c = *flags.tau_c;
        if (flags.tau_a) cfg.tau_a = *flags.tau_a;
        if (flags.m) cfg.m = *flags.m;
        if (flags.c) cfg.c = *flags.c;
        if (flags.k_mult) cfg.k_multiplier = *flags.k_mult;
        if (flags.mu) cfg.mu = *flags.mu;
        if (flags.max_iter) cfg.max_iter = *flags.max_iter;
        if (flags.lanczos_steps) cfg.lanczos_steps = *flags.lanczos_steps;
        if (flags.trace_probes) cfg.trace_probes = *flags.trace_probes;
        if (flags.p_override) cfg.p_override = *flags.p_override;
        if (flags.ti) cfg.tile_ti = *flags.ti;
        if (flags.tk) cfg.tile_tk = *flags.tk;
        if (flags.seed) cfg.rng_seed = *flags.seed;
        apply_thread_count(flags.threads);

        RunReport report;
        report.config = cfg;
        report.threads = resolved_thread_count(flags.threads);
        report.matrix_path = flags.matrix;

        const CsrMatrixd a = load_symmetric_matrix(flags.matrix);
        report.n = a.n_rows;
        report.nnz = a.nnz();
        report.result = solve(a, cfg);
        if (report.result.dense_fallback)
            err << "warning: subspace dimension reached the problem size; "
                   "used the dense eigensolver path\n";

        if (!flags.eigenvectors.empty())
            write_eigenvectors(flags.eigenvectors, report.result.eigenvectors);

        std::ofstream file;
        open_output(file, flags.output, out) << dump_report(report);
        return report.result.converged ? exit_ok : exit_not_converged;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_input_error;
    }
}

int run_inspect_filter(const InspectFilterFlags& flags, std::ostream& out,
                       std::ostream& err) {
    try {
        const auto [a, b] = parse_interval(flags.interval);
        const auto [lo, hi] = parse_pair(flags.bounds, "bounds");
        if (!(lo < hi)) throw ConfigError("bounds must satisfy lo < hi");
        const SpectrumBounds bounds{lo, hi};
        const ChebFilter f = build_filter(a, b, bounds, flags.k, flags.m);
        const int degree = flags.degree.value_or(flags.k);
        if (degree < 1 || degree > flags.k)
            throw ConfigError("degree must lie in [1, k]");
        double sweep_lo = lo;
        double sweep_hi = hi;
        if (flags.range) std::tie(sweep_lo, sweep_hi) = parse_pair(*flags.range, "range");
        if (flags.samples < 0) throw ConfigError("samples must be >= 0");

        std::ofstream file;
        std::ostream& os = open_output(file, flags.output, out);
        os << "x,rho,error,bound\n";
        os << std::setprecision(17);
        for (index_t i = 0; i < flags.samples; ++i) {
            const double x =
                flags.samples == 1
                    ? sweep_lo
                    : sweep_lo + (sweep_hi - sweep_lo) * static_cast<double>(i) /
                                     static_cast<double>(flags.samples - 1);
            const double rho = eval_filter_scalar(f, x, degree);
            const double step = x > a && x < b ? 1.0 : (x == a || x == b ? 0.5 : 0.0);
            const double theta = std::acos(std::clamp(f.map(x), -1.0, 1.0));
            const double bound = damped_bound(theta, degree, flags.k, flags.m, f.alpha, f.beta);
            os << x << "," << rho << "," << std::abs(step - rho) << "," << bound << "\n";
        }
        return exit_ok;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_input_error;
    }
}

int run_bench_spmm(const BenchSpmmFlags& flags, std::ostream& out, std::ostream& err) {
    try {
        apply_thread_count(flags.threads);
        if (flags.repetitions < 1) throw ConfigError("repetitions must be >= 1");
        std::vector<index_t> widths;
        std::stringstream ks(flags.k_list);
        std::string tok;
        while (std::getline(ks, tok, ',')) {
            const index_t k = std::stoll(tok);
            if (k < 1) throw ConfigError("K must be >= 1");
            widths.push_back(k);
        }
        if (widths.empty()) throw ConfigError("no K values given");

        const CsrMatrixd a = read_matrix_market(flags.matrix);
        const index_t ti = flags.ti.value_or(default_tile_ti);
        const index_t tk = flags.tk.value_or(default_tile_tk);
        const TiledMatrixd tiled = csr_to_tiled(a, ti, tk);

        std::ofstream file;
        std::ostream& os = open_output(file, flags.output, out);
        os << "kernel,T_i,T_k,K,gflops,max_rel_err_vs_naive\n";
        using Clock = std::chrono::steady_clock;
        for (const index_t k : widths) {
            Matrixd b(a.n_cols, k);
            fill_gaussian(b, flags.seed, 7);
            const double flops =
                2.0 * static_cast<double>(a.nnz()) * static_cast<double>(k) *
                static_cast<double>(flags.repetitions);

            auto t0 = Clock::now();
            Matrixd c_ref;
            for (index_t rep = 0; rep < flags.repetitions; ++rep) c_ref = naive_spmm(a, b);
            const double t_naive = std::chrono::duration<double>(Clock::now() - t0).count();

            const BlockMatrixd b_blk = to_block_layout<double>(b, tk);
            BlockMatrixd c_blk(a.n_rows, k, tk);
            t0 = Clock::now();
            for (index_t rep = 0; rep < flags.repetitions; ++rep) {
                c_blk.set_zero();
                maspmm(tiled, b_blk, c_blk);
            }
            const double t_tiled = std::chrono::duration<double>(Clock::now() - t0).count();

            const Matrixd c_tiled = from_block_layout(c_blk);
            const double rel_err = c_ref.norm() > 0
                                       ? (c_tiled - c_ref).norm() / c_ref.norm()
                                       : (c_tiled - c_ref).norm();

            os << std::setprecision(6);
            os << "naive," << ti << "," << tk << "," << k << "," << flops / t_naive / 1e9
               << "," << 0.0 << "\n";
            os << "maspmm," << ti << "," << tk << "," << k << "," << flops / t_tiled / 1e9
               << "," << std::setprecision(3) << rel_err << "\n";
        }
        return exit_ok;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_input_error;
    }
}

int run_estimate_count(const EstimateCountFlags& flags, std::ostream& out,
                       std::ostream& err) {
    try {
        apply_thread_count(flags.threads);
        const auto [a_lo, a_hi] = parse_interval(flags.interval);
        const CsrMatrixd a = load_symmetric_matrix(flags.matrix);

        std::int64_t spmv = 0;
        const SpectrumBounds bounds = estimate_spectrum_bounds(a, 40, flags.seed, &spmv);
        int k = flags.k.value_or(0);
        if (k <= 0) {
            // Same rule as the solver setup: k = ceil(2.5 * k1), C = 1.4.
            const double span = bounds.lambda_max - bounds.lambda_min;
            const double l1 = 2.0 / span;
            const double l2 = -(bounds.lambda_max + bounds.lambda_min) / span;
            const double alpha = std::acos(std::clamp(l1 * a_lo + l2, -1.0, 1.0));
            const double beta = std::acos(std::clamp(l1 * a_hi + l2, -1.0, 1.0));
            const int k1 = initial_degree(alpha, beta, 1.4);
            k = static_cast<int>(std::ceil(2.5 * k1));
        }
        const ChebFilter f = build_filter(a_lo, a_hi, bounds, k, 0.5);
        const TiledMatrixd tiled = csr_to_tiled(a, default_tile_ti, default_tile_tk);
        const double e_tilde = estimate_eigcount(tiled, f, flags.probes, flags.seed, &spmv);

        nlohmann::json j{
            {"e_tilde", e_tilde},
            {"ceil", static_cast<index_t>(std::ceil(std::max(e_tilde, 0.0)))},
            {"probes", flags.probes},
            {"k", k},
            {"spmv_cost", spmv},
        };
        std::ofstream file;
        open_output(file, flags.output, out) << j.dump(2) << "\n";
        return exit_ok;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_input_error;
    }
}

}  // namespace adapoly::cli
