#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "adapoly/types.hpp"

namespace adapoly::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_input_error = 1;
inline constexpr int exit_not_converged = 2;

/// Flags for `solve`. Optionals distinguish "given on the command line"
/// from "absent", so flags can override a config file.
struct SolveFlags {
    std::string matrix;
    std::optional<std::string> interval;  // "a:b"
    std::optional<double> tau_c;
    std::optional<double> tau_a;
    std::optional<double> m;
    std::optional<double> c;
    std::optional<double> k_mult;
    std::optional<double> mu;
    std::optional<index_t> max_iter;
    std::optional<index_t> lanczos_steps;
    std::optional<index_t> trace_probes;
    std::optional<index_t> p_override;
    std::optional<index_t> ti;
    std::optional<index_t> tk;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::string config_file;
    std::string output;        // report destination; stdout when empty
    std::string eigenvectors;  // optional eigenvector table destination
};

struct InspectFilterFlags {
    std::string interval;          // "a:b", required
    std::string bounds = "-1:1";   // spectrum bounds "lo:hi"
    std::optional<std::string> range;  // sweep range; defaults to bounds
    int k = 100;
    double m = 0.5;
    std::optional<int> degree;  // defaults to k
    index_t samples = 200;
    std::string output;
};

struct BenchSpmmFlags {
    std::string matrix;
    std::string k_list = "32";  // comma-separated dense widths
    std::optional<index_t> ti;
    std::optional<index_t> tk;
    index_t repetitions = 3;
    std::uint64_t seed = 0;
    std::optional<int> threads;
    std::string output;
};

struct EstimateCountFlags {
    std::string matrix;
    std::string interval;  // "a:b", required
    index_t probes = 30;
    std::optional<int> k;  // filter degree; derived from the interval when absent
    std::uint64_t seed = 0;
    std::optional<int> threads;
    std::string output;
};

int run_solve(const SolveFlags& flags, std::ostream& out, std::ostream& err);
int run_inspect_filter(const InspectFilterFlags& flags, std::ostream& out,
                       std::ostream& err);
int run_bench_spmm(const BenchSpmmFlags& flags, std::ostream& out, std::ostream& err);
int run_estimate_count(const EstimateCountFlags& flags, std::ostream& out,
                       std::ostream& err);

/// Parse "a:b" into an ordered pair; throws ConfigError on malformed input.
std::pair<double, double> parse_interval(const std::string& text);

/// Resolve the worker count: explicit flag, else ADAPOLY_THREADS, else the
/// runtime default; applies it to the kernels' thread pool.
void apply_thread_count(const std::optional<int>& threads);
int resolved_thread_count(const std::optional<int>& threads);

}  // namespace adapoly::cli
