#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "adapoly/cli.hpp"

namespace {

// CLI11 fills plain values; these helpers keep "was the flag given" visible
// so command-line values can override a config file.
template <class T>
void add_optional(CLI::App& app, const std::string& name, std::optional<T>& target,
                  const std::string& description) {
    app.add_option_function<T>(
        name, [&target](const T& value) { target = value; }, description);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Interior eigenpairs of sparse symmetric matrices by adaptive "
                 "Chebyshev-filtered subspace iteration"};
    app.require_subcommand(1);

    adapoly::cli::SolveFlags solve_flags;
    CLI::App* solve = app.add_subcommand("solve", "Compute all eigenpairs in an interval");
    solve->add_option("--matrix", solve_flags.matrix, "Matrix Market file")->required();
    add_optional<std::string>(*solve, "--interval", solve_flags.interval,
                              "target interval a:b");
    add_optional<double>(*solve, "--tau-c", solve_flags.tau_c,
                         "convergence threshold relative to ||A||");
    add_optional<double>(*solve, "--tau-a", solve_flags.tau_a,
                         "adaptive-degree threshold");
    add_optional<double>(*solve, "--m", solve_flags.m, "damping exponent");
    add_optional<double>(*solve, "--C", solve_flags.c, "initial-degree constant");
    add_optional<double>(*solve, "--k-mult", solve_flags.k_mult,
                         "max degree multiplier over the initial degree");
    add_optional<double>(*solve, "--mu", solve_flags.mu, "subspace oversampling factor");
    add_optional<adapoly::index_t>(*solve, "--max-iter", solve_flags.max_iter,
                                   "iteration cap");
    add_optional<adapoly::index_t>(*solve, "--lanczos-steps", solve_flags.lanczos_steps,
                                   "steps for the spectrum-bound estimate");
    add_optional<adapoly::index_t>(*solve, "--trace-probes", solve_flags.trace_probes,
                                   "probes for the eigenvalue-count estimate");
    add_optional<adapoly::index_t>(*solve, "--p", solve_flags.p_override,
                                   "subspace dimension override");
    add_optional<adapoly::index_t>(*solve, "--ti", solve_flags.ti, "row-block height");
    add_optional<adapoly::index_t>(*solve, "--tk", solve_flags.tk,
                                   "dense column-block width");
    add_optional<std::uint64_t>(*solve, "--seed", solve_flags.seed, "RNG seed");
    add_optional<int>(*solve, "--threads", solve_flags.threads, "worker count");
    solve->add_option("--config", solve_flags.config_file,
                      "key=value config file (flags override)");
    solve->add_option("--output", solve_flags.output, "write the JSON report here");
    solve->add_option("--eigenvectors", solve_flags.eigenvectors,
                      "write the eigenvector table here");

    adapoly::cli::InspectFilterFlags inspect_flags;
    CLI::App* inspect = app.add_subcommand(
        "inspect-filter", "Emit sampled (x, rho, error, bound) rows as CSV");
    inspect->add_option("--interval", inspect_flags.interval, "target interval a:b")
        ->required();
    inspect->add_option("--bounds", inspect_flags.bounds, "spectrum bounds lo:hi");
    add_optional<std::string>(*inspect, "--range", inspect_flags.range,
                              "sweep range (defaults to bounds)");
    inspect->add_option("--k", inspect_flags.k, "max filter degree");
    inspect->add_option("--m", inspect_flags.m, "damping exponent");
    add_optional<int>(*inspect, "--degree", inspect_flags.degree,
                      "evaluation degree (defaults to k)");
    inspect->add_option("--samples", inspect_flags.samples, "sample count");
    inspect->add_option("--output", inspect_flags.output, "write the CSV here");

    adapoly::cli::BenchSpmmFlags bench_flags;
    CLI::App* bench =
        app.add_subcommand("bench-spmm", "Time the SpMM kernels and verify equivalence");
    bench->add_option("--matrix", bench_flags.matrix, "Matrix Market file")->required();
    bench->add_option("--K", bench_flags.k_list, "dense width(s), comma-separated");
    add_optional<adapoly::index_t>(*bench, "--ti", bench_flags.ti, "row-block height");
    add_optional<adapoly::index_t>(*bench, "--tk", bench_flags.tk,
                                   "dense column-block width");
    bench->add_option("--reps", bench_flags.repetitions, "repetitions per row");
    bench->add_option("--seed", bench_flags.seed, "RNG seed");
    add_optional<int>(*bench, "--threads", bench_flags.threads, "worker count");
    bench->add_option("--output", bench_flags.output, "write the CSV here");

    adapoly::cli::EstimateCountFlags count_flags;
    CLI::App* count = app.add_subcommand(
        "estimate-count", "Stochastic estimate of the eigenvalue count in an interval");
    count->add_option("--matrix", count_flags.matrix, "Matrix Market file")->required();
    count->add_option("--interval", count_flags.interval, "target interval a:b")
        ->required();
    count->add_option("--probes", count_flags.probes, "probe count");
    add_optional<int>(*count, "--k", count_flags.k, "filter degree");
    count->add_option("--seed", count_flags.seed, "RNG seed");
    add_optional<int>(*count, "--threads", count_flags.threads, "worker count");
    count->add_option("--output", count_flags.output, "write the JSON here");

    CLI11_PARSE(app, argc, argv);

    if (solve->parsed())
        return adapoly::cli::run_solve(solve_flags, std::cout, std::cerr);
    if (inspect->parsed())
        return adapoly::cli::run_inspect_filter(inspect_flags, std::cout, std::cerr);
    if (bench->parsed())
        return adapoly::cli::run_bench_spmm(bench_flags, std::cout, std::cerr);
    if (count->parsed())
        return adapoly::cli::run_estimate_count(count_flags, std::cout, std::cerr);
    return adapoly::cli::exit_input_error;
}
