#include "adapoly/run_report.hpp"

namespace adapoly {

using nlohmann::json;

nlohmann::json to_json(const RunReport& report) {
    const SolverConfig& c = report.config;
    json cfg{
        {"interval_a", c.interval_a},
        {"interval_b", c.interval_b},
        {"tau_c", c.tau_c},
        {"tau_a", c.tau_a},
        {"m", c.m},
        {"C", c.c},
        {"k_multiplier", c.k_multiplier},
        {"mu", c.mu},
        {"max_iter", c.max_iter},
        {"lanczos_steps", c.lanczos_steps},
        {"trace_probes", c.trace_probes},
        {"rng_seed", c.rng_seed},
        {"p_override", c.p_override ? json(*c.p_override) : json(nullptr)},
        {"tile_ti", c.tile_ti ? json(*c.tile_ti) : json(nullptr)},
        {"tile_tk", c.tile_tk ? json(*c.tile_tk) : json(nullptr)},
        {"threads", report.threads},
    };

    const SolveResult& r = report.result;
    json eigenvalues = json::array();
    for (index_t i = 0; i < r.eigenvalues.size(); ++i)
        eigenvalues.push_back(r.eigenvalues(i));

    json result{
        {"converged", r.converged},
        {"dense_fallback", r.dense_fallback},
        {"eigenvalues", eigenvalues},
        {"iterations", r.iterations},
        {"spmv_total", r.spmv_total},
        {"avg_degree", r.avg_degree},
        {"max_residual", r.max_residual},
        {"e_estimate", r.e_estimate},
        {"subspace_dim", r.subspace_dim},
        {"spectrum_bounds",
         {{"lambda_min", r.bounds.lambda_min}, {"lambda_max", r.bounds.lambda_max}}},
        {"degree_history", r.degree_history},
    };

    json table = json::array();
    for (const IterationRecord& rec : r.history) {
        table.push_back({
            {"iteration", rec.iteration},
            {"degree", rec.degree},
            {"active_width", rec.active_width},
            {"e_in_interval", rec.e_in_interval},
            {"n_locked", rec.n_locked_total},
            {"max_residual", rec.max_residual},
            {"spmv_filter", rec.spmv_filter},
            {"spmv_residual", rec.spmv_residual},
        });
    }

    json timings{
        {"setup", r.timings.setup},
        {"filter", r.timings.filter},
        {"orth", r.timings.orth},
        {"rayleigh_ritz", r.timings.rayleigh_ritz},
        {"residuals", r.timings.residuals},
        {"other", r.timings.other},
    };

    return json{
        {"config", cfg},
        {"matrix", {{"path", report.matrix_path}, {"n", report.n}, {"nnz", report.nnz}}},
        {"result", result},
        {"iteration_table", table},
        {"timings", timings},
    };
}

RunReport run_report_from_json(const nlohmann::json& j) {
    RunReport report;
    const json& cfg = j.at("config");
    report.config.interval_a = cfg.at("interval_a").get<double>();
    report.config.interval_b = cfg.at("interval_b").get<double>();
    report.config.tau_c = cfg.at("tau_c").get<double>();
    report.config.tau_a = cfg.at("tau_a").get<double>();
    report.config.m = cfg.at("m").get<double>();
    report.config.c = cfg.at("C").get<double>();
    report.config.k_multiplier = cfg.at("k_multiplier").get<double>();
    report.config.mu = cfg.at("mu").get<double>();
    report.config.max_iter = cfg.at("max_iter").get<index_t>();
    report.config.lanczos_steps = cfg.at("lanczos_steps").get<index_t>();
    report.config.trace_probes = cfg.at("trace_probes").get<index_t>();
    report.config.rng_seed = cfg.at("rng_seed").get<std::uint64_t>();
    if (!cfg.at("p_override").is_null())
        report.config.p_override = cfg.at("p_override").get<index_t>();
    if (!cfg.at("tile_ti").is_null())
        report.config.tile_ti = cfg.at("tile_ti").get<index_t>();
    if (!cfg.at("tile_tk").is_null())
        report.config.tile_tk = cfg.at("tile_tk").get<index_t>();
    report.threads = cfg.at("threads").get<int>();

    report.matrix_path = j.at("matrix").at("path").get<std::string>();
    report.n = j.at("matrix").at("n").get<index_t>();
    report.nnz = j.at("matrix").at("nnz").get<index_t>();

    const json& res = j.at("result");
    SolveResult& r = report.result;
    r.converged = res.at("converged").get<bool>();
    r.dense_fallback = res.at("dense_fallback").get<bool>();
    const json& ev = res.at("eigenvalues");
    r.eigenvalues.resize(static_cast<index_t>(ev.size()));
    for (std::size_t i = 0; i < ev.size(); ++i)
        r.eigenvalues(static_cast<index_t>(i)) = ev[i].get<double>();
    r.iterations = res.at("iterations").get<index_t>();
    r.spmv_total = res.at("spmv_total").get<std::int64_t>();
    r.avg_degree = res.at("avg_degree").get<double>();
    r.max_residual = res.at("max_residual").get<double>();
    r.e_estimate = res.at("e_estimate").get<double>();
    r.subspace_dim = res.at("subspace_dim").get<index_t>();
    r.bounds.lambda_min = res.at("spectrum_bounds").at("lambda_min").get<double>();
    r.bounds.lambda_max = res.at("spectrum_bounds").at("lambda_max").get<double>();
    r.degree_history = res.at("degree_history").get<std::vector<int>>();

    for (const json& row : j.at("iteration_table")) {
        IterationRecord rec;
        rec.iteration = row.at("iteration").get<index_t>();
        rec.degree = row.at("degree").get<int>();
        rec.active_width = row.at("active_width").get<index_t>();
        rec.e_in_interval = row.at("e_in_interval").get<index_t>();
        rec.n_locked_total = row.at("n_locked").get<index_t>();
        rec.max_residual = row.at("max_residual").get<double>();
        rec.spmv_filter = row.at("spmv_filter").get<std::int64_t>();
        rec.spmv_residual = row.at("spmv_residual").get<std::int64_t>();
        report.result.history.push_back(rec);
    }

    const json& t = j.at("timings");
    r.timings.setup = t.at("setup").get<double>();
    r.timings.filter = t.at("filter").get<double>();
    r.timings.orth = t.at("orth").get<double>();
    r.timings.rayleigh_ritz = t.at("rayleigh_ritz").get<double>();
    r.timings.residuals = t.at("residuals").get<double>();
    r.timings.other = t.at("other").get<double>();
    return report;
}

std::string dump_report(const RunReport& report) { return to_json(report).dump(2) + "\n"; }

}  // namespace adapoly
