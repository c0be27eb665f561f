#pragma once

#include <string>

#include <json.hpp>

#include "adapoly/solver.hpp"

namespace adapoly {

/// Machine-readable record of one solve: configuration echo, matrix
/// metadata, result summary, per-iteration table, and stage timings.
/// Field names are stable; see docs/OUTPUT.md.
struct RunReport {
    SolverConfig config;
    int threads = 0;
    std::string matrix_path;
    index_t n = 0;
    index_t nnz = 0;
    SolveResult result;
};

nlohmann::json to_json(const RunReport& report);
RunReport run_report_from_json(const nlohmann::json& j);

/// Serialize with a fixed layout so identical reports give identical bytes.
std::string dump_report(const RunReport& report);

}  // namespace adapoly
