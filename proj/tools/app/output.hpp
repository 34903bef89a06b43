#pragma once

#include <string>
#include <vector>

#include "runner.hpp"

namespace hipnex::app {

/// Writes `content` to a sibling temporary file and renames it over `path`.
void write_atomic(const std::string& path, const std::string& content);

/// Header: k,wall_time_s,lambda,residual_norm,step_class,inner_iters,cum_linear_solves,cum_F_evals,cum_J_evals
std::string trace_csv(const std::vector<IterationRecord>& trace);

/// Summary JSON with a fixed key order.
std::string summary_json(const MetricsSummary& m);
MetricsSummary parse_summary_json(const std::string& text);

std::string bench_csv(const std::vector<MetricsSummary>& rows);

/// Aligned plain-text table with the method, size and cost columns.
std::string render_table(const std::vector<MetricsSummary>& rows);

}  // namespace hipnex::app
