#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "config.hpp"
#include "hipnex/problems.hpp"
#include "hipnex/solver.hpp"

namespace hipnex::app {

/// A generated problem with its seeded initial point.
struct Instance {
  std::string kind;
  VIProblem problem;
  Vector x0;
  std::uint64_t data_hash = 0;  // hash of b (cubic) or q (affine, box)
  // Affine data, kept for the exact-resolvent oracle.
  std::optional<Matrix> M;
  std::optional<Vector> q;
};

/// Deterministic in (spec): x0 is standard normal from a stream derived from
/// the seed, projected onto C, and therefore shared by every method.
Instance build_instance(const ProblemSpec& spec);

/// Metrics of one solve.
struct MetricsSummary {
  std::string method;
  std::string backend;
  std::string problem;
  int n = 0;
  std::uint64_t seed = 0;
  double time_s = 0.0;
  int iterations = 0;
  std::string termination;
  double final_residual = 0.0;  // ||F(y) + nu|| at the returned point
  std::int64_t linear_solves = 0;
  std::int64_t f_evals = 0;
  std::int64_t j_evals = 0;
  std::int64_t jvp = 0;
  std::int64_t materializations = 0;
  std::int64_t inner_iterations = 0;
  std::optional<int> first_pointwise;
  std::optional<int> first_ergodic;
  std::optional<double> distance_to_solution;
  std::uint64_t x0_hash = 0;
  std::uint64_t data_hash = 0;
  int invariant_breaches = 0;
  std::string error;  // non-empty when the cell failed

  bool ok() const { return error.empty() && termination != "max_iter"; }
};

struct Outcome {
  RunResult result;
  MetricsSummary summary;
};

/// Validates and executes one configured solve. Solver errors propagate.
Outcome execute(const RunConfig& cfg, const Instance& inst);
Outcome execute(const RunConfig& cfg);

MetricsSummary summarize(const RunConfig& cfg, const Instance& inst, const RunResult& r);

}  // namespace hipnex::app
