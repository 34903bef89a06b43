#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hipnex/core.hpp"
#include "hipnex/ergodic.hpp"
#include "hipnex/params.hpp"
#include "hipnex/subproblem.hpp"

namespace hipnex {

/// LARGE: lambda_k ||y_k - x_{k-1}|| >= eta (extragradient step taken).
enum class StepClass { Large, Small };

enum class Termination { Pointwise, Ergodic, ExactSolution, MaxIterations };

std::string_view to_string(Termination t);

/// Which success criterion ends a run.
enum class StopRule { Any, PointwiseOnly, ErgodicOnly };

/// Full vectors of one iteration, kept only when RunOptions::record_points is set.
struct IteratePoints {
  Vector x_prev;  // x_{k-1}
  Vector y;       // y_k
  Vector nu;      // nu_k
  Vector w;       // F(y_k) + nu_k
  Vector x;       // x_k
};

struct IterationRecord {
  int k = 0;
  double lambda = 0.0;
  StepClass step = StepClass::Small;
  bool skipped = false;
  double residual_norm = 0.0;  // ||F(y_k) + nu_k||
  double invariant_a = 0.0;    // (lambda L/2)||lambda (F(y_{k-1})+nu_{k-1}) + y_{k-1} - x_{k-1}||
  double invariant_b = 0.0;    // (lambda L/2)||lambda (F(y_k)+nu_k) + y_k - x_{k-1}||
  double step_length = 0.0;    // lambda ||y_k - x_{k-1}||
  std::int64_t inner_iterations = 0;
  std::int64_t linear_solves = 0;
  int probes = 0;  // lambda probes (NPE only)

  std::int64_t cum_linear_solves = 0;
  std::int64_t cum_f_evals = 0;
  std::int64_t cum_jvp = 0;
  std::int64_t cum_materializations = 0;
  std::int64_t cum_inner_iterations = 0;
  double wall_time_s = 0.0;

  int large_count = 0;
  double min_large_residual = 0.0;  // min ||F(y)+nu|| over LARGE iterates so far
  double ergodic_v_norm = 0.0;      // NaN until the first LARGE step
  double ergodic_eps = 0.0;
  double ergodic_scale = 0.0;

  std::optional<IteratePoints> points;

  /// LARGE, SMALL, SKIP_LARGE or SKIP_SMALL.
  std::string_view class_label() const;
};

/// Iterate of the homotopy method before iteration k + 1.
struct SolverState {
  int k = 0;
  Vector x;
  Vector y;
  Vector nu;
  Vector F_y;
  double lambda = 0.0;  // lambda_{k+1}
  int a_count = 0;
  int b_count = 0;

  Vector w() const { return F_y + nu; }
};

/// x0 must lie in C. Sets y0 = x0, nu0 = 0 and lambda1 (derived via
/// init_lambda when params.lambda1 <= 0, validated otherwise); the resolved
/// lambda1 is written back into `params`.
SolverState initial_state(Evaluator& eval, Params& params, const Vector& x0);

struct StepOutcome {
  bool terminated = false;  // F(y_{k-1}) + nu_{k-1} = 0 within return_tol
  IterationRecord record;   // filled when not terminated (cumulative fields excluded)
};

/// One iteration of the method: exact-solution test, skip test, subproblem
/// solve, then the LARGE (extragradient, lambda *= 1 - tau) or SMALL
/// (x frozen, lambda /= 1 - tau) branch.
StepOutcome step(SolverState& state, Evaluator& eval, const Params& params,
                 const SubproblemOptions& options, double return_tol = 1e-14,
                 bool record_points = false);

struct RunOptions {
  double rho = 1e-6;
  int max_iter = 10000;
  SubproblemOptions subproblem;
  /// Strict: invariant breaches throw InvariantViolation. Lenient: recorded.
  bool strict = true;
  StopRule stop = StopRule::Any;
  bool record_points = false;
  /// Absolute scale of the exact-zero test, multiplied by max(1, ||F(x0)||).
  double return_tol = 1e-14;
  /// Also accumulate an ergodic certificate over every iteration (no guarantee).
  bool ergodic_all_iterations = false;
  /// Test hook: multiply lambda by `fault_lambda_scale` after this iteration.
  int fault_at_iteration = -1;
  double fault_lambda_scale = 10.0;
};

struct InvariantStats {
  double max_a_excess = -1e300;  // max invariant_a - theta
  double max_b_excess = -1e300;  // max invariant_b - theta_hat
  double max_lambda_law_error = 0.0;  // relative
  int breaches = 0;
  std::vector<std::string> messages;
};

struct RunResult {
  std::string method = "hipnex";
  Termination termination = Termination::MaxIterations;
  int iterations = 0;
  std::optional<int> first_pointwise;
  std::optional<int> first_ergodic;

  Vector y_best;
  Vector nu_best;
  double best_residual = 0.0;
  Vector x_final;
  Vector y_final;
  Vector nu_final;

  std::optional<ErgodicCertificate> ergodic;
  std::optional<ErgodicCertificate> ergodic_all;
  std::vector<IterationRecord> trace;
  Params params;
  EvalCounts counts;
  std::int64_t linear_solves = 0;
  std::int64_t inner_iterations = 0;
  double wall_time_s = 0.0;
  InvariantStats invariants;
  std::uint64_t x0_hash = 0;

  bool succeeded() const { return termination != Termination::MaxIterations; }
};

/// Runs the method from x0 until the stop rule fires or max_iter iterations.
RunResult run(const VIProblem& problem, Params params, const Vector& x0, const RunOptions& options);

}  // namespace hipnex
