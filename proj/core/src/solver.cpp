#include "hipnex/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "hipnex/rng.hpp"

namespace hipnex {

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::Pointwise: return "pointwise";
    case Termination::Ergodic: return "ergodic";
    case Termination::ExactSolution: return "exact";
    case Termination::MaxIterations: return "max_iter";
  }
  return "unknown";
}

std::string_view IterationRecord::class_label() const {
  if (skipped) return step == StepClass::Large ? "SKIP_LARGE" : "SKIP_SMALL";
  return step == StepClass::Large ? "LARGE" : "SMALL";
}

SolverState initial_state(Evaluator& eval, Params& params, const Vector& x0) {
  const VIProblem& problem = eval.problem();
  require_point(x0, problem.dim, "x0");
  if (!problem.unconstrained() && (problem.projected(x0) - x0).norm() > 1e-12 * (1.0 + x0.norm())) {
    throw ParameterError("x0 must lie in C");
  }
  SolverState s;
  s.x = x0;
  s.y = x0;
  s.nu = Vector::Zero(problem.dim);
  s.F_y = eval.F(x0);
  const double norm_F0 = s.F_y.norm();
  if (!(params.lambda1 > 0.0)) params.lambda1 = init_lambda(norm_F0, params.theta, params.lipschitz);
  validate_params(params, norm_F0);
  s.lambda = params.lambda1;
  return s;
}

StepOutcome step(SolverState& state, Evaluator& eval, const Params& params,
                 const SubproblemOptions& options, double return_tol, bool record_points) {
  StepOutcome out;
  const Vector w_prev = state.w();
  if (w_prev.norm() <= return_tol) {
    out.terminated = true;
    return out;
  }

  const double lambda = state.lambda;
  const double half_lL = 0.5 * lambda * params.lipschitz;
  IterationRecord& rec = out.record;
  rec.k = state.k + 1;
  rec.lambda = lambda;
  rec.invariant_a = half_lL * (lambda * w_prev + state.y - state.x).norm();

  if (rec.invariant_a <= params.theta_hat) {
    rec.skipped = true;  // y_k = y_{k-1}, nu_k = nu_{k-1}
  } else {
    SubproblemInstance inst;
    inst.lambda = lambda;
    inst.anchor = state.y;
    inst.center = state.x;
    inst.F_anchor = state.F_y;
    ApproxSolution sol = solve_subproblem(eval, inst, options);
    rec.inner_iterations = sol.inner_iterations;
    rec.linear_solves = sol.linear_solves;
    state.y = std::move(sol.y);
    state.nu = std::move(sol.nu);
    state.F_y = eval.F(state.y);
  }

  const Vector w = state.w();
  rec.residual_norm = w.norm();
  rec.invariant_b = half_lL * (lambda * w + state.y - state.x).norm();
  rec.step_length = lambda * (state.y - state.x).norm();

  Vector x_prev;
  if (record_points) x_prev = state.x;
  if (rec.step_length >= params.eta) {
    rec.step = StepClass::Large;
    state.x -= params.tau * lambda * w;
    state.lambda = (1.0 - params.tau) * lambda;
    ++state.a_count;
  } else {
    rec.step = StepClass::Small;
    state.lambda = lambda / (1.0 - params.tau);
    ++state.b_count;
  }
  state.k = rec.k;

  if (record_points) {
    rec.points = IteratePoints{std::move(x_prev), state.y, state.nu, w, state.x};
  }
  return out;
}

namespace {

class Monitor {
 public:
  Monitor(const Params& p, bool strict, InvariantStats& stats)
      : p_(p), strict_(strict), stats_(stats), slack_(1e-8 * (1.0 + p.theta)) {}

  void observe(const IterationRecord& rec, const SolverState& s, std::int64_t solves_delta) {
    stats_.max_a_excess = std::max(stats_.max_a_excess, rec.invariant_a - p_.theta);
    stats_.max_b_excess = std::max(stats_.max_b_excess, rec.invariant_b - p_.theta_hat);
    if (rec.invariant_a > p_.theta + slack_) {
      breach(rec.k, "invariant A", rec.invariant_a, p_.theta);
    }
    if (rec.invariant_b > p_.theta_hat + slack_) {
      breach(rec.k, "invariant B", rec.invariant_b, p_.theta_hat);
    }
    const double expected = std::pow(1.0 - p_.tau, s.a_count - s.b_count) * p_.lambda1;
    const double law = std::abs(s.lambda - expected) / s.lambda;
    stats_.max_lambda_law_error = std::max(stats_.max_lambda_law_error, law);
    if (law > 1e-10) breach(rec.k, "lambda law", s.lambda, expected);
    if (rec.skipped && solves_delta != 0) breach(rec.k, "skip performed a solve", 1.0, 0.0);
  }

  void breach(int k, std::string_view what, double value, double bound) {
    std::ostringstream os;
    os.precision(17);
    os << "iteration " << k << ": " << what << " breached (" << value << " vs " << bound << ")";
    ++stats_.breaches;
    if (stats_.messages.size() < 20) stats_.messages.push_back(os.str());
    if (strict_) throw InvariantViolation(os.str());
  }

 private:
  const Params& p_;
  bool strict_;
  InvariantStats& stats_;
  double slack_;
};

}  // namespace

RunResult run(const VIProblem& problem, Params params, const Vector& x0, const RunOptions& options) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  if (!(options.rho > 0.0)) throw ParameterError("rho must be positive");

  Evaluator eval(problem);
  SolverState state = initial_state(eval, params, x0);
  SubproblemOptions sub = options.subproblem;
  sub.sigma_hat = params.sigma_hat;

  RunResult result;
  result.params = params;
  result.x0_hash = hash_vector(x0);
  result.y_best = state.y;
  result.nu_best = state.nu;
  result.best_residual = state.F_y.norm();

  const double return_tol = options.return_tol * std::max(1.0, state.F_y.norm());
  Monitor monitor(params, options.strict, result.invariants);
  ErgodicAccumulator ergodic;
  ErgodicAccumulator ergodic_all;
  double min_large = std::numeric_limits<double>::infinity();
  std::int64_t cum_solves = 0;
  std::int64_t cum_inner = 0;

  auto finish = [&](Termination t) {
    result.termination = t;
    result.iterations = static_cast<int>(result.trace.size());
    result.x_final = state.x;
    result.y_final = state.y;
    result.nu_final = state.nu;
    result.ergodic = ergodic.certificate();
    if (options.ergodic_all_iterations) result.ergodic_all = ergodic_all.certificate();
    result.counts = eval.counts();
    result.linear_solves = cum_solves;
    result.inner_iterations = cum_inner;
    result.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();
  };

  while (static_cast<int>(result.trace.size()) < options.max_iter) {
    StepOutcome outcome = step(state, eval, params, sub, return_tol, options.record_points);
    if (outcome.terminated) {
      result.y_best = state.y;
      result.nu_best = state.nu;
      result.best_residual = state.w().norm();
      finish(Termination::ExactSolution);
      return result;
    }
    IterationRecord& rec = outcome.record;
    if (options.fault_at_iteration == rec.k) state.lambda *= options.fault_lambda_scale;

    cum_solves += rec.linear_solves;
    cum_inner += rec.inner_iterations;
    const EvalCounts& c = eval.counts();
    rec.cum_linear_solves = cum_solves;
    rec.cum_inner_iterations = cum_inner;
    rec.cum_f_evals = c.f_evals;
    rec.cum_jvp = c.jvp;
    rec.cum_materializations = c.materializations;
    rec.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();

    monitor.observe(rec, state, rec.linear_solves + rec.inner_iterations);

    const Vector w = state.w();
    if (rec.step == StepClass::Large) {
      ergodic.ingest(rec.lambda, state.y, w);
      min_large = std::min(min_large, rec.residual_norm);
    }
    if (options.ergodic_all_iterations) ergodic_all.ingest(rec.lambda, state.y, w);
    rec.large_count = state.a_count;
    rec.min_large_residual = min_large;
    const auto cert = ergodic.certificate();
    rec.ergodic_v_norm = cert ? cert->v_a.norm() : std::numeric_limits<double>::quiet_NaN();
    rec.ergodic_eps = cert ? cert->eps_a : std::numeric_limits<double>::quiet_NaN();
    rec.ergodic_scale = cert ? cert->scale : std::numeric_limits<double>::quiet_NaN();

    if (rec.residual_norm < result.best_residual) {
      result.best_residual = rec.residual_norm;
      result.y_best = state.y;
      result.nu_best = state.nu;
    }
    const int k = rec.k;
    const bool pointwise_hit = rec.residual_norm <= options.rho;
    const bool ergodic_hit =
        rec.step == StepClass::Large && cert && std::max(cert->v_a.norm(), cert->eps_a) <= options.rho;
    if (pointwise_hit && !result.first_pointwise) {
      result.first_pointwise = k;
      const double tol = 1e-9 * (1.0 + state.nu.norm() + state.y.norm());
      if (!check_normal_cone(problem, state.y, state.nu, tol)) {
        monitor.breach(k, "normal cone certificate", 1.0, 0.0);
      }
    }
    if (ergodic_hit && !result.first_ergodic) result.first_ergodic = k;
    result.trace.push_back(std::move(rec));

    if (pointwise_hit && options.stop != StopRule::ErgodicOnly) {
      finish(Termination::Pointwise);
      return result;
    }
    if (ergodic_hit && options.stop != StopRule::PointwiseOnly) {
      finish(Termination::Ergodic);
      return result;
    }
  }
  finish(Termination::MaxIterations);
  return result;
}

}  // namespace hipnex
