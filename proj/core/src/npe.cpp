#include "hipnex/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "hipnex/rng.hpp"

namespace hipnex {

void validate_npe_config(const NpeConfig& c) {
  if (!(c.sigma_l > 0.0 && c.sigma_l < c.sigma_u && c.sigma_u < 1.0)) {
    throw ParameterError("npe: need 0 < sigma_l < sigma_u < 1");
  }
  if (c.max_probes < 1) throw ParameterError("npe: max_probes must be at least 1");
  if (!std::isfinite(c.lambda0)) throw ParameterError("npe: lambda0 must be finite");
}

namespace {

struct Probe {
  double lambda = 0.0;
  ApproxSolution sol;
  double step_length = 0.0;
};

}  // namespace

RunResult npe_run(const VIProblem& problem, const NpeConfig& config, const Vector& x0, double rho,
                  int max_iter, const SubproblemOptions& subproblem) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  validate_npe_config(config);
  if (!(rho > 0.0)) throw ParameterError("rho must be positive");
  if (!(problem.lipschitz > 0.0)) throw ParameterError("npe: Lipschitz constant must be positive");
  require_point(x0, problem.dim, "x0");
  if (!problem.unconstrained() && (problem.projected(x0) - x0).norm() > 1e-12 * (1.0 + x0.norm())) {
    throw ParameterError("x0 must lie in C");
  }

  const double L = problem.lipschitz;
  const double lo = 2.0 * config.sigma_l / L;
  const double hi = 2.0 * config.sigma_u / L;

  Evaluator eval(problem);
  RunResult result;
  result.method = "npe";
  result.x0_hash = hash_vector(x0);
  result.params.sigma_hat = subproblem.sigma_hat;
  result.params.lipschitz = L;
  result.params.tau = 1.0;

  Vector x = x0;
  Vector Fx = eval.F(x);
  result.y_best = x;
  result.nu_best = Vector::Zero(problem.dim);
  result.best_residual = Fx.norm();
  result.y_final = x;
  result.nu_final = result.nu_best;

  double lambda = config.lambda0 > 0.0
                      ? config.lambda0
                      : (Fx.norm() > 0.0 ? std::sqrt((config.sigma_l + config.sigma_u) / (L * Fx.norm())) : 1.0);
  result.params.lambda1 = lambda;

  ErgodicAccumulator ergodic;
  std::int64_t cum_solves = 0;
  std::int64_t cum_inner = 0;

  auto finish = [&](Termination t) {
    result.termination = t;
    result.iterations = static_cast<int>(result.trace.size());
    result.x_final = x;
    result.ergodic = ergodic.certificate();
    result.counts = eval.counts();
    result.linear_solves = cum_solves;
    result.inner_iterations = cum_inner;
    result.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();
  };

  if (Fx.norm() == 0.0) {
    finish(Termination::ExactSolution);
    return result;
  }

  for (int k = 1; k <= max_iter; ++k) {
    SubproblemInstance inst;
    inst.anchor = x;
    inst.center = x;
    inst.F_anchor = Fx;

    // Doubling/halving until the bracket is straddled, then geometric bisection.
    double lam_lo = 0.0;
    double lam_hi = std::numeric_limits<double>::infinity();
    std::optional<Probe> accepted;
    int probes = 0;
    std::int64_t solves = 0;
    std::int64_t inner = 0;
    while (probes < config.max_probes) {
      inst.lambda = lambda;
      Probe p;
      p.lambda = lambda;
      p.sol = solve_subproblem(eval, inst, subproblem);
      ++probes;
      solves += p.sol.linear_solves;
      inner += p.sol.inner_iterations;
      p.step_length = lambda * (p.sol.y - x).norm();
      if (p.step_length >= lo && p.step_length <= hi) {
        accepted = std::move(p);
        break;
      }
      if (p.step_length < lo) {
        lam_lo = lambda;
      } else {
        lam_hi = lambda;
      }
      if (lam_lo == 0.0) {
        lambda *= 0.5;
      } else if (!std::isfinite(lam_hi)) {
        lambda *= 2.0;
      } else {
        lambda = std::sqrt(lam_lo * lam_hi);
      }
    }
    cum_solves += solves;
    cum_inner += inner;
    if (!accepted) {
      std::ostringstream os;
      os << "npe: lambda search exhausted " << config.max_probes << " probes at iteration " << k;
      throw SubproblemError(os.str(), x, Fx.norm());
    }

    Probe& p = *accepted;
    const Vector Fy = eval.F(p.sol.y);
    const Vector w = Fy + p.sol.nu;

    IterationRecord rec;
    rec.k = k;
    rec.lambda = p.lambda;
    rec.step = StepClass::Large;
    rec.residual_norm = w.norm();
    rec.step_length = p.step_length;
    rec.inner_iterations = inner;
    rec.linear_solves = solves;
    rec.probes = probes;

    Vector x_prev = x;
    x -= p.lambda * w;
    Fx = eval.F(x);

    ergodic.ingest(p.lambda, p.sol.y, w);
    const auto cert = ergodic.certificate();
    const EvalCounts& c = eval.counts();
    rec.cum_linear_solves = cum_solves;
    rec.cum_inner_iterations = cum_inner;
    rec.cum_f_evals = c.f_evals;
    rec.cum_jvp = c.jvp;
    rec.cum_materializations = c.materializations;
    rec.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();
    rec.large_count = k;
    rec.min_large_residual = std::min(result.best_residual, rec.residual_norm);
    rec.ergodic_v_norm = cert->v_a.norm();
    rec.ergodic_eps = cert->eps_a;
    rec.ergodic_scale = cert->scale;

    if (rec.residual_norm < result.best_residual) {
      result.best_residual = rec.residual_norm;
      result.y_best = p.sol.y;
      result.nu_best = p.sol.nu;
    }
    result.y_final = p.sol.y;
    result.nu_final = p.sol.nu;
    const bool hit = rec.residual_norm <= rho;
    if (hit) result.first_pointwise = k;
    // The next search starts from the accepted value.
    lambda = p.lambda;
    result.trace.push_back(std::move(rec));
    if (hit) {
      finish(Termination::Pointwise);
      return result;
    }
  }
  finish(Termination::MaxIterations);
  return result;
}

}  // namespace hipnex
