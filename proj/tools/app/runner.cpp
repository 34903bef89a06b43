#include "runner.hpp"

#include <memory>
#include <vector>

#include "hipnex/baselines.hpp"
#include "hipnex/rng.hpp"

namespace hipnex::app {

namespace {

constexpr std::uint64_t kInitialPointStream = 0x1001;

RunResult from_hpe(const HpeResult& h, const Params& p, double rho,
                   const std::vector<std::int64_t>& cum_solves, std::uint64_t x0_hash) {
  RunResult r;
  r.method = "hpe";
  r.params = p;
  r.x0_hash = x0_hash;
  r.best_residual = 1e300;
  for (const HpeRecord& h_rec : h.trace) {
    IterationRecord rec;
    rec.k = h_rec.k;
    rec.lambda = h_rec.lambda;
    rec.step = StepClass::Large;
    rec.residual_norm = h_rec.residual_norm;
    rec.step_length = h_rec.step_length;
    rec.large_count = h_rec.k;
    rec.min_large_residual = h_rec.min_residual;
    rec.ergodic_v_norm = h_rec.ergodic_v_norm;
    rec.ergodic_eps = h_rec.ergodic_eps;
    rec.ergodic_scale = h_rec.ergodic_scale;
    rec.wall_time_s = h_rec.wall_time_s;
    rec.cum_f_evals = h_rec.k;  // one F(y_k) per step
    if (h_rec.residual_norm < r.best_residual) {
      r.best_residual = h_rec.residual_norm;
      r.y_best = h_rec.y;
    }
    if (!r.first_pointwise && h_rec.residual_norm <= rho) r.first_pointwise = h_rec.k;
    r.trace.push_back(std::move(rec));
  }
  std::int64_t prev = 0;
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    r.trace[i].cum_linear_solves = cum_solves[i];
    r.trace[i].linear_solves = cum_solves[i] - prev;
    prev = cum_solves[i];
  }
  r.iterations = static_cast<int>(r.trace.size());
  r.termination = r.first_pointwise ? Termination::Pointwise : Termination::MaxIterations;
  r.x_final = h.x_final;
  r.y_final = r.y_best;
  r.ergodic = h.ergodic;
  r.linear_solves = cum_solves.empty() ? 0 : cum_solves.back();
  r.counts.f_evals = static_cast<std::int64_t>(h.trace.size());
  r.wall_time_s = h.trace.empty() ? 0.0 : h.trace.back().wall_time_s;
  return r;
}

}  // namespace

Instance build_instance(const ProblemSpec& spec) {
  Instance inst;
  inst.kind = spec.kind;
  if (spec.kind == "cubic") {
    CubicMinMax cm = gen_cubic_minmax({spec.n, spec.seed, spec.lipschitz(), spec.cond});
    inst.data_hash = hash_vector(cm.b);
    inst.problem = std::move(cm.problem);
  } else if (spec.kind == "affine") {
    AffineProblem ap = gen_affine({spec.n, spec.seed, spec.lipschitz(), spec.skew_scale});
    inst.data_hash = hash_vector(ap.q);
    inst.problem = std::move(ap.problem);
    inst.M = std::move(ap.M);
    inst.q = std::move(ap.q);
  } else if (spec.kind == "box") {
    BoxProblem bp = gen_box({spec.n, spec.seed, spec.lipschitz(), spec.lo, spec.hi, spec.active_fraction});
    inst.data_hash = hash_vector(bp.q);
    inst.problem = std::move(bp.problem);
  } else {
    throw ParameterError("unknown problem kind '" + spec.kind + "'");
  }
  Rng rng(derive_seed(spec.seed, kInitialPointStream));
  inst.x0 = inst.problem.projected(rng.normal_vector(inst.problem.dim));
  return inst;
}

MetricsSummary summarize(const RunConfig& cfg, const Instance& inst, const RunResult& r) {
  MetricsSummary m;
  m.method = r.method;
  m.backend = std::string(to_string(cfg.backend));
  m.problem = inst.kind;
  m.n = cfg.problem.n;
  m.seed = cfg.problem.seed;
  m.time_s = r.wall_time_s;
  m.iterations = r.iterations;
  m.termination = std::string(to_string(r.termination));
  m.final_residual = r.best_residual;
  m.linear_solves = r.linear_solves;
  m.f_evals = r.counts.f_evals;
  m.jvp = r.counts.jvp;
  m.materializations = r.counts.materializations;
  m.j_evals = r.counts.jacobian_evals();
  m.inner_iterations = r.inner_iterations;
  m.first_pointwise = r.first_pointwise;
  m.first_ergodic = r.first_ergodic;
  if (inst.problem.known_solution && r.y_best.size() == inst.problem.dim) {
    m.distance_to_solution = (r.y_best - *inst.problem.known_solution).norm();
  }
  m.x0_hash = hash_vector(inst.x0);
  m.data_hash = inst.data_hash;
  m.invariant_breaches = r.invariants.breaches;
  return m;
}

Outcome execute(const RunConfig& cfg, const Instance& inst) {
  validate(cfg);
  Params params = resolve_params(cfg);

  SubproblemOptions sub;
  sub.backend = cfg.backend;
  sub.sigma_hat = cfg.sigma_hat;
  sub.restart = cfg.krylov_restart;
  sub.max_inner = cfg.krylov_max_inner;

  Outcome out;
  if (cfg.method == "hipnex") {
    RunOptions opt;
    opt.rho = cfg.rho;
    opt.max_iter = cfg.max_iter;
    opt.subproblem = sub;
    opt.strict = cfg.strict;
    opt.stop = cfg.stop == "pointwise" ? StopRule::PointwiseOnly
               : cfg.stop == "ergodic" ? StopRule::ErgodicOnly
                                       : StopRule::Any;
    opt.fault_at_iteration = cfg.inject_fault;
    out.result = run(inst.problem, params, inst.x0, opt);
  } else if (cfg.method == "npe") {
    out.result = npe_run(inst.problem, cfg.npe, inst.x0, cfg.rho, cfg.max_iter, sub);
  } else {
    if (!inst.M || !inst.q) throw ParameterError("method hpe runs on affine problems only");
    auto solves = std::make_shared<std::int64_t>(0);
    HpeOracle resolvent = exact_resolvent_oracle(*inst.M, *inst.q, params.eta, 1.0, solves);
    std::vector<std::int64_t> cum_solves;
    HpeOracle oracle = [&](const Vector& x) {
      HpeStep s = resolvent(x);
      cum_solves.push_back(*solves);
      return s;
    };
    std::optional<double> d0;
    if (inst.problem.known_solution) d0 = (inst.x0 - *inst.problem.known_solution).norm();
    // Exact resolvent: sigma = 0.
    HpeResult h = hpe_run(inst.problem, oracle, params.tau, 0.0, params.eta, inst.x0, cfg.max_iter, d0, {},
                          cfg.rho);
    params.sigma = 0.0;
    out.result = from_hpe(h, params, cfg.rho, cum_solves, hash_vector(inst.x0));
  }
  out.summary = summarize(cfg, inst, out.result);
  return out;
}

Outcome execute(const RunConfig& cfg) {
  validate(cfg);
  return execute(cfg, build_instance(cfg.problem));
}

}  // namespace hipnex::app
