#include "suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include <Eigen/SVD>

#include "hipnex/baselines.hpp"
#include "hipnex/checks.hpp"
#include "hipnex/rng.hpp"
#include "runner.hpp"

namespace hipnex::app {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

struct Case {
  std::string label;
  Instance inst;
  Backend backend;
  double sigma_hat;
};

std::vector<Case> known_solution_cases(int cubic_n, int small_n) {
  std::vector<Case> cases;
  for (std::uint64_t seed : {0, 1, 2}) {
    ProblemSpec s;
    s.kind = "cubic";
    s.n = cubic_n;
    s.seed = seed;
    cases.push_back({"cubic n=" + std::to_string(cubic_n) + " seed=" + std::to_string(seed), build_instance(s),
                     Backend::Krylov, 0.25});
  }
  ProblemSpec a;
  a.kind = "affine";
  a.n = small_n;
  cases.push_back({"affine n=" + std::to_string(small_n), build_instance(a), Backend::Direct, 0.0});
  ProblemSpec b;
  b.kind = "box";
  b.n = small_n;
  cases.push_back({"box n=" + std::to_string(small_n), build_instance(b), Backend::Tseng, 0.25});
  return cases;
}

RunResult run_case(const Case& c, double rho, StopRule stop, bool record_points, int max_iter = 200000) {
  Params p = derive_params(c.sigma_hat, c.inst.problem.lipschitz);
  RunOptions o;
  o.rho = rho;
  o.max_iter = max_iter;
  o.strict = false;
  o.stop = stop;
  o.record_points = record_points;
  o.subproblem.backend = c.backend;
  return run(c.inst.problem, p, c.inst.x0, o);
}

template <class F>
SuiteReport timed(std::string name, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  SuiteReport r;
  r.name = std::move(name);
  try {
    body(r);
  } catch (const std::exception& e) {
    r.fail(std::string("exception: ") + e.what());
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

bool bitwise_equal(const Vector& a, const Vector& b) {
  return a.size() == b.size() && (a.array() == b.array()).all();
}

}  // namespace

SuiteReport suite_params(int packs, std::uint64_t seed) {
  return timed("params", [&](SuiteReport& r) {
    Rng rng(seed);
    double worst_q = 0.0, worst_theta_hat = 0.0;
    int failures = 0;
    for (int i = 0; i < packs; ++i) {
      const double sh = i % 10 == 0 ? 0.0 : 0.5 * rng.uniform();
      const double L = std::pow(10.0, rng.uniform(-4.0, 4.0));
      const Params p = derive_params(sh, L);
      std::ostringstream where;
      where << "pack " << i << " (sigma_hat=" << sh << ", L=" << L << ")";
      if (const auto v = params_violations(p); !v.empty()) {
        if (++failures <= 5) r.fail(where.str() + ": violates " + v.front());
      }
      const double b = 2.0 * p.theta + 0.5 * p.eta * p.lipschitz;
      const double q_rel = std::abs(p.q(p.tau)) / (p.theta * p.tau * p.tau + b * p.tau + p.theta + p.theta_hat);
      worst_q = std::max(worst_q, q_rel);
      if (q_rel > 1e-10 && ++failures <= 5) r.fail(where.str() + ": q(tau) relative " + fmt(q_rel));
      const double th = std::abs(p.theta_hat - (1.0 - 2.0 * sh) / 4.0) / p.theta_hat;
      worst_theta_hat = std::max(worst_theta_hat, th);
      if (th > 1e-12 && ++failures <= 5) r.fail(where.str() + ": theta_hat != (1 - 2 sigma_hat)/4");
      if (sh == 0.0 && std::abs(p.theta_hat - p.theta * p.theta) > 1e-15 && ++failures <= 5) {
        r.fail(where.str() + ": theta_hat != theta^2 at sigma_hat = 0");
      }
      // Exact-tau budgets never exceed the closed forms.
      const double lambda1 = init_lambda(std::pow(10.0, rng.uniform(-3.0, 3.0)), p.theta, L);
      Params q = p;
      q.lambda1 = lambda1;
      const double d0 = std::pow(10.0, rng.uniform(-2.0, 2.0));
      const double rho = std::pow(10.0, rng.uniform(-8.0, -1.0));
      if (budget_pointwise(q, d0, rho) > budget_pointwise_closed_form(sh, L, lambda1, d0, rho) && ++failures <= 5) {
        r.fail(where.str() + ": pointwise budget exceeds closed form");
      }
      if (budget_ergodic(q, d0, rho) > budget_ergodic_closed_form(sh, L, lambda1, d0, rho) && ++failures <= 5) {
        r.fail(where.str() + ": ergodic budget exceeds closed form");
      }
    }
    for (double bad : {-0.1, 0.5, 0.6}) {
      bool threw = false;
      try {
        derive_params(bad, 1.0);
      } catch (const ParameterError&) {
        threw = true;
      }
      if (!threw) r.fail("sigma_hat = " + fmt(bad) + " accepted");
    }
    r.note(std::to_string(packs) + " packs, max |q(tau)| relative " + fmt(worst_q) +
           ", max theta_hat identity error " + fmt(worst_theta_hat));
  });
}

SuiteReport suite_invariants(int cubic_n, int small_n) {
  return timed("invariants", [&](SuiteReport& r) {
    for (const Case& c : known_solution_cases(cubic_n, small_n)) {
      const RunResult res = run_case(c, 1e-8, StopRule::Any, true);
      const Params& p = res.params;
      const double slack = 1e-8 * (1.0 + p.theta);
      const InvariantStats& s = res.invariants;
      if (s.max_a_excess > slack) r.fail(c.label + ": invariant A excess " + fmt(s.max_a_excess));
      if (s.max_b_excess > slack) r.fail(c.label + ": invariant B excess " + fmt(s.max_b_excess));
      if (s.max_lambda_law_error > 1e-10) r.fail(c.label + ": lambda law error " + fmt(s.max_lambda_law_error));
      if (s.breaches) r.fail(c.label + ": " + s.messages.front());
      int small_moved = 0, skip_solved = 0, misclassified = 0;
      for (const IterationRecord& rec : res.trace) {
        if (rec.step == StepClass::Small && !bitwise_equal(rec.points->x, rec.points->x_prev)) ++small_moved;
        if (rec.skipped && (rec.linear_solves != 0 || rec.inner_iterations != 0)) ++skip_solved;
        if ((rec.step == StepClass::Large) != (rec.step_length >= p.eta)) ++misclassified;
      }
      if (small_moved) r.fail(c.label + ": " + std::to_string(small_moved) + " SMALL steps moved x");
      if (skip_solved) r.fail(c.label + ": " + std::to_string(skip_solved) + " skipped steps solved");
      if (misclassified) r.fail(c.label + ": " + std::to_string(misclassified) + " misclassified steps");
      const HpeSubsequenceReport hpe = check_hpe_subsequence(res.trace, p);
      if (!hpe.passed) r.fail(c.label + ": " + hpe.summary());
      if (res.termination == Termination::MaxIterations) r.fail(c.label + ": did not converge");
      r.note(c.label + ": " + std::to_string(res.iterations) + " iterations, max A - theta " +
             fmt(s.max_a_excess) + ", max B - theta_hat " + fmt(s.max_b_excess) + ", lambda law " +
             fmt(s.max_lambda_law_error));
    }
  });
}

SuiteReport suite_rates(int cubic_n, int small_n) {
  return timed("rates", [&](SuiteReport& r) {
    for (const Case& c : known_solution_cases(cubic_n, small_n)) {
      const RunResult res = run_case(c, 1e-8, StopRule::Any, false);
      const double d0 = (c.inst.x0 - *c.inst.problem.known_solution).norm();
      const RateBoundReport rep = check_rate_bounds(res.trace, res.params, d0);
      if (!rep.passed) r.fail(c.label + ": " + rep.summary());
      else r.note(c.label + ": " + rep.summary());
    }
  });
}

SuiteReport suite_budgets(int cubic_n, int small_n) {
  return timed("budgets", [&](SuiteReport& r) {
    for (const Case& c : known_solution_cases(cubic_n, small_n)) {
      const double d0 = (c.inst.x0 - *c.inst.problem.known_solution).norm();
      for (double rho : {1e-3, 1e-6}) {
        const std::string tag = c.label + " rho=" + fmt(rho);
        const RunResult pw = run_case(c, rho, StopRule::PointwiseOnly, false);
        const std::int64_t bp = budget_pointwise(pw.params, d0, rho);
        if (!pw.first_pointwise) {
          r.fail(tag + ": no pointwise success within " + std::to_string(pw.iterations) + " iterations");
        } else if (*pw.first_pointwise > bp) {
          r.fail(tag + ": pointwise " + std::to_string(*pw.first_pointwise) + " > budget " + std::to_string(bp));
        }
        // A pointwise certificate is itself an enlargement triple with eps = 0,
        // so the ergodic target is met by whichever criterion fires first.
        const RunResult er = run_case(c, rho, StopRule::Any, false);
        const std::int64_t be = budget_ergodic(er.params, d0, rho);
        std::optional<int> hit = er.first_ergodic;
        if (er.first_pointwise && (!hit || *er.first_pointwise < *hit)) hit = er.first_pointwise;
        if (!hit) {
          r.fail(tag + ": no success within " + std::to_string(er.iterations) + " iterations");
        } else if (*hit > be) {
          r.fail(tag + ": success at " + std::to_string(*hit) + " > ergodic budget " + std::to_string(be));
        }
        r.note(tag + ": pointwise " + (pw.first_pointwise ? std::to_string(*pw.first_pointwise) : "-") + " / " +
               std::to_string(bp) + ", enlargement triple " + (hit ? std::to_string(*hit) : "-") + " (" +
               std::string(to_string(er.termination)) + ") / " + std::to_string(be));
      }
    }
  });
}

SuiteReport suite_subproblem(int instances) {
  return timed("subproblem", [&](SuiteReport& r) {
    Rng rng(2024);
    std::map<std::string, double> worst;  // max residual / (sigma_hat ||y - anchor||)
    std::map<std::string, int> count;
    double worst_tseng_ratio = 0.0;
    auto record = [&](const std::string& backend, const VIProblem& problem, Evaluator& eval,
                      const SubproblemInstance& inst, const ApproxSolution& sol, double sh) {
      const double e = subproblem_residual(eval, inst, sol.y, sol.nu).norm();
      const double bound = sh * (sol.y - inst.anchor).norm();
      const double ratio = bound > 0.0 ? e / bound : (e == 0.0 ? 0.0 : INFINITY);
      worst[backend] = std::max(worst[backend], ratio);
      ++count[backend];
      // Recomputation may differ from the solver's own residual in the last bits.
      if (e > bound + 1e-12 * (1.0 + bound)) {
        r.fail(backend + " instance " + std::to_string(count[backend]) + ": residual " + fmt(e) + " > " + fmt(bound));
      }
      const double tol = 1e-9 * (1.0 + sol.y.norm() + sol.nu.norm());
      if (!check_normal_cone(problem, sol.y, sol.nu, tol)) {
        r.fail(backend + " instance " + std::to_string(count[backend]) + ": normal cone check failed");
      }
    };

    for (int i = 0; i < instances; ++i) {
      // Direct and Krylov on cubic problems, whole space.
      const int n = 5 + static_cast<int>(rng.uniform() * 25);
      CubicMinMax cm = gen_cubic_minmax({n, rng.next_u64(), std::pow(10.0, rng.uniform(-3.0, 0.0)), 20.0});
      const Vector anchor = rng.normal_vector(2 * n);
      const Vector center = anchor + rng.uniform(0.01, 3.0) * rng.normal_vector(2 * n);
      const double lambda = std::pow(10.0, rng.uniform(-2.0, 3.0));
      {
        Evaluator eval(cm.problem);
        const SubproblemInstance inst = SubproblemInstance::make(eval, lambda, anchor, center);
        record("direct", cm.problem, eval, inst, solve_direct(eval, inst), 0.25);
      }
      {
        const double sh = rng.uniform(0.05, 0.45);
        Evaluator eval(cm.problem);
        const SubproblemInstance inst = SubproblemInstance::make(eval, lambda, anchor, center);
        record("krylov", cm.problem, eval, inst, solve_krylov(eval, inst, sh, 20000), sh);
      }
      // Tseng on box problems.
      const int m = 5 + static_cast<int>(rng.uniform() * 20);
      BoxProblem bp = gen_box({m, rng.next_u64(), std::pow(10.0, rng.uniform(-1.0, 1.0)), -1.0, 1.0, 0.4});
      const Vector b_anchor = bp.problem.projected(1.5 * rng.normal_vector(m));
      const Vector b_center = b_anchor + rng.uniform(0.01, 3.0) * rng.normal_vector(m);
      const double b_lambda = std::pow(10.0, rng.uniform(-2.0, 1.5));
      const double sh = rng.uniform(0.05, 0.45);
      Evaluator eval(bp.problem);
      const SubproblemInstance inst = SubproblemInstance::make(eval, b_lambda, b_anchor, b_center);
      const ApproxSolution sol = solve_tseng(eval, inst, sh);
      record("tseng", bp.problem, eval, inst, sol, sh);
      // Worst-case bound evaluated with the exact spectral norm and the step actually used.
      const Matrix J = bp.problem.materialize_jacobian(b_anchor);
      const double jnorm = Eigen::JacobiSVD<Matrix>(J).singularValues()(0);
      const double Lk = b_lambda * jnorm + 1.0;
      const std::int64_t j_hat = tseng_iteration_bound(sol.step, Lk, sh);
      worst_tseng_ratio = std::max(worst_tseng_ratio, static_cast<double>(sol.inner_iterations) / (2.0 * j_hat));
      if (sol.inner_iterations > 2 * j_hat) {
        r.fail("tseng instance " + std::to_string(i) + ": " + std::to_string(sol.inner_iterations) +
               " sweeps > 2 j_hat = " + std::to_string(2 * j_hat));
      }
    }
    for (const auto& [backend, w] : worst) {
      r.note(backend + ": " + std::to_string(count[backend]) + " instances, max ||e|| / (sigma_hat ||y - anchor||) " +
             fmt(w));
    }
    r.note("tseng: max sweeps / (2 j_hat) " + fmt(worst_tseng_ratio));
  });
}

SuiteReport suite_hpe(int steps) {
  return timed("hpe", [&](SuiteReport& r) {
    struct Setting {
      double tau, eta;
    };
    for (std::uint64_t seed : {0, 1, 2}) {
      AffineProblem ap = gen_affine({20, seed, 1.0, 1.0});
      Rng rng(derive_seed(seed, 5));
      const Vector x0 = 3.0 * rng.normal_vector(20);
      const double d0 = (x0 - *ap.problem.known_solution).norm();
      // Settings whose 200 steps stay above the floating-point floor of the
      // exact resolvent (lambda grows without bound as x_k converges).
      for (Setting s : {Setting{0.05, 1.0}, Setting{0.1, 0.1}, Setting{0.1, 0.01}}) {
        HpeOracle oracle = exact_resolvent_oracle(ap.M, ap.q, s.eta, 1.0);
        const HpeResult h = hpe_run(ap.problem, oracle, s.tau, 0.0, s.eta, x0, steps, d0);
        const HpeBoundReport& b = *h.bounds;
        std::ostringstream os;
        os << "affine seed=" << seed << " tau=" << s.tau << " eta=" << s.eta << ": " << h.trace.size()
           << " steps, ratios pointwise " << fmt(b.pointwise_ratio) << " v " << fmt(b.ergodic_v_ratio) << " eps "
           << fmt(b.ergodic_eps_ratio) << ", eps margin " << fmt(b.min_eps_margin);
        if (!b.passed || static_cast<int>(h.trace.size()) != steps) r.fail(os.str());
        else r.note(os.str());
        // Extragradient identity, reconstructed bitwise from the stored trace.
        int mismatched = 0;
        for (const HpeRecord& rec : h.trace) {
          if (!bitwise_equal(rec.x, Vector(rec.x_prev - s.tau * rec.lambda * rec.w))) ++mismatched;
        }
        if (mismatched) r.fail(std::to_string(mismatched) + " extragradient updates not reproducible");
      }
    }
  });
}

SuiteReport suite_ergodic(int length) {
  return timed("ergodic", [&](SuiteReport& r) {
    // A trace shaped like a converging run: monotone affine w, lambdas over
    // many magnitudes, iterates contracting toward the solution.
    const int n = 20;
    AffineProblem ap = gen_affine({n, 3, 1.0, 1.0});
    Rng rng(99);
    std::vector<double> lambdas(length);
    std::vector<Vector> ys(length), ws(length);
    ErgodicAccumulator acc;
    for (int i = 0; i < length; ++i) {
      const double decay = std::pow(10.0, -6.0 * i / length);
      lambdas[i] = std::pow(10.0, rng.uniform(-1.0, 3.0)) / std::sqrt(decay);
      ys[i] = *ap.problem.known_solution + decay * rng.normal_vector(n);
      ws[i] = ap.problem.F(ys[i]);
      acc.ingest(lambdas[i], ys[i], ws[i]);
    }
    const ErgodicCertificate cert = *acc.certificate();

    // Two-pass definition in long double.
    using LVec = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
    long double Lambda = 0.0L;
    LVec ya = LVec::Zero(n), va = LVec::Zero(n);
    for (int i = 0; i < length; ++i) {
      Lambda += lambdas[i];
      ya += static_cast<long double>(lambdas[i]) * ys[i].cast<long double>();
      va += static_cast<long double>(lambdas[i]) * ws[i].cast<long double>();
    }
    ya /= Lambda;
    va /= Lambda;
    long double eps = 0.0L;
    for (int i = 0; i < length; ++i) {
      eps += static_cast<long double>(lambdas[i]) *
             (ys[i].cast<long double>() - ya).dot(ws[i].cast<long double>() - va);
    }
    eps /= Lambda;

    const double e_rel = std::abs(static_cast<double>((cert.eps_a - eps) / eps));
    const double y_rel = static_cast<double>((cert.y_a.cast<long double>() - ya).norm() / ya.norm());
    const double v_rel = static_cast<double>((cert.v_a.cast<long double>() - va).norm() / va.norm());
    std::ostringstream os;
    os << length << " triples: eps_a " << fmt(cert.eps_a) << " vs direct " << fmt(static_cast<double>(eps))
       << ", relative errors eps " << fmt(e_rel) << " y_a " << fmt(y_rel) << " v_a " << fmt(v_rel);
    if (e_rel > 1e-8 || y_rel > 1e-8 || v_rel > 1e-8) r.fail(os.str());
    else r.note(os.str());
    if (cert.eps_a < -1e-10 * cert.scale) r.fail("negative eps_a " + fmt(cert.eps_a));
  });
}

SuiteReport suite_end_to_end(int n, double rho, double tol) {
  return timed("end_to_end", [&](SuiteReport& r) {
    ProblemSpec s;
    s.kind = "cubic";
    s.n = n;
    const Instance inst = build_instance(s);
    Case c{"cubic", inst, Backend::Krylov, 0.25};
    const RunResult res = run_case(c, rho, StopRule::PointwiseOnly, false);
    const double err = (res.y_best - *inst.problem.known_solution).norm();
    std::ostringstream os;
    os << "cubic n=" << n << " rho=" << fmt(rho) << ": " << to_string(res.termination) << " after "
       << res.iterations << " iterations, residual " << fmt(res.best_residual) << ", ||z - z*|| " << fmt(err);
    if (res.termination != Termination::Pointwise || err > tol) r.fail(os.str());
    else r.note(os.str());
  });
}

SuiteReport suite_direction(int n, int seeds) {
  return timed("direction", [&](SuiteReport& r) {
    int wins = 0;
    for (int seed = 0; seed < seeds; ++seed) {
      RunConfig cfg;
      cfg.problem.kind = "cubic";
      cfg.problem.n = n;
      cfg.problem.seed = static_cast<std::uint64_t>(seed);
      cfg.backend = Backend::Krylov;
      cfg.rho = 1e-6;
      cfg.max_iter = 100000;
      const Instance inst = build_instance(cfg.problem);
      cfg.method = "hipnex";
      const Outcome hip = execute(cfg, inst);
      cfg.method = "npe";
      const Outcome npe = execute(cfg, inst);
      const bool reached = hip.summary.ok() && npe.summary.ok();
      const bool win = reached && hip.summary.linear_solves <= npe.summary.linear_solves;
      wins += win ? 1 : 0;
      std::ostringstream os;
      os << "seed " << seed << ": hipnex-krylov " << hip.summary.linear_solves << " solves ("
         << hip.summary.termination << "), npe-krylov " << npe.summary.linear_solves << " solves ("
         << npe.summary.termination << ")";
      r.note(os.str());
    }
    const int needed = seeds / 2 + 1;
    const std::string verdict = "hipnex no worse on " + std::to_string(wins) + " of " + std::to_string(seeds) +
                                " seeds (need " + std::to_string(needed) + ")";
    if (wins < needed) r.fail(verdict);
    else r.note(verdict);
  });
}

std::vector<std::string> suite_selectors() {
  return {"params", "invariants", "rates", "budgets", "subproblem", "hpe", "ergodic", "e2e", "direction", "all"};
}

std::vector<SuiteReport> run_suites(const std::string& selector) {
  const std::vector<std::pair<std::string, std::function<SuiteReport()>>> table{
      {"params", [] { return suite_params(); }},
      {"invariants", [] { return suite_invariants(); }},
      {"rates", [] { return suite_rates(); }},
      {"budgets", [] { return suite_budgets(); }},
      {"subproblem", [] { return suite_subproblem(); }},
      {"hpe", [] { return suite_hpe(); }},
      {"ergodic", [] { return suite_ergodic(); }},
      {"e2e", [] { return suite_end_to_end(); }},
      {"direction", [] { return suite_direction(); }},
  };
  std::vector<SuiteReport> out;
  for (const auto& [name, fn] : table) {
    // "all" covers the property suites; the benchmark comparison runs on request.
    if (selector == name || (selector == "all" && name != "direction")) out.push_back(fn());
  }
  if (out.empty()) throw ParameterError("unknown check selector '" + selector + "'");
  return out;
}

}  // namespace hipnex::app
