#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "hipnex/checks.hpp"
#include "hipnex/core.hpp"
#include "hipnex/ergodic.hpp"
#include "hipnex/solver.hpp"
#include "hipnex/subproblem.hpp"

namespace hipnex {

// ---------------------------------------------------------------------------
// Large-step under-relaxed HPE driver

/// (lambda_k, y_k, nu_k) returned by an HPE oracle for the point x_{k-1}.
struct HpeStep {
  double lambda = 0.0;
  Vector y;
  Vector nu;
};

using HpeOracle = std::function<HpeStep(const Vector& x_prev)>;

struct HpeRecord {
  int k = 0;
  double lambda = 0.0;
  double residual_norm = 0.0;  // ||F(y_k) + nu_k||
  double min_residual = 0.0;   // min_{j<=k} ||F(y_j) + nu_j||
  double relative_error = 0.0; // ||lambda w + y - x_prev|| / ||y - x_prev||
  double step_length = 0.0;    // lambda ||y - x_prev||
  double ergodic_v_norm = 0.0;
  double ergodic_eps = 0.0;
  double ergodic_scale = 0.0;
  double wall_time_s = 0.0;
  Vector x_prev;
  Vector y;
  Vector w;
  Vector x;
};

struct HpeBoundReport {
  double pointwise_ratio = 0.0;
  double ergodic_v_ratio = 0.0;
  double ergodic_eps_ratio = 0.0;
  double min_eps_margin = 0.0;
  bool passed = true;
};

struct HpeResult {
  std::vector<HpeRecord> trace;
  std::optional<ErgodicCertificate> ergodic;
  Vector x_final;
  std::optional<HpeBoundReport> bounds;  // set when d0 is supplied
};

/// Runs N steps of x_k = x_{k-1} - tau lambda_k (F(y_k) + nu_k), verifying
/// after every oracle call that ||lambda(F(y)+nu) + y - x_prev|| <= sigma ||y - x_prev||
/// and lambda ||y - x_prev|| >= eta (up to `tol`); throws OracleError otherwise.
/// Ergodic averages run over all iterations. A positive `stop_rho` ends the
/// run early once ||F(y_k) + nu_k|| <= stop_rho.
HpeResult hpe_run(const VIProblem& problem, const HpeOracle& oracle, double tau, double sigma,
                  double eta, const Vector& x0, int N, std::optional<double> d0 = std::nullopt,
                  Tolerance tol = {}, double stop_rho = 0.0);

/// Exact resolvent oracle for F(z) = M z + q on the whole space: y = (lambda M + I)^{-1}(x - lambda q),
/// nu = 0, with lambda doubled from the previous accepted value until lambda ||y - x|| >= eta.
/// Each factorization increments `*solves` when given.
HpeOracle exact_resolvent_oracle(Matrix M, Vector q, double eta, double lambda0 = 1.0,
                                 std::shared_ptr<std::int64_t> solves = nullptr);

// ---------------------------------------------------------------------------
// Newton proximal extragradient with lambda search

struct NpeConfig {
  double sigma_l = 0.1;
  double sigma_u = 0.5;
  int max_probes = 50;
  /// Initial lambda; <= 0 picks sqrt((sigma_l + sigma_u) / (L ||F(x0)||)).
  double lambda0 = 0.0;
};

void validate_npe_config(const NpeConfig& config);

/// NPE: at each iteration search lambda (doubling, then geometric bisection)
/// until 2 sigma_l / L <= lambda ||y(lambda) - x|| <= 2 sigma_u / L, where
/// y(lambda) solves the prox subproblem linearized at x. Then x <- x - lambda (F(y) + nu).
/// Every probe counts one linear solve. Throws SubproblemError when a search
/// exhausts max_probes.
RunResult npe_run(const VIProblem& problem, const NpeConfig& config, const Vector& x0, double rho,
                  int max_iter, const SubproblemOptions& subproblem);

}  // namespace hipnex
