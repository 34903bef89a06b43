#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hipnex/ergodic.hpp"
#include "hipnex/params.hpp"
#include "hipnex/solver.hpp"

namespace hipnex {

/// Convergence-rate bounds of the large-step under-relaxed HPE scheme with
/// constants (tau, eta, sigma), as functions of d0 and the step count k.
struct RateBounds {
  double tau = 0.0;
  double eta = 0.0;
  double sigma = 0.0;

  static RateBounds from(const Params& p) { return {p.tau, p.eta, p.sigma}; }

  /// d0^2 / (tau eta (1 - sigma) k)
  double pointwise(double d0, int k) const;
  /// 2 d0^2 / (tau^{3/2} eta sqrt(1 - sigma^2) k^{3/2})
  double ergodic_v(double d0, int k) const;
  /// 2 d0^3 / (tau^{3/2} eta (1 - sigma^2) k^{3/2})
  double ergodic_eps(double d0, int k) const;
};

/// Recomputation of the HPE structure of the LARGE-step subsequence from a
/// trace recorded with points. All maxima are relative violations (<= 0 passes).
struct HpeSubsequenceReport {
  int large_steps = 0;
  double relative_error = 0.0;   // ||lambda w + y - x_prev_large|| - sigma ||y - x_prev_large||
  double large_step = 0.0;       // eta - lambda ||y - x_prev_large||
  double extragradient = 0.0;    // ||x - (x_prev_large - tau lambda w)||
  double frozen_x = 0.0;         // ||x_{i_k - 1} - x_{i_{k-1}}||
  bool passed = true;
  std::string summary() const;
};

/// Throws ParameterError if the trace was recorded without points.
HpeSubsequenceReport check_hpe_subsequence(const std::vector<IterationRecord>& trace,
                                           const Params& params, double rel_tol = 1e-8);

/// Worst ratio value / bound over every LARGE-step count (<= 1 passes).
struct RateBoundReport {
  int large_steps = 0;
  double pointwise_ratio = 0.0;
  double ergodic_v_ratio = 0.0;
  double ergodic_eps_ratio = 0.0;
  double min_eps_margin = 0.0;  // min eps_a + 1e-10 scale (>= 0 passes)
  bool passed = true;
  std::string summary() const;
};

RateBoundReport check_rate_bounds(const std::vector<IterationRecord>& trace, const Params& params,
                                  double d0);

/// Sampled necessary condition for v in (F + N_C)^eps(y):
/// <v - F(z) - u, y - z> >= -eps - tol for random z in C, u in N_C(z).
/// Returns the smallest margin observed (>= 0 passes).
double sample_enlargement_margin(const VIProblem& problem, const ErgodicCertificate& cert,
                                 int samples, std::uint64_t seed, double radius = 1.0);

}  // namespace hipnex
