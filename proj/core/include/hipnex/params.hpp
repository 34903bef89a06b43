#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hipnex {

/// Parameter pack of the homotopy proximal-Newton extragradient method.
///
/// sigma_hat is the subproblem inexactness, theta/theta_hat the two
/// thresholds on the scaled prox residual, eta the large-step threshold,
/// tau the homotopy factor (smallest root of q), sigma = 2 theta_hat/(eta L)
/// the relative error seen by the large-step subsequence.
struct Params {
  double sigma_hat = 0.0;
  double theta = 0.0;
  double theta_hat = 0.0;
  double eta = 0.0;
  double tau = 0.0;
  double sigma = 0.0;
  double lipschitz = 0.0;
  /// Initial proximal parameter; <= 0 means "derive from ||F(y0)|| at start".
  double lambda1 = 0.0;

  /// q(t) = theta t^2 - (2 theta + eta L / 2) t + theta - theta_hat.
  double q(double t) const;
};

/// Derives the full pack from (sigma_hat, L). Defaults: theta =
/// (1 - sigma_hat)(1 - 2 sigma_hat)/2 and eta = 4 theta / L. tau is the
/// closed-form smallest root of q. Throws ParameterError on invalid input.
Params derive_params(double sigma_hat, double lipschitz,
                     std::optional<double> theta_override = std::nullopt,
                     std::optional<double> eta_override = std::nullopt);

/// Names of the invariants `params` violates (empty when valid). lambda1 is
/// only checked against `norm_F_y0` when both are positive.
std::vector<std::string> params_violations(const Params& params, double norm_F_y0 = -1.0);

/// Throws ParameterError listing every violated invariant.
void validate_params(const Params& params, double norm_F_y0 = -1.0);

/// Largest admissible lambda1: sqrt(2 theta / (L ||F(y0)||)), or 1 when F(y0) = 0.
double init_lambda(double norm_F_y0, double theta, double lipschitz);

/// max(log t, 0) with the natural logarithm.
double log_plus(double t);

/// Worst-case iteration count to reach ||F(y) + nu|| <= rho, using the exact tau.
std::int64_t budget_pointwise(const Params& params, double d0, double rho);

/// Worst-case iteration count to reach an epsilon-enlargement certificate
/// with max(||v||, eps) <= rho, using the exact tau.
std::int64_t budget_ergodic(const Params& params, double d0, double rho);

/// Closed-form pointwise budget for the default theta/eta, written in terms
/// of (sigma_hat, L) via the lower bound tau > (1 - 2 sigma_hat)/(8 (1 - sigma_hat)).
/// Dominates budget_pointwise for default packs.
std::int64_t budget_pointwise_closed_form(double sigma_hat, double lipschitz, double lambda1,
                                          double d0, double rho);

/// Closed-form ergodic budget for the default theta/eta.
std::int64_t budget_ergodic_closed_form(double sigma_hat, double lipschitz, double lambda1,
                                        double d0, double rho);

}  // namespace hipnex
