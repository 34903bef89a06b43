#include "hipnex/params.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hipnex/errors.hpp"

namespace hipnex {
namespace {

std::int64_t ceil_count(double value) {
  if (!(value > 0.0)) return 0;
  const double c = std::ceil(value);
  if (c >= static_cast<double>(std::numeric_limits<std::int64_t>::max()))
    return std::numeric_limits<std::int64_t>::max();
  return static_cast<std::int64_t>(c);
}

std::int64_t saturating_add(std::int64_t a, std::int64_t b) {
  if (a > std::numeric_limits<std::int64_t>::max() - b) return std::numeric_limits<std::int64_t>::max();
  return a + b;
}

// Second ceiling of both budgets: the number of null steps needed to grow
// lambda past the point where every small-step residual is below rho.
std::int64_t homotopy_term(const Params& p, double rho) {
  const double arg = (p.eta + 2.0 * p.theta_hat / p.lipschitz) / (p.lambda1 * p.lambda1 * rho);
  return ceil_count(log_plus(arg) / (2.0 * p.tau));
}

void require_budget_inputs(const Params& p, double d0, double rho) {
  if (!(d0 >= 0.0)) throw ParameterError("budget: d0 must be nonnegative");
  if (!(rho > 0.0)) throw ParameterError("budget: rho must be positive");
  if (!(p.lambda1 > 0.0)) throw ParameterError("budget: lambda1 must be set (positive)");
}

}  // namespace

double Params::q(double t) const {
  return theta * t * t - (2.0 * theta + 0.5 * eta * lipschitz) * t + theta - theta_hat;
}

Params derive_params(double sigma_hat, double lipschitz, std::optional<double> theta_override,
                     std::optional<double> eta_override) {
  if (!(sigma_hat >= 0.0 && sigma_hat < 0.5)) {
    std::ostringstream os;
    os << "sigma_hat must lie in [0, 1/2), got " << sigma_hat;
    throw ParameterError(os.str());
  }
  if (!(lipschitz > 0.0) || !std::isfinite(lipschitz)) {
    throw ParameterError("Lipschitz constant L must be positive and finite");
  }

  Params p;
  p.sigma_hat = sigma_hat;
  p.lipschitz = lipschitz;

  const double theta_max = (1.0 - sigma_hat) * (1.0 - 2.0 * sigma_hat);
  p.theta = theta_override.value_or(0.5 * theta_max);
  if (!(p.theta > 0.0 && p.theta < theta_max)) {
    std::ostringstream os;
    os << "theta must lie in (0, " << theta_max << "), got " << p.theta;
    throw ParameterError(os.str());
  }
  const double one_minus = 1.0 - sigma_hat;
  p.theta_hat = p.theta * (sigma_hat / one_minus + p.theta / (one_minus * one_minus));

  p.eta = eta_override.value_or(4.0 * p.theta / lipschitz);
  if (!(p.eta > 2.0 * p.theta_hat / lipschitz) || !std::isfinite(p.eta)) {
    std::ostringstream os;
    os << "eta must exceed 2 theta_hat / L = " << 2.0 * p.theta_hat / lipschitz << ", got " << p.eta;
    throw ParameterError(os.str());
  }

  // Smallest root of q in the cancellation-free form 2c / (b + sqrt(b^2 - 4ac)).
  const double b = 2.0 * p.theta + 0.5 * p.eta * lipschitz;
  const double c = p.theta - p.theta_hat;
  p.tau = 2.0 * c / (b + std::sqrt(b * b - 4.0 * p.theta * c));
  p.sigma = 2.0 * p.theta_hat / (p.eta * lipschitz);
  return p;
}

std::vector<std::string> params_violations(const Params& p, double norm_F_y0) {
  std::vector<std::string> out;
  const double theta_max = (1.0 - p.sigma_hat) * (1.0 - 2.0 * p.sigma_hat);
  const double one_minus = 1.0 - p.sigma_hat;
  if (!(p.sigma_hat >= 0.0 && p.sigma_hat < 0.5)) out.emplace_back("sigma_hat in [0,1/2)");
  if (!(p.lipschitz > 0.0)) out.emplace_back("L > 0");
  if (!(p.theta > 0.0 && p.theta < theta_max)) out.emplace_back("0 < theta < (1-sh)(1-2sh)");
  const double th = p.theta * (p.sigma_hat / one_minus + p.theta / (one_minus * one_minus));
  if (std::abs(th - p.theta_hat) > 1e-14 * std::max(1.0, th)) out.emplace_back("theta_hat formula");
  if (!(p.theta_hat > 0.0 && p.theta_hat < p.theta)) out.emplace_back("0 < theta_hat < theta");
  if (!(p.eta > 2.0 * p.theta_hat / p.lipschitz)) out.emplace_back("eta > 2 theta_hat / L");
  const double b = 2.0 * p.theta + 0.5 * p.eta * p.lipschitz;
  if (!((p.theta - p.theta_hat) / b < p.tau && p.tau < 1.0)) out.emplace_back("tau bracket");
  const double q_scale = p.theta * p.tau * p.tau + b * p.tau + p.theta + p.theta_hat;
  if (!(std::abs(p.q(p.tau)) <= 1e-12 * q_scale)) out.emplace_back("q(tau) = 0");
  const double sig = 2.0 * p.theta_hat / (p.eta * p.lipschitz);
  if (std::abs(sig - p.sigma) > 1e-14 * std::max(1.0, sig) || !(p.sigma < 1.0))
    out.emplace_back("sigma = 2 theta_hat/(eta L) < 1");
  if (p.lambda1 > 0.0 && norm_F_y0 > 0.0 &&
      !(p.lambda1 * p.lambda1 * norm_F_y0 <= 2.0 * p.theta / p.lipschitz * (1.0 + 1e-12)))
    out.emplace_back("lambda1^2 ||F(y0)|| <= 2 theta / L");
  return out;
}

void validate_params(const Params& params, double norm_F_y0) {
  const auto bad = params_violations(params, norm_F_y0);
  if (bad.empty()) return;
  std::string msg = "invalid parameter pack:";
  for (const auto& b : bad) msg += " [" + b + "]";
  throw ParameterError(msg);
}

double init_lambda(double norm_F_y0, double theta, double lipschitz) {
  if (!(norm_F_y0 > 0.0)) return 1.0;
  return std::sqrt(2.0 * theta / (lipschitz * norm_F_y0));
}

double log_plus(double t) { return t > 1.0 ? std::log(t) : 0.0; }

std::int64_t budget_pointwise(const Params& p, double d0, double rho) {
  require_budget_inputs(p, d0, rho);
  const double first = 2.0 / (p.tau * p.eta * (1.0 - p.sigma)) * d0 * d0 / rho;
  return saturating_add(ceil_count(first), homotopy_term(p, rho));
}

std::int64_t budget_ergodic(const Params& p, double d0, double rho) {
  require_budget_inputs(p, d0, rho);
  const double s2 = 1.0 - p.sigma * p.sigma;
  const double coef = 2.0 * std::cbrt(4.0) / (p.tau * std::pow(p.eta, 2.0 / 3.0));
  const double t1 = coef / std::cbrt(s2) * std::pow(d0 * d0 / rho, 2.0 / 3.0);
  const double t2 = coef / std::pow(s2, 2.0 / 3.0) * std::pow(d0 * d0 * d0 / rho, 2.0 / 3.0);
  return saturating_add(std::max(ceil_count(t1), ceil_count(t2)), homotopy_term(p, rho));
}

namespace {

std::int64_t closed_form_homotopy(double sh, double L, double lambda1, double rho) {
  const double arg = (1.0 - 2.0 * sh) * (2.5 - 2.0 * sh) / (lambda1 * lambda1 * L * rho);
  return ceil_count((1.0 - sh) * (4.0 / (1.0 - 2.0 * sh)) * log_plus(arg));
}

void require_closed_form_inputs(double sh, double L, double lambda1, double d0, double rho) {
  if (!(sh >= 0.0 && sh < 0.5)) throw ParameterError("sigma_hat must lie in [0, 1/2)");
  if (!(L > 0.0) || !(lambda1 > 0.0) || !(rho > 0.0) || !(d0 >= 0.0))
    throw ParameterError("closed-form budget: need L, lambda1, rho > 0 and d0 >= 0");
}

}  // namespace

std::int64_t budget_pointwise_closed_form(double sh, double L, double lambda1, double d0,
                                          double rho) {
  require_closed_form_inputs(sh, L, lambda1, d0, rho);
  const double k = 4.0 / (1.0 - 2.0 * sh);
  return saturating_add(ceil_count(k * k * L * d0 * d0 / rho),
                        closed_form_homotopy(sh, L, lambda1, rho));
}

std::int64_t budget_ergodic_closed_form(double sh, double L, double lambda1, double d0,
                                        double rho) {
  require_closed_form_inputs(sh, L, lambda1, d0, rho);
  const double denom = std::pow(1.0 - 2.0 * sh, 5.0 / 3.0);
  const double num = std::cbrt(1.0 - sh);
  const double t1 = 16.0 * std::cbrt(4.0 / 3.0) * num / denom * std::pow(L * d0 * d0 / rho, 2.0 / 3.0);
  const double t2 = 32.0 * std::cbrt(2.0 / 9.0) * num / denom * std::pow(L * d0 * d0 * d0 / rho, 2.0 / 3.0);
  return saturating_add(std::max(ceil_count(t1), ceil_count(t2)),
                        closed_form_homotopy(sh, L, lambda1, rho));
}

}  // namespace hipnex
