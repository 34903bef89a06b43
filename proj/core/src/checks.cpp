#include "hipnex/checks.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hipnex/rng.hpp"

namespace hipnex {

double RateBounds::pointwise(double d0, int k) const {
  return d0 * d0 / (tau * eta * (1.0 - sigma) * k);
}

double RateBounds::ergodic_v(double d0, int k) const {
  return 2.0 * d0 * d0 / (std::pow(tau, 1.5) * eta * std::sqrt(1.0 - sigma * sigma) * std::pow(k, 1.5));
}

double RateBounds::ergodic_eps(double d0, int k) const {
  return 2.0 * d0 * d0 * d0 / (std::pow(tau, 1.5) * eta * (1.0 - sigma * sigma) * std::pow(k, 1.5));
}

std::string HpeSubsequenceReport::summary() const {
  std::ostringstream os;
  os << "large steps " << large_steps << ", relative-error " << relative_error << ", large-step "
     << large_step << ", extragradient " << extragradient << ", frozen-x " << frozen_x;
  return os.str();
}

HpeSubsequenceReport check_hpe_subsequence(const std::vector<IterationRecord>& trace,
                                           const Params& params, double rel_tol) {
  HpeSubsequenceReport r;
  if (trace.empty()) return r;
  if (!trace.front().points) throw ParameterError("check_hpe_subsequence needs a trace with points");

  r.relative_error = r.large_step = r.extragradient = r.frozen_x = -1e300;
  Vector x_anchor = trace.front().points->x_prev;  // x_{i_0} = x_0
  for (const auto& rec : trace) {
    if (!rec.points) throw ParameterError("check_hpe_subsequence needs a trace with points");
    const IteratePoints& pt = *rec.points;
    if (rec.step != StepClass::Large) continue;
    ++r.large_steps;
    const double scale = 1.0 + x_anchor.norm();
    r.frozen_x = std::max(r.frozen_x, (pt.x_prev - x_anchor).norm() / scale);

    const Vector d = pt.y - x_anchor;
    const double lhs = (rec.lambda * pt.w + d).norm();
    const double rhs = params.sigma * d.norm();
    r.relative_error = std::max(r.relative_error, (lhs - rhs) / (1.0 + rhs));
    r.large_step = std::max(r.large_step, (params.eta - rec.lambda * d.norm()) / params.eta);
    const Vector expected = x_anchor - params.tau * rec.lambda * pt.w;
    r.extragradient = std::max(r.extragradient, (pt.x - expected).norm() / (1.0 + expected.norm()));
    x_anchor = pt.x;
  }
  if (r.large_steps == 0) {
    r.relative_error = r.large_step = r.extragradient = r.frozen_x = 0.0;
    return r;
  }
  r.passed = r.relative_error <= rel_tol && r.large_step <= rel_tol && r.extragradient <= rel_tol &&
             r.frozen_x <= rel_tol;
  return r;
}

std::string RateBoundReport::summary() const {
  std::ostringstream os;
  os << "large steps " << large_steps << ", max ratios: pointwise " << pointwise_ratio << ", ||v_a|| "
     << ergodic_v_ratio << ", eps_a " << ergodic_eps_ratio << "; min eps margin " << min_eps_margin;
  return os.str();
}

RateBoundReport check_rate_bounds(const std::vector<IterationRecord>& trace, const Params& params,
                                  double d0) {
  RateBoundReport r;
  const RateBounds b = RateBounds::from(params);
  r.min_eps_margin = 1e300;
  for (const auto& rec : trace) {
    if (rec.step != StepClass::Large) continue;
    const int k = rec.large_count;
    ++r.large_steps;
    r.pointwise_ratio = std::max(r.pointwise_ratio, rec.min_large_residual / b.pointwise(d0, k));
    r.ergodic_v_ratio = std::max(r.ergodic_v_ratio, rec.ergodic_v_norm / b.ergodic_v(d0, k));
    r.ergodic_eps_ratio = std::max(r.ergodic_eps_ratio, rec.ergodic_eps / b.ergodic_eps(d0, k));
    r.min_eps_margin = std::min(r.min_eps_margin, rec.ergodic_eps + 1e-10 * (1.0 + rec.ergodic_scale));
  }
  if (r.large_steps == 0) r.min_eps_margin = 0.0;
  r.passed = r.pointwise_ratio <= 1.0 && r.ergodic_v_ratio <= 1.0 && r.ergodic_eps_ratio <= 1.0 &&
             r.min_eps_margin >= 0.0;
  return r;
}

double sample_enlargement_margin(const VIProblem& problem, const ErgodicCertificate& cert,
                                 int samples, std::uint64_t seed, double radius) {
  Rng rng(seed);
  double worst = 1e300;
  for (int s = 0; s < samples; ++s) {
    const Vector p = cert.y_a + radius * rng.normal_vector(problem.dim);
    const Vector z = problem.projected(p);
    const Vector u = p - z;  // in N_C(z)
    const double lhs = (cert.v_a - problem.F(z) - u).dot(cert.y_a - z);
    const double tol = 1e-9 * (1.0 + cert.v_a.norm() * cert.y_a.norm());
    worst = std::min(worst, lhs + cert.eps_a + tol);
  }
  return samples > 0 ? worst : 0.0;
}

}  // namespace hipnex
