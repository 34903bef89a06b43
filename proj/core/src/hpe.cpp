#include "hipnex/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <sstream>

#include <Eigen/LU>

namespace hipnex {

HpeResult hpe_run(const VIProblem& problem, const HpeOracle& oracle, double tau, double sigma,
                  double eta, const Vector& x0, int N, std::optional<double> d0, Tolerance tol,
                  double stop_rho) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  if (!(tau > 0.0 && tau < 1.0)) throw ParameterError("hpe_run: tau must lie in (0, 1)");
  if (!(sigma >= 0.0 && sigma < 1.0)) throw ParameterError("hpe_run: sigma must lie in [0, 1)");
  if (!(eta > 0.0)) throw ParameterError("hpe_run: eta must be positive");
  require_point(x0, problem.dim, "hpe_run x0");

  HpeResult result;
  result.x_final = x0;
  if (d0) result.bounds = HpeBoundReport{};
  const RateBounds bounds{tau, eta, sigma};
  ErgodicAccumulator ergodic;
  double min_res = 1e300;
  if (result.bounds) result.bounds->min_eps_margin = 1e300;

  Vector x = x0;
  for (int k = 1; k <= N; ++k) {
    HpeStep s = oracle(x);
    require_point(s.y, problem.dim, "hpe oracle y");
    require_point(s.nu, problem.dim, "hpe oracle nu");
    const Vector w = problem.F(s.y) + s.nu;
    const Vector d = s.y - x;
    const double dn = d.norm();
    const double err = (s.lambda * w + d).norm();
    // Floating-point cancellation in lambda w + y - x scales with the summands.
    const double scale = s.lambda * w.norm() + s.y.norm() + x.norm();
    if (!(s.lambda > 0.0) || err > sigma * dn + tol.bound(scale)) {
      std::ostringstream os;
      os << "hpe oracle at k=" << k << " violates the relative-error condition: " << err << " > "
         << sigma << " * " << dn;
      throw OracleError(os.str());
    }
    if (s.lambda * dn < eta * (1.0 - tol.rel) - tol.abs) {
      std::ostringstream os;
      os << "hpe oracle at k=" << k << " violates the large-step condition: " << s.lambda * dn
         << " < " << eta;
      throw OracleError(os.str());
    }

    HpeRecord rec;
    rec.k = k;
    rec.lambda = s.lambda;
    rec.residual_norm = w.norm();
    min_res = std::min(min_res, rec.residual_norm);
    rec.min_residual = min_res;
    rec.relative_error = dn > 0.0 ? err / dn : 0.0;
    rec.step_length = s.lambda * dn;
    rec.x_prev = x;
    x -= tau * s.lambda * w;
    rec.x = x;
    rec.y = std::move(s.y);
    rec.w = w;

    ergodic.ingest(rec.lambda, rec.y, rec.w);
    const ErgodicCertificate cert = *ergodic.certificate();
    rec.ergodic_v_norm = cert.v_a.norm();
    rec.ergodic_eps = cert.eps_a;
    rec.ergodic_scale = cert.scale;

    if (result.bounds) {
      HpeBoundReport& b = *result.bounds;
      b.pointwise_ratio = std::max(b.pointwise_ratio, rec.min_residual / bounds.pointwise(*d0, k));
      b.ergodic_v_ratio = std::max(b.ergodic_v_ratio, rec.ergodic_v_norm / bounds.ergodic_v(*d0, k));
      b.ergodic_eps_ratio = std::max(b.ergodic_eps_ratio, rec.ergodic_eps / bounds.ergodic_eps(*d0, k));
      b.min_eps_margin = std::min(b.min_eps_margin, rec.ergodic_eps + 1e-10 * (1.0 + rec.ergodic_scale));
    }
    rec.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();
    const bool hit = stop_rho > 0.0 && rec.residual_norm <= stop_rho;
    result.trace.push_back(std::move(rec));
    if (hit) break;
  }
  result.x_final = x;
  result.ergodic = ergodic.certificate();
  if (result.bounds) {
    HpeBoundReport& b = *result.bounds;
    if (result.trace.empty()) b.min_eps_margin = 0.0;
    b.passed = b.pointwise_ratio <= 1.0 && b.ergodic_v_ratio <= 1.0 && b.ergodic_eps_ratio <= 1.0 &&
               b.min_eps_margin >= 0.0;
  }
  return result;
}

HpeOracle exact_resolvent_oracle(Matrix M, Vector q, double eta, double lambda0,
                                 std::shared_ptr<std::int64_t> solves) {
  if (!(lambda0 > 0.0)) throw ParameterError("exact_resolvent_oracle: lambda0 must be positive");
  struct State {
    Matrix M;
    Vector q;
    double eta;
    double lambda;
  };
  auto st = std::make_shared<State>(State{std::move(M), std::move(q), eta, lambda0});
  return [st, solves](const Vector& x) -> HpeStep {
    const auto n = st->M.rows();
    for (int doubling = 0; doubling < 200; ++doubling) {
      Matrix system = st->lambda * st->M;
      system.diagonal().array() += 1.0;
      Vector y = system.partialPivLu().solve(x - st->lambda * st->q);
      if (solves) ++*solves;
      if (st->lambda * (y - x).norm() >= st->eta) return HpeStep{st->lambda, std::move(y), Vector::Zero(n)};
      st->lambda *= 2.0;
    }
    throw OracleError("exact_resolvent_oracle: no lambda reaches the large-step threshold");
  };
}

}  // namespace hipnex
