#include "hipnex/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hipnex/rng.hpp"

namespace hipnex {

void require_point(const Vector& v, int n, std::string_view what) {
  if (v.size() != n) {
    throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(n) +
                         ", got " + std::to_string(v.size()));
  }
  if (!v.allFinite()) {
    throw DimensionError(std::string(what) + ": non-finite entry");
  }
}

Vector Evaluator::F(const Vector& x) {
  ++counts_.f_evals;
  return problem_->F(x);
}

Vector Evaluator::jvp(const Vector& anchor, const Vector& direction) {
  ++counts_.jvp;
  return problem_->apply_jacobian(anchor, direction);
}

Vector Evaluator::jtvp(const Vector& anchor, const Vector& direction) {
  ++counts_.jvp;
  return problem_->apply_jacobian_transpose(anchor, direction);
}

Matrix Evaluator::jacobian(const Vector& anchor) {
  ++counts_.materializations;
  return problem_->materialize_jacobian(anchor);
}

Vector eval_linearization(const VIProblem& problem, const Vector& anchor, const Vector& x) {
  require_point(anchor, problem.dim, "eval_linearization anchor");
  require_point(x, problem.dim, "eval_linearization x");
  return problem.F(anchor) + problem.apply_jacobian(anchor, x - anchor);
}

double linearization_error(const VIProblem& problem, const Vector& anchor, const Vector& x) {
  return (problem.F(x) - eval_linearization(problem, anchor, x)).norm();
}

bool check_normal_cone(const VIProblem& problem, const Vector& y, const Vector& nu, double tol) {
  if (y.size() != problem.dim || nu.size() != problem.dim) return false;
  if (problem.unconstrained()) return nu.norm() <= tol;
  return (problem.projected(y + nu) - y).norm() <= tol;
}

ProblemCheckReport sample_problem_checks(const VIProblem& problem, int samples,
                                         std::uint64_t seed, double radius) {
  Rng rng(seed);
  const int n = problem.dim;
  const double L = problem.lipschitz;
  const Tolerance tol;
  constexpr double kInf = std::numeric_limits<double>::infinity();

  ProblemCheckReport report;
  report.samples = samples;
  report.monotonicity_margin = kInf;
  report.nonexpansive_margin = kInf;
  report.lipschitz_margin = kInf;

  for (int s = 0; s < samples; ++s) {
    const Vector a = radius * rng.normal_vector(n);
    const Vector b = radius * rng.normal_vector(n);
    const Vector x = problem.projected(a);
    const Vector y = problem.projected(b);

    const Vector Fx = problem.F(x);
    const Vector Fy = problem.F(y);
    const double mono = (Fx - Fy).dot(x - y) + 1e-10 * (1.0 + x.norm() * y.norm());
    report.monotonicity_margin = std::min(report.monotonicity_margin, mono);

    report.idempotence_error =
        std::max(report.idempotence_error, (problem.projected(x) - x).norm());
    const double expand = (a - b).norm() + tol.bound((a - b).norm()) - (x - y).norm();
    report.nonexpansive_margin = std::min(report.nonexpansive_margin, expand);

    // Central differences along a random unit direction.
    Vector d = rng.normal_vector(n);
    d /= d.norm();
    const double h = 1e-5 * std::max(1.0, y.norm());
    const Vector fd = (problem.F(y + h * d) - problem.F(y - h * d)) / (2.0 * h);
    const Vector jd = problem.apply_jacobian(y, d);
    const double fd_err = (fd - jd).norm() / std::max(1.0, jd.norm());
    report.jacobian_fd_error = std::max(report.jacobian_fd_error, fd_err);

    const Vector lin = Fy + problem.apply_jacobian(y, x - y);
    const double gap = 0.5 * L * (x - y).squaredNorm() + tol.bound(Fx.norm()) - (Fx - lin).norm();
    report.lipschitz_margin = std::min(report.lipschitz_margin, gap);
  }
  if (samples == 0) {
    report.monotonicity_margin = report.nonexpansive_margin = report.lipschitz_margin = 0.0;
  }
  return report;
}

}  // namespace hipnex
