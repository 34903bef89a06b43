#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>

#include <Eigen/Core>

#include "hipnex/errors.hpp"

namespace hipnex {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Absolute + relative tolerance pair. `bound(scale)` is abs + rel * scale.
struct Tolerance {
  double abs = 1e-9;
  double rel = 1e-9;

  double bound(double scale) const { return abs + rel * scale; }
};

/// A smooth monotone variational inequality VIP(F, C).
///
/// `F` maps points to points, `apply_jacobian(anchor, d)` returns F'(anchor) d.
/// The feasible set C is given only through `project`; an empty `project`
/// means C is the whole space. `lipschitz` is a Lipschitz constant of F'.
///
/// Instances are immutable after construction; the callables must be pure so
/// a problem can be shared across threads.
struct VIProblem {
  int dim = 0;
  std::function<Vector(const Vector&)> F;
  std::function<Vector(const Vector&, const Vector&)> apply_jacobian;
  /// Optional: F'(anchor)^T d. Used by the operator norm estimate.
  std::function<Vector(const Vector&, const Vector&)> apply_jacobian_transpose;
  /// Optional: dense F'(anchor). Required by the direct subproblem solver.
  std::function<Matrix(const Vector&)> materialize_jacobian;
  std::function<Vector(const Vector&)> project;
  double lipschitz = 1.0;
  std::optional<Vector> known_solution;

  bool unconstrained() const { return !project; }
  bool has_dense_jacobian() const { return static_cast<bool>(materialize_jacobian); }

  /// Orthogonal projection onto C (identity when C is the whole space).
  Vector projected(const Vector& z) const { return project ? project(z) : z; }
};

/// Throws DimensionError if `v` is not of dimension `n` or has a non-finite entry.
void require_point(const Vector& v, int n, std::string_view what);

/// Evaluation counters. "jvp" counts Jacobian-vector products (and their
/// transposes), "materializations" dense Jacobian builds.
struct EvalCounts {
  std::int64_t f_evals = 0;
  std::int64_t jvp = 0;
  std::int64_t materializations = 0;

  std::int64_t jacobian_evals() const { return jvp + materializations; }
};

/// Per-run view of a problem that tallies every oracle call.
///
/// The problem itself stays shared and immutable; each solver run owns one
/// evaluator, so counts never race.
class Evaluator {
 public:
  explicit Evaluator(const VIProblem& problem) : problem_(&problem) {}

  const VIProblem& problem() const { return *problem_; }
  int dim() const { return problem_->dim; }
  const EvalCounts& counts() const { return counts_; }

  Vector F(const Vector& x);
  Vector jvp(const Vector& anchor, const Vector& direction);
  Vector jtvp(const Vector& anchor, const Vector& direction);
  Matrix jacobian(const Vector& anchor);
  Vector project(const Vector& z) const { return problem_->projected(z); }

 private:
  const VIProblem* problem_;
  EvalCounts counts_;
};

/// F_anchor(x) = F(anchor) + F'(anchor)(x - anchor).
Vector eval_linearization(const VIProblem& problem, const Vector& anchor, const Vector& x);

/// ||F(x) - F_anchor(x)||. Bounded by (L/2)||x - anchor||^2 for an L-Lipschitz F'.
double linearization_error(const VIProblem& problem, const Vector& anchor, const Vector& x);

/// nu in N_C(y), tested through the projection fixed point P_C(y + nu) = y.
bool check_normal_cone(const VIProblem& problem, const Vector& y, const Vector& nu,
                       double tol = 1e-9);

/// Worst observed values of the sampled problem sanity checks. Each "worst"
/// is a signed margin; a negative margin means the property failed.
struct ProblemCheckReport {
  int samples = 0;
  double monotonicity_margin = 0.0;  // min <F(x)-F(y),x-y> + tol
  double idempotence_error = 0.0;    // max ||P(P(z)) - P(z)||
  double nonexpansive_margin = 0.0;  // min ||a-b|| + tol - ||P(a)-P(b)||
  double jacobian_fd_error = 0.0;    // max relative finite-difference error
  double lipschitz_margin = 0.0;     // min (L/2)||x-y||^2 + tol - ||F(x)-F_y(x)||

  bool passed() const {
    return monotonicity_margin >= 0.0 && idempotence_error <= 1e-9 &&
           nonexpansive_margin >= 0.0 && jacobian_fd_error <= 1e-4 && lipschitz_margin >= 0.0;
  }
};

/// Samples `samples` random point pairs (standard normal scaled by `radius`,
/// projected onto C) and checks monotonicity, projection idempotence and
/// nonexpansiveness, Jacobian finite-difference consistency and the
/// quadratic linearization bound.
ProblemCheckReport sample_problem_checks(const VIProblem& problem, int samples,
                                         std::uint64_t seed, double radius = 1.0);

}  // namespace hipnex
