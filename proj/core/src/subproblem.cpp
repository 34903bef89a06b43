#include "hipnex/subproblem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include <Eigen/LU>

#include "hipnex/rng.hpp"

namespace hipnex {

SubproblemInstance SubproblemInstance::make(Evaluator& eval, double lambda, Vector anchor,
                                            Vector center) {
  require_point(anchor, eval.dim(), "subproblem anchor");
  require_point(center, eval.dim(), "subproblem center");
  if (!(lambda > 0.0)) throw ParameterError("subproblem lambda must be positive");
  SubproblemInstance inst;
  inst.lambda = lambda;
  inst.F_anchor = eval.F(anchor);
  inst.anchor = std::move(anchor);
  inst.center = std::move(center);
  return inst;
}

std::string_view to_string(Backend b) {
  switch (b) {
    case Backend::Auto: return "auto";
    case Backend::Direct: return "direct";
    case Backend::Krylov: return "krylov";
    case Backend::Tseng: return "tseng";
  }
  return "unknown";
}

Backend parse_backend(std::string_view name) {
  if (name == "auto") return Backend::Auto;
  if (name == "direct") return Backend::Direct;
  if (name == "krylov") return Backend::Krylov;
  if (name == "tseng") return Backend::Tseng;
  throw ParameterError("unknown backend '" + std::string(name) + "'");
}

Backend select_backend(const VIProblem& problem, const SubproblemOptions& options) {
  if (options.backend != Backend::Auto) return options.backend;
  if (!problem.unconstrained()) return Backend::Tseng;
  if (problem.has_dense_jacobian() && (problem.dim <= options.direct_max_dim || options.sigma_hat == 0.0))
    return Backend::Direct;
  return Backend::Krylov;
}

Vector subproblem_residual(Evaluator& eval, const SubproblemInstance& inst, const Vector& y,
                           const Vector& nu) {
  const Vector lin = inst.F_anchor + eval.jvp(inst.anchor, y - inst.anchor);
  return inst.lambda * (lin + nu) + y - inst.center;
}

namespace {

Vector linear_rhs(const SubproblemInstance& inst) {
  return -(inst.lambda * inst.F_anchor + inst.anchor - inst.center);
}

void require_unconstrained(const Evaluator& eval, std::string_view who) {
  if (!eval.problem().unconstrained()) {
    throw ParameterError(std::string(who) + " requires C to be the whole space; use the tseng back-end");
  }
}

}  // namespace

ApproxSolution solve_direct(Evaluator& eval, const SubproblemInstance& inst) {
  require_unconstrained(eval, "solve_direct");
  if (!eval.problem().has_dense_jacobian()) {
    throw ParameterError("solve_direct requires a materializable Jacobian");
  }
  const int n = eval.dim();
  Matrix system = inst.lambda * eval.jacobian(inst.anchor);
  system.diagonal().array() += 1.0;
  const Vector rhs = linear_rhs(inst);

  const Eigen::PartialPivLU<Matrix> lu(system);
  const Vector step = lu.solve(rhs);
  const Vector residual = system * step - rhs;
  ApproxSolution sol;
  sol.y = inst.anchor + step;
  sol.nu = Vector::Zero(n);
  sol.residual_norm = residual.norm();
  sol.linear_solves = 1;

  const double scale = rhs.norm() + system.norm() * step.norm();
  if (!sol.y.allFinite() || sol.residual_norm > 1e-8 * std::max(scale, 1e-300)) {
    std::ostringstream os;
    os << "direct solve failed: residual " << sol.residual_norm << " at scale " << scale;
    throw SubproblemError(os.str(), inst.anchor, rhs.norm());
  }
  return sol;
}

ApproxSolution solve_krylov(Evaluator& eval, const SubproblemInstance& inst, double sigma_hat,
                            std::int64_t max_inner, int restart) {
  require_unconstrained(eval, "solve_krylov");
  if (!(sigma_hat > 0.0)) {
    throw ParameterError("solve_krylov needs sigma_hat > 0; use solve_direct for exact solves");
  }
  const int n = eval.dim();
  const int m = std::max(1, std::min(restart, n));
  const double lambda = inst.lambda;
  auto apply = [&](const Vector& u) -> Vector { return lambda * eval.jvp(inst.anchor, u) + u; };

  const Vector rhs = linear_rhs(inst);
  ApproxSolution sol;
  sol.nu = Vector::Zero(n);
  sol.linear_solves = 1;

  Vector u = Vector::Zero(n);
  Vector best_u = u;
  double best_res = rhs.norm();
  if (best_res == 0.0) {
    sol.y = inst.anchor;
    return sol;
  }

  Vector r = rhs;
  std::int64_t products = 0;
  Matrix V(n, m + 1);
  Matrix H = Matrix::Zero(m + 1, m);
  Vector cs(m), sn(m), g(m + 1);

  while (true) {
    const double beta = r.norm();
    if (beta <= sigma_hat * u.norm()) {
      sol.y = inst.anchor + u;
      sol.residual_norm = beta;
      sol.inner_iterations = products;
      return sol;
    }
    V.col(0) = r / beta;
    H.setZero();
    g.setZero();
    g(0) = beta;

    Vector u_cycle = u;
    bool restart_now = false;
    for (int j = 0; j < m; ++j) {
      if (products >= max_inner) {
        std::ostringstream os;
        os << "krylov solve exceeded " << max_inner << " matrix-vector products (best residual "
           << best_res << ")";
        throw SubproblemError(os.str(), inst.anchor + best_u, best_res);
      }
      Vector w = apply(V.col(j));
      ++products;
      // Classical Gram-Schmidt with one re-orthogonalization pass.
      for (int pass = 0; pass < 2; ++pass) {
        const Vector h = V.leftCols(j + 1).transpose() * w;
        w.noalias() -= V.leftCols(j + 1) * h;
        H.col(j).head(j + 1) += h;
      }
      const double h_next = w.norm();
      H(j + 1, j) = h_next;

      for (int i = 0; i < j; ++i) {
        const double a = H(i, j), b = H(i + 1, j);
        H(i, j) = cs(i) * a + sn(i) * b;
        H(i + 1, j) = -sn(i) * a + cs(i) * b;
      }
      const double denom = std::hypot(H(j, j), H(j + 1, j));
      cs(j) = denom == 0.0 ? 1.0 : H(j, j) / denom;
      sn(j) = denom == 0.0 ? 0.0 : H(j + 1, j) / denom;
      H(j, j) = denom;
      H(j + 1, j) = 0.0;
      g(j + 1) = -sn(j) * g(j);
      g(j) = cs(j) * g(j);

      const Vector z =
          H.topLeftCorner(j + 1, j + 1).triangularView<Eigen::Upper>().solve(g.head(j + 1));
      u_cycle = u + V.leftCols(j + 1) * z;
      const double estimate = std::abs(g(j + 1));
      if (estimate < best_res) {
        best_res = estimate;
        best_u = u_cycle;
      }

      const bool breakdown = h_next <= 1e-14 * beta;
      if (estimate <= sigma_hat * u_cycle.norm() || breakdown) {
        // Confirm on the true residual; recurrence drift falls back to a restart.
        r = rhs - apply(u_cycle);
        ++products;
        const double true_res = r.norm();
        if (true_res <= sigma_hat * u_cycle.norm()) {
          sol.y = inst.anchor + u_cycle;
          sol.residual_norm = true_res;
          sol.inner_iterations = products;
          return sol;
        }
        restart_now = true;
        break;
      }
      V.col(j + 1) = w / h_next;
    }
    u = u_cycle;
    if (!restart_now) {
      r = rhs - apply(u);
      ++products;
    }
  }
}

double tseng_omega(double step, double lipschitz_k) {
  const double c = 1.0 - step * step * lipschitz_k * lipschitz_k;
  return 2.0 * step * c / (2.0 * step + c);
}

std::int64_t tseng_iteration_bound(double step, double lipschitz_k, double sigma_hat) {
  const double sl = step * lipschitz_k;
  const double omega = tseng_omega(step, lipschitz_k);
  const double first =
      std::log(2.0 * std::min(1.0 / std::sqrt(2.0 * step), 1.0 + 1.0 / std::sqrt(1.0 - sl * sl)));
  const double second = std::log(2.0 / (sigma_hat * step) * std::sqrt((1.0 + sl) / (1.0 - sl)));
  return 1 + static_cast<std::int64_t>(std::ceil(2.0 / omega * std::max(first, second)));
}

TsengConstants tseng_constants(double lambda, double jacobian_norm, double sigma_hat) {
  TsengConstants c;
  c.lipschitz_k = lambda * jacobian_norm + 1.0;
  c.step = 1.0 / (2.0 * c.lipschitz_k);
  c.omega = tseng_omega(c.step, c.lipschitz_k);
  c.j_hat = tseng_iteration_bound(c.step, c.lipschitz_k, sigma_hat);
  return c;
}

TsengIteration::TsengIteration(Evaluator& eval, const SubproblemInstance& inst, double step)
    : eval_(&eval), inst_(&inst), step_(step), y_(inst.anchor) {
  // G(anchor) needs no Jacobian product.
  G_y_ = inst.lambda * inst.F_anchor + inst.anchor - inst.center;
}

Vector TsengIteration::apply_G(const Vector& y) {
  const Vector lin = inst_->F_anchor + eval_->jvp(inst_->anchor, y - inst_->anchor);
  return inst_->lambda * lin + y - inst_->center;
}

double TsengIteration::advance() {
  if (G_y_.size() == 0) G_y_ = apply_G(y_);
  const Vector forward = y_ - step_ * G_y_;
  y_tilde_ = eval_->project(forward);
  nu_ = (forward - y_tilde_) / (inst_->lambda * step_);
  const Vector G_tilde = apply_G(y_tilde_);
  residual_ = (G_tilde + inst_->lambda * nu_).norm();
  y_ = y_tilde_ - step_ * (G_tilde - G_y_);
  G_y_.resize(0);  // recomputed lazily on the next sweep
  ++sweeps_;
  return residual_;
}

ApproxSolution solve_tseng(Evaluator& eval, const SubproblemInstance& inst, double sigma_hat,
                           double safety_factor, int power_iterations) {
  if (!(sigma_hat > 0.0)) throw ParameterError("solve_tseng needs sigma_hat > 0");
  const double jnorm = operator_norm_estimate(eval, inst.anchor, power_iterations);
  const TsengConstants c = tseng_constants(inst.lambda, jnorm, sigma_hat);
  const auto cap = static_cast<std::int64_t>(std::ceil(safety_factor * static_cast<double>(c.j_hat)));

  TsengIteration it(eval, inst, c.step);
  Vector best_y = inst.anchor;
  double best_res = std::numeric_limits<double>::infinity();
  while (it.sweeps() < cap) {
    const double res = it.advance();
    if (res < best_res) {
      best_res = res;
      best_y = it.y_tilde();
    }
    if (res <= sigma_hat * (it.y_tilde() - inst.anchor).norm()) {
      ApproxSolution sol;
      sol.y = it.y_tilde();
      sol.nu = it.nu();
      sol.residual_norm = res;
      sol.inner_iterations = it.sweeps();
      sol.step = c.step;
      sol.iteration_bound = c.j_hat;
      return sol;
    }
  }
  std::ostringstream os;
  os << "tseng exceeded cap " << cap << " (j_hat " << c.j_hat << ", L_k " << c.lipschitz_k
     << ", ||F'|| estimate " << jnorm << "); check L or the Jacobian norm estimate";
  throw SubproblemError(os.str(), best_y, best_res);
}

double operator_norm_estimate(Evaluator& eval, const Vector& anchor, int iters) {
  const VIProblem& p = eval.problem();
  const int n = p.dim;
  iters = std::max(iters, 1);

  Matrix J;
  const bool matrix_free = static_cast<bool>(p.apply_jacobian_transpose);
  auto build_matrix = [&]() {
    if (J.size() != 0) return;
    if (p.has_dense_jacobian()) {
      J = eval.jacobian(anchor);
    } else {
      J.resize(n, n);
      for (int i = 0; i < n; ++i) J.col(i) = eval.jvp(anchor, Vector::Unit(n, i));
    }
  };
  if (!matrix_free) build_matrix();

  Rng rng(0x6e6f726dULL);
  Vector v = rng.normal_vector(n);
  v /= v.norm();
  double est = 0.0;
  double prev = -1.0;
  bool settled = false;
  for (int k = 0; k < iters; ++k) {
    const Vector w = matrix_free && J.size() == 0 ? eval.jvp(anchor, v) : Vector(J * v);
    est = w.norm();
    if (est == 0.0) break;
    Vector back = matrix_free && J.size() == 0 ? eval.jtvp(anchor, w) : Vector(J.transpose() * w);
    const double bn = back.norm();
    if (bn == 0.0) break;
    v = back / bn;
    if (prev >= 0.0 && std::abs(est - prev) <= 1e-4 * est) {
      settled = true;
      break;
    }
    prev = est;
  }
  double result = 1.05 * est;
  if (!settled) {
    build_matrix();
    const double fro = J.norm();
    const double l1 = J.cwiseAbs().colwise().sum().maxCoeff();
    const double linf = J.cwiseAbs().rowwise().sum().maxCoeff();
    const double upper = std::min(fro, std::sqrt(l1 * linf));
    result = std::max(est, upper);
  }
  return result;
}

ApproxSolution solve_subproblem(Evaluator& eval, const SubproblemInstance& inst,
                                const SubproblemOptions& options) {
  switch (select_backend(eval.problem(), options)) {
    case Backend::Direct: return solve_direct(eval, inst);
    case Backend::Krylov: return solve_krylov(eval, inst, options.sigma_hat, options.max_inner, options.restart);
    case Backend::Tseng:
      return solve_tseng(eval, inst, options.sigma_hat, options.safety_factor, options.power_iterations);
    case Backend::Auto: break;
  }
  throw ParameterError("unresolved backend");
}

}  // namespace hipnex
