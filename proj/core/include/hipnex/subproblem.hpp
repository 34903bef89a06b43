#pragma once

#include <cstdint>
#include <string_view>

#include "hipnex/core.hpp"

namespace hipnex {

/// The linearized proximal inclusion
///   0 in lambda (F_anchor(y) + N_C(y)) + y - center,
/// with F(anchor) cached because every back-end needs it.
struct SubproblemInstance {
  double lambda = 1.0;
  Vector anchor;
  Vector center;
  Vector F_anchor;

  /// Builds an instance, evaluating F(anchor) through `eval`.
  static SubproblemInstance make(Evaluator& eval, double lambda, Vector anchor, Vector center);
};

/// An inexact answer (y, nu) with its certificate residual
/// ||lambda (F_anchor(y) + nu) + y - center||.
struct ApproxSolution {
  Vector y;
  Vector nu;
  double residual_norm = 0.0;
  std::int64_t inner_iterations = 0;
  std::int64_t linear_solves = 0;
  // Tseng only: the step size used and the worst-case sweep count j_hat.
  double step = 0.0;
  std::int64_t iteration_bound = 0;
};

enum class Backend { Auto, Direct, Krylov, Tseng };

std::string_view to_string(Backend b);
/// Parses "auto", "direct", "krylov" or "tseng"; throws ParameterError otherwise.
Backend parse_backend(std::string_view name);

struct SubproblemOptions {
  Backend backend = Backend::Auto;
  double sigma_hat = 0.25;
  /// Krylov: cap on matrix-vector products per solve.
  std::int64_t max_inner = 20000;
  /// Krylov: GMRES restart length.
  int restart = 100;
  /// Tseng: hard cap is safety_factor * j_hat.
  double safety_factor = 2.0;
  int power_iterations = 40;
  /// Auto picks Direct up to this dimension (dense Jacobian, C = whole space).
  int direct_max_dim = 500;
};

/// Resolves Backend::Auto for a given problem.
Backend select_backend(const VIProblem& problem, const SubproblemOptions& options);

/// e = lambda (F_anchor(y) + nu) + y - center, recomputed from scratch
/// with one Jacobian-vector product.
Vector subproblem_residual(Evaluator& eval, const SubproblemInstance& inst, const Vector& y,
                           const Vector& nu);

/// Exact solve of (lambda F'(anchor) + I)(y - anchor) = -(lambda F(anchor) + anchor - center)
/// by LU factorization. Requires C = whole space and a dense Jacobian.
ApproxSolution solve_direct(Evaluator& eval, const SubproblemInstance& inst);

/// Restarted GMRES on the same system, started at y = anchor, stopping as soon
/// as ||residual|| <= sigma_hat ||y - anchor|| for the current iterate.
/// Throws SubproblemError (carrying the best iterate) after `max_inner` products.
ApproxSolution solve_krylov(Evaluator& eval, const SubproblemInstance& inst, double sigma_hat,
                            std::int64_t max_inner, int restart = 100);

/// Step-size constants of Tseng's forward-backward method on G(y) =
/// lambda F_anchor(y) + y - center, which is L_k-Lipschitz and 1-strongly monotone.
struct TsengConstants {
  double lipschitz_k = 1.0;  // L_k = lambda ||F'(anchor)|| + 1
  double step = 0.5;         // s_k = 1 / (2 L_k)
  double omega = 0.0;        // linear rate constant
  std::int64_t j_hat = 1;    // worst-case iterations to a sigma_hat-approximate solution
};

/// omega = 2 s (1 - s^2 L^2) / (2 s + 1 - s^2 L^2).
double tseng_omega(double step, double lipschitz_k);

/// j_hat = 1 + ceil((2/omega) max{log(2 min{1/sqrt(2s), 1 + 1/sqrt(1 - s^2 L^2)}),
///                               log((2/(sigma_hat s)) sqrt((1 + sL)/(1 - sL)))}).
std::int64_t tseng_iteration_bound(double step, double lipschitz_k, double sigma_hat);

TsengConstants tseng_constants(double lambda, double jacobian_norm, double sigma_hat);

/// One Tseng forward-backward sweep at a time, exposing the certificate pair
/// (y_tilde, nu) after each sweep.
class TsengIteration {
 public:
  TsengIteration(Evaluator& eval, const SubproblemInstance& inst, double step);

  /// Performs one sweep and returns the residual of the new certificate pair.
  double advance();

  const Vector& y_tilde() const { return y_tilde_; }
  const Vector& nu() const { return nu_; }
  const Vector& y() const { return y_; }
  double residual_norm() const { return residual_; }
  std::int64_t sweeps() const { return sweeps_; }

 private:
  Vector apply_G(const Vector& y);

  Evaluator* eval_;
  const SubproblemInstance* inst_;
  double step_;
  Vector y_;
  Vector G_y_;
  Vector y_tilde_;
  Vector nu_;
  double residual_ = 0.0;
  std::int64_t sweeps_ = 0;
};

/// Tseng's method from y = anchor with s = 1/(2 L_k); returns the first
/// (y_tilde, nu) satisfying the sigma_hat criterion. Throws SubproblemError
/// past safety_factor * j_hat sweeps.
ApproxSolution solve_tseng(Evaluator& eval, const SubproblemInstance& inst, double sigma_hat,
                           double safety_factor = 2.0, int power_iterations = 40);

/// Upper estimate of ||F'(anchor)||_2 from power iteration on J^T J,
/// inflated by 1.05. Falls back to min(||J||_F, sqrt(||J||_1 ||J||_inf))
/// when the iteration has not settled.
double operator_norm_estimate(Evaluator& eval, const Vector& anchor, int iters);

/// Dispatches to the configured back-end.
ApproxSolution solve_subproblem(Evaluator& eval, const SubproblemInstance& inst,
                                const SubproblemOptions& options);

}  // namespace hipnex
