#pragma once

#include <cstdint>
#include <optional>

#include "hipnex/core.hpp"

namespace hipnex {

/// Haar-distributed orthogonal matrix: QR of an i.i.d. Gaussian matrix with
/// the signs of diag(R) absorbed into Q.
Matrix random_orthogonal(int n, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Cubic-regularized bilinear min-max:
//   min_x max_y (L/6)||x||^3 + y^T (A x - b)
// as the VI with F(x, y) = ((L/2)||x|| x + A^T y; b - A x) over R^{2n}.

struct CubicMinMaxSpec {
  int n = 50;
  std::uint64_t seed = 0;
  double L = 1e-3;
  double cond = 20.0;
};

struct CubicMinMax {
  VIProblem problem;
  Matrix A;
  Vector b;
  Vector x_star;
  Vector y_star;
  double L = 0.0;
};

/// A = U S V^T with U, V random orthogonal and s_i = cond^{-(i-1)/(n-1)},
/// so the condition number is exactly `cond`; b standard normal.
CubicMinMax gen_cubic_minmax(const CubicMinMaxSpec& spec);

/// Builds the problem for a given square invertible A. The solution is
/// x* = A^{-1} b, y* = -(L/2)||x*|| A^{-T} x*.
CubicMinMax make_cubic_minmax(Matrix A, Vector b, double L);

// ---------------------------------------------------------------------------
// Affine monotone F(z) = M z + q on the whole space.

struct AffineSpec {
  int n = 20;
  std::uint64_t seed = 0;
  /// Constant reported as the Lipschitz constant of F' (any positive value
  /// is valid since F' is constant).
  double L = 1.0;
  double skew_scale = 1.0;
};

struct AffineProblem {
  VIProblem problem;
  Matrix M;
  Vector q;
};

/// M = S + K with S = B^T B / n and K skew; a random z* is planted through q = -M z*.
AffineProblem gen_affine(const AffineSpec& spec);

/// Throws ParameterError if M is not monotone (symmetric part has a negative
/// eigenvalue). known_solution is set when M is invertible.
AffineProblem make_affine(Matrix M, Vector q, double L = 1.0);

// ---------------------------------------------------------------------------
// Box-constrained VI with F(z) = M z + L g(z) + q, g_i(z) = z_i |z_i| / 2.
// F' = M + L diag(|z|) is L-Lipschitz.

struct BoxSpec {
  int n = 20;
  std::uint64_t seed = 0;
  double L = 1.0;
  double lo = -1.0;
  double hi = 1.0;
  /// Fraction of coordinates of z* placed on a bound.
  double active_fraction = 0.3;
};

struct BoxProblem {
  VIProblem problem;
  Matrix M;
  Vector q;
  Vector lo;
  Vector hi;
  Vector z_star;
  Vector nu_star;
  double L = 0.0;
};

BoxProblem gen_box(const BoxSpec& spec);

/// Plants (z*, nu*) with nu* in N_C(z*) by setting q = -nu* - M z* - L g(z*).
/// Throws ParameterError if z* is outside the box or nu* has the wrong sign pattern.
BoxProblem make_box(Matrix M, double L, Vector lo, Vector hi, Vector z_star, Vector nu_star);

}  // namespace hipnex
