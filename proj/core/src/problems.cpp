#include "hipnex/problems.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>

#include "hipnex/rng.hpp"

namespace hipnex {

Matrix random_orthogonal(int n, std::uint64_t seed) {
  if (n < 1) throw DimensionError("random_orthogonal: n must be positive");
  Rng rng(seed);
  const Matrix G = rng.normal_matrix(n, n);
  Eigen::HouseholderQR<Matrix> qr(G);
  Matrix Q = qr.householderQ();
  const Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    if (R(j, j) < 0.0) Q.col(j) = -Q.col(j);
  }
  return Q;
}

namespace {

struct CubicData {
  Matrix A;
  double L;
  int n;
};

Matrix cubic_hessian(const CubicData& d, const Eigen::Ref<const Vector>& x) {
  const double nx = x.norm();
  if (nx == 0.0) return Matrix::Zero(d.n, d.n);
  Matrix H = (0.5 * d.L / nx) * (x * x.transpose());
  H.diagonal().array() += 0.5 * d.L * nx;
  return H;
}

Vector cubic_hessian_apply(const CubicData& d, const Eigen::Ref<const Vector>& x,
                           const Eigen::Ref<const Vector>& u) {
  const double nx = x.norm();
  if (nx == 0.0) return Vector::Zero(d.n);
  return (0.5 * d.L) * (nx * u + (x.dot(u) / nx) * x);
}

CubicMinMax assemble_cubic(Matrix A, Vector b, double L, Vector x_star, Vector y_star) {
  const int n = static_cast<int>(A.rows());
  auto data = std::make_shared<CubicData>(CubicData{A, L, n});
  auto rhs = std::make_shared<Vector>(b);

  VIProblem p;
  p.dim = 2 * n;
  p.lipschitz = L;
  p.F = [data, rhs](const Vector& z) {
    const int n = data->n;
    const auto x = z.head(n);
    const auto y = z.tail(n);
    Vector out(2 * n);
    out.head(n) = (0.5 * data->L * x.norm()) * x + data->A.transpose() * y;
    out.tail(n) = *rhs - data->A * x;
    return out;
  };
  p.apply_jacobian = [data](const Vector& z, const Vector& d) {
    const int n = data->n;
    Vector out(2 * n);
    out.head(n) = cubic_hessian_apply(*data, z.head(n), d.head(n)) + data->A.transpose() * d.tail(n);
    out.tail(n) = -(data->A * d.head(n));
    return out;
  };
  p.apply_jacobian_transpose = [data](const Vector& z, const Vector& d) {
    const int n = data->n;
    Vector out(2 * n);
    out.head(n) = cubic_hessian_apply(*data, z.head(n), d.head(n)) - data->A.transpose() * d.tail(n);
    out.tail(n) = data->A * d.head(n);
    return out;
  };
  p.materialize_jacobian = [data](const Vector& z) {
    const int n = data->n;
    Matrix J = Matrix::Zero(2 * n, 2 * n);
    J.topLeftCorner(n, n) = cubic_hessian(*data, z.head(n));
    J.topRightCorner(n, n) = data->A.transpose();
    J.bottomLeftCorner(n, n) = -data->A;
    return J;
  };
  Vector sol(2 * n);
  sol << x_star, y_star;
  p.known_solution = sol;

  CubicMinMax out;
  out.problem = std::move(p);
  out.A = std::move(A);
  out.b = std::move(b);
  out.x_star = std::move(x_star);
  out.y_star = std::move(y_star);
  out.L = L;
  return out;
}

}  // namespace

CubicMinMax gen_cubic_minmax(const CubicMinMaxSpec& spec) {
  if (spec.n < 1) throw DimensionError("gen_cubic_minmax: n must be positive");
  if (!(spec.L > 0.0)) throw ParameterError("gen_cubic_minmax: L must be positive");
  if (!(spec.cond >= 1.0)) throw ParameterError("gen_cubic_minmax: cond must be >= 1");
  const int n = spec.n;
  const Matrix U = random_orthogonal(n, derive_seed(spec.seed, 1));
  const Matrix V = random_orthogonal(n, derive_seed(spec.seed, 2));
  Vector s(n);
  for (int i = 0; i < n; ++i) {
    s(i) = n == 1 ? 1.0 : std::pow(spec.cond, -static_cast<double>(i) / (n - 1));
  }
  Rng rng(derive_seed(spec.seed, 3));
  Vector b = rng.normal_vector(n);

  Matrix A = U * s.asDiagonal() * V.transpose();
  // Closed form through the factors: x* = V S^{-1} U^T b, y* = -(L/2)||x*|| U S^{-1} V^T x*.
  const Vector x_star = V * (U.transpose() * b).cwiseQuotient(s);
  const Vector y_star = (-0.5 * spec.L * x_star.norm()) * (U * (V.transpose() * x_star).cwiseQuotient(s));
  return assemble_cubic(std::move(A), std::move(b), spec.L, x_star, y_star);
}

CubicMinMax make_cubic_minmax(Matrix A, Vector b, double L) {
  if (A.rows() != A.cols() || A.rows() < 1 || b.size() != A.rows()) {
    throw DimensionError("make_cubic_minmax: A must be square and match b");
  }
  if (!(L > 0.0)) throw ParameterError("make_cubic_minmax: L must be positive");
  Eigen::FullPivLU<Matrix> lu(A);
  if (!lu.isInvertible()) throw ParameterError("make_cubic_minmax: A must be invertible");
  const Vector x_star = lu.solve(b);
  const Vector y_star = (-0.5 * L * x_star.norm()) * A.transpose().fullPivLu().solve(x_star);
  return assemble_cubic(std::move(A), std::move(b), L, x_star, y_star);
}

namespace {

void require_monotone(const Matrix& M, const char* who) {
  const Matrix S = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(S, Eigen::EigenvaluesOnly);
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  if (es.eigenvalues().minCoeff() < -1e-12 * scale * M.rows()) {
    throw ParameterError(std::string(who) + ": M is not monotone");
  }
}

Matrix random_monotone(int n, Rng& rng, double skew_scale) {
  const Matrix B = rng.normal_matrix(n, n);
  const Matrix C = rng.normal_matrix(n, n);
  Matrix S = B.transpose() * B / n;
  Matrix K = (skew_scale / (2.0 * std::sqrt(static_cast<double>(n)))) * (C - C.transpose());
  return S + K;
}

}  // namespace

AffineProblem make_affine(Matrix M, Vector q, double L) {
  if (M.rows() != M.cols() || M.rows() < 1 || q.size() != M.rows()) {
    throw DimensionError("make_affine: M must be square and match q");
  }
  if (!(L > 0.0)) throw ParameterError("make_affine: L must be positive");
  require_monotone(M, "make_affine");
  auto Mp = std::make_shared<const Matrix>(M);
  auto qp = std::make_shared<const Vector>(q);

  VIProblem p;
  p.dim = static_cast<int>(M.rows());
  p.lipschitz = L;
  p.F = [Mp, qp](const Vector& z) -> Vector { return *Mp * z + *qp; };
  p.apply_jacobian = [Mp](const Vector&, const Vector& d) -> Vector { return *Mp * d; };
  p.apply_jacobian_transpose = [Mp](const Vector&, const Vector& d) -> Vector {
    return Mp->transpose() * d;
  };
  p.materialize_jacobian = [Mp](const Vector&) { return *Mp; };
  Eigen::FullPivLU<Matrix> lu(M);
  if (lu.isInvertible()) p.known_solution = Vector(lu.solve(-q));

  return AffineProblem{std::move(p), std::move(M), std::move(q)};
}

AffineProblem gen_affine(const AffineSpec& spec) {
  if (spec.n < 1) throw DimensionError("gen_affine: n must be positive");
  Rng rng(derive_seed(spec.seed, 11));
  Matrix M = random_monotone(spec.n, rng, spec.skew_scale);
  const Vector z_star = rng.normal_vector(spec.n);
  Vector q = -(M * z_star);
  AffineProblem out = make_affine(std::move(M), std::move(q), spec.L);
  // The planted point is a solution whether or not M is invertible.
  out.problem.known_solution = z_star;
  return out;
}

BoxProblem make_box(Matrix M, double L, Vector lo, Vector hi, Vector z_star, Vector nu_star) {
  const auto n = M.rows();
  if (M.cols() != n || n < 1 || lo.size() != n || hi.size() != n || z_star.size() != n ||
      nu_star.size() != n) {
    throw DimensionError("make_box: inconsistent dimensions");
  }
  if (!(L > 0.0)) throw ParameterError("make_box: L must be positive");
  require_monotone(M, "make_box");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(lo(i) <= hi(i))) throw ParameterError("make_box: lo must not exceed hi");
    if (z_star(i) < lo(i) || z_star(i) > hi(i)) throw ParameterError("make_box: z* outside the box");
    const bool at_lo = z_star(i) == lo(i);
    const bool at_hi = z_star(i) == hi(i);
    const double v = nu_star(i);
    const bool ok = (at_lo && at_hi) || (at_hi && v >= 0.0) || (at_lo && v <= 0.0) || v == 0.0;
    if (!ok) throw ParameterError("make_box: nu* is not in the normal cone at z*");
  }
  const Vector g_star = 0.5 * z_star.cwiseProduct(z_star.cwiseAbs());
  Vector q = -nu_star - M * z_star - L * g_star;

  auto Mp = std::make_shared<const Matrix>(M);
  auto qp = std::make_shared<const Vector>(q);
  auto lop = std::make_shared<const Vector>(lo);
  auto hip = std::make_shared<const Vector>(hi);

  VIProblem p;
  p.dim = static_cast<int>(n);
  p.lipschitz = L;
  p.F = [Mp, qp, L](const Vector& z) -> Vector {
    return *Mp * z + (0.5 * L) * z.cwiseProduct(z.cwiseAbs()) + *qp;
  };
  p.apply_jacobian = [Mp, L](const Vector& z, const Vector& d) -> Vector {
    return *Mp * d + L * z.cwiseAbs().cwiseProduct(d);
  };
  p.apply_jacobian_transpose = [Mp, L](const Vector& z, const Vector& d) -> Vector {
    return Mp->transpose() * d + L * z.cwiseAbs().cwiseProduct(d);
  };
  p.materialize_jacobian = [Mp, L](const Vector& z) -> Matrix {
    Matrix J = *Mp;
    J.diagonal() += L * z.cwiseAbs();
    return J;
  };
  p.project = [lop, hip](const Vector& z) -> Vector { return z.cwiseMax(*lop).cwiseMin(*hip); };
  p.known_solution = z_star;

  BoxProblem out;
  out.problem = std::move(p);
  out.M = std::move(M);
  out.q = std::move(q);
  out.lo = std::move(lo);
  out.hi = std::move(hi);
  out.z_star = std::move(z_star);
  out.nu_star = std::move(nu_star);
  out.L = L;
  return out;
}

BoxProblem gen_box(const BoxSpec& spec) {
  if (spec.n < 1) throw DimensionError("gen_box: n must be positive");
  if (!(spec.lo < spec.hi)) throw ParameterError("gen_box: need lo < hi");
  if (!(spec.active_fraction >= 0.0 && spec.active_fraction <= 1.0)) {
    throw ParameterError("gen_box: active_fraction must lie in [0, 1]");
  }
  const int n = spec.n;
  Rng rng(derive_seed(spec.seed, 21));
  Matrix M = random_monotone(n, rng, 1.0);
  Vector lo = Vector::Constant(n, spec.lo);
  Vector hi = Vector::Constant(n, spec.hi);
  Vector z(n);
  Vector nu = Vector::Zero(n);
  const double width = spec.hi - spec.lo;
  for (int i = 0; i < n; ++i) {
    if (rng.uniform() < spec.active_fraction) {
      const bool upper = rng.uniform() < 0.5;
      z(i) = upper ? spec.hi : spec.lo;
      const double mag = rng.uniform(0.5, 1.5);
      nu(i) = upper ? mag : -mag;
    } else {
      z(i) = rng.uniform(spec.lo + 0.1 * width, spec.hi - 0.1 * width);
    }
  }
  return make_box(std::move(M), spec.L, std::move(lo), std::move(hi), std::move(z), std::move(nu));
}

}  // namespace hipnex
