#pragma once

#include "hipnex/core.hpp"

namespace testing {

// F(z) = M z + q on R^n with a dense Jacobian.
inline hipnex::VIProblem linear_problem(const hipnex::Matrix& M, const hipnex::Vector& q, double L = 1.0) {
  hipnex::VIProblem p;
  p.dim = static_cast<int>(M.rows());
  p.lipschitz = L;
  p.F = [M, q](const hipnex::Vector& z) -> hipnex::Vector { return M * z + q; };
  p.apply_jacobian = [M](const hipnex::Vector&, const hipnex::Vector& d) -> hipnex::Vector { return M * d; };
  p.apply_jacobian_transpose = [M](const hipnex::Vector&, const hipnex::Vector& d) -> hipnex::Vector {
    return M.transpose() * d;
  };
  p.materialize_jacobian = [M](const hipnex::Vector&) { return M; };
  return p;
}

inline hipnex::Vector vec(std::initializer_list<double> v) {
  hipnex::Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace testing
