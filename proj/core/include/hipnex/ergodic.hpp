#pragma once

#include <optional>

#include "hipnex/core.hpp"

namespace hipnex {

/// Lambda-weighted averages (y_a, v_a) and the enlargement level eps_a with
/// v_a in (F + N_C)^{eps_a}(y_a).
struct ErgodicCertificate {
  Vector y_a;
  Vector v_a;
  double eps_a = 0.0;
  double Lambda = 0.0;
  /// (1/Lambda) sum lambda_i ||y_i|| ||w_i||; the cancellation scale of eps_a.
  double scale = 0.0;
  int count = 0;
};

/// Streaming accumulator of ergodic certificates.
///
/// eps_a is kept through the identity
///   eps_a = S / Lambda - <y_a - c, v_a - d>,  S = sum lambda_i <y_i - c, w_i - d>,
/// with (c, d) the first ingested pair, which keeps S small near convergence.
/// All sums use Neumaier compensation.
class ErgodicAccumulator {
 public:
  void ingest(double lambda, const Vector& y, const Vector& w);

  bool empty() const { return count_ == 0; }
  int count() const { return count_; }

  /// std::nullopt before the first ingest.
  std::optional<ErgodicCertificate> certificate() const;

 private:
  struct Compensated {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x);
    double value() const { return sum + carry; }
  };
  struct CompensatedVector {
    Vector sum;
    Vector carry;
    void add(const Vector& x);
    Vector value() const { return sum + carry; }
  };

  int count_ = 0;
  Vector shift_y_;
  Vector shift_w_;
  Compensated lambda_sum_;
  Compensated cross_sum_;
  Compensated scale_sum_;
  CompensatedVector y_sum_;
  CompensatedVector w_sum_;
};

}  // namespace hipnex
