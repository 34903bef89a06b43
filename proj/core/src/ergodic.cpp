#include "hipnex/ergodic.hpp"

#include <cmath>

namespace hipnex {

void ErgodicAccumulator::Compensated::add(double x) {
  const double t = sum + x;
  if (std::abs(sum) >= std::abs(x)) {
    carry += (sum - t) + x;
  } else {
    carry += (x - t) + sum;
  }
  sum = t;
}

void ErgodicAccumulator::CompensatedVector::add(const Vector& x) {
  if (sum.size() == 0) {
    sum = Vector::Zero(x.size());
    carry = Vector::Zero(x.size());
  }
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double t = sum[i] + x[i];
    if (std::abs(sum[i]) >= std::abs(x[i])) {
      carry[i] += (sum[i] - t) + x[i];
    } else {
      carry[i] += (x[i] - t) + sum[i];
    }
    sum[i] = t;
  }
}

void ErgodicAccumulator::ingest(double lambda, const Vector& y, const Vector& w) {
  if (count_ == 0) {
    shift_y_ = y;
    shift_w_ = w;
  } else {
    require_point(y, static_cast<int>(shift_y_.size()), "ergodic y");
    require_point(w, static_cast<int>(shift_w_.size()), "ergodic w");
  }
  const Vector dy = y - shift_y_;
  const Vector dw = w - shift_w_;
  lambda_sum_.add(lambda);
  y_sum_.add(lambda * dy);
  w_sum_.add(lambda * dw);
  cross_sum_.add(lambda * dy.dot(dw));
  scale_sum_.add(lambda * y.norm() * w.norm());
  ++count_;
}

std::optional<ErgodicCertificate> ErgodicAccumulator::certificate() const {
  if (count_ == 0) return std::nullopt;
  ErgodicCertificate c;
  c.Lambda = lambda_sum_.value();
  const Vector dy_avg = y_sum_.value() / c.Lambda;
  const Vector dw_avg = w_sum_.value() / c.Lambda;
  c.y_a = shift_y_ + dy_avg;
  c.v_a = shift_w_ + dw_avg;
  c.eps_a = cross_sum_.value() / c.Lambda - dy_avg.dot(dw_avg);
  c.scale = scale_sum_.value() / c.Lambda;
  c.count = count_;
  return c;
}

}  // namespace hipnex
