#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "hipnex/checks.hpp"
#include "hipnex/ergodic.hpp"
#include "hipnex/rng.hpp"

using namespace hipnex;

namespace {

// eps_a = (1/Lambda) sum lambda_i <y_i - y_a, w_i - v_a>, two passes in long double
long double two_pass_eps(const std::vector<double>& lam, const std::vector<Vector>& y,
                         const std::vector<Vector>& w) {
  const auto n = y[0].size();
  long double Lambda = 0;
  std::vector<long double> ya(static_cast<std::size_t>(n), 0), va(static_cast<std::size_t>(n), 0);
  for (std::size_t i = 0; i < lam.size(); ++i) {
    Lambda += lam[i];
    for (Eigen::Index j = 0; j < n; ++j) {
      ya[static_cast<std::size_t>(j)] += lam[i] * static_cast<long double>(y[i](j));
      va[static_cast<std::size_t>(j)] += lam[i] * static_cast<long double>(w[i](j));
    }
  }
  for (auto& v : ya) v /= Lambda;
  for (auto& v : va) v /= Lambda;
  long double eps = 0;
  for (std::size_t i = 0; i < lam.size(); ++i) {
    long double dot = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      dot += (y[i](j) - ya[static_cast<std::size_t>(j)]) * (w[i](j) - va[static_cast<std::size_t>(j)]);
    }
    eps += lam[i] * dot;
  }
  return eps / Lambda;
}

}  // namespace

TEST_SUITE("ergodic") {

TEST_CASE("empty accumulator") {
  ErgodicAccumulator acc;
  CHECK(acc.empty());
  CHECK_FALSE(acc.certificate().has_value());
}

TEST_CASE("single pair has eps = 0") {
  ErgodicAccumulator acc;
  acc.ingest(2.0, testing::vec({1.0, 2.0}), testing::vec({3.0, -1.0}));
  const auto c = acc.certificate();
  REQUIRE(c);
  CHECK(c->eps_a == 0.0);
  CHECK(c->Lambda == 2.0);
  CHECK(c->v_a(0) == 3.0);
}

TEST_CASE("two equal-weight pairs") {
  const Vector y1 = testing::vec({1.0, 0.0}), y2 = testing::vec({0.0, 2.0});
  const Vector w1 = testing::vec({2.0, 1.0}), w2 = testing::vec({-1.0, 3.0});
  ErgodicAccumulator acc;
  acc.ingest(1.5, y1, w1);
  acc.ingest(1.5, y2, w2);
  const auto c = acc.certificate();
  CHECK(c->eps_a == doctest::Approx(0.25 * (y1 - y2).dot(w1 - w2)).epsilon(1e-15));
  CHECK((c->y_a - (y1 + y2) / 2.0).norm() < 1e-15);
  CHECK(c->count == 2);
}

TEST_CASE("streaming equals two-pass definition") {
  Rng rng(21);
  std::vector<double> lam;
  std::vector<Vector> y, w;
  ErgodicAccumulator acc;
  for (int i = 0; i < 2000; ++i) {
    lam.push_back(rng.uniform(0.1, 10.0));
    y.push_back(rng.normal_vector(6));
    w.push_back(0.5 * y.back() + 0.1 * rng.normal_vector(6));
    acc.ingest(lam.back(), y.back(), w.back());
  }
  const long double ref = two_pass_eps(lam, y, w);
  const double got = acc.certificate()->eps_a;
  CHECK(std::abs(got - static_cast<double>(ref)) <= 1e-10 * std::abs(static_cast<double>(ref)));
}

TEST_CASE("sampled enlargement margin of a monotone linear map") {
  Matrix M(2, 2);
  M << 1.0, 1.0, -1.0, 1.0;
  const VIProblem p = testing::linear_problem(M, Vector::Zero(2));
  ErgodicAccumulator acc;
  Rng rng(4);
  for (int i = 0; i < 30; ++i) {
    const Vector yi = rng.normal_vector(2);
    acc.ingest(rng.uniform(0.5, 2.0), yi, M * yi);
  }
  const auto c = *acc.certificate();
  CHECK(c.eps_a >= 0.0);
  CHECK(sample_enlargement_margin(p, c, 200, 8) >= 0.0);
  ErgodicCertificate bad = c;
  bad.v_a += testing::vec({50.0, 50.0});
  bad.eps_a = 0.0;
  CHECK(sample_enlargement_margin(p, bad, 200, 8) < 0.0);
}

TEST_CASE("rate bounds formulas") {
  const RateBounds b{0.25, 2.0, 0.5};
  CHECK(b.pointwise(1.0, 4) == doctest::Approx(1.0 / (0.25 * 2.0 * 0.5 * 4)));
  CHECK(b.ergodic_v(1.0, 1) == doctest::Approx(2.0 / (0.125 * 2.0 * std::sqrt(0.75))));
  CHECK(b.ergodic_eps(2.0, 1) == doctest::Approx(16.0 / (0.125 * 2.0 * 0.75)));
}

}
