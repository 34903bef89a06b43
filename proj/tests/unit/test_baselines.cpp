#include <memory>

#include "doctest.h"
#include "helpers.hpp"
#include "hipnex/baselines.hpp"
#include "hipnex/problems.hpp"

using namespace hipnex;

TEST_SUITE("baselines") {

TEST_CASE("HPE driver with exact resolvent keeps its bounds") {
  const auto ap = gen_affine({10, 1});
  auto solves = std::make_shared<std::int64_t>(0);
  const double eta = 1.0;
  auto oracle = exact_resolvent_oracle(ap.M, ap.q, eta, 1.0, solves);
  const Vector x0 = Vector::Ones(10);
  const double d0 = (x0 - *ap.problem.known_solution).norm();
  const auto res = hpe_run(ap.problem, oracle, 0.05, 0.0, eta, x0, 100, d0);
  CHECK(res.trace.size() == 100);
  CHECK(*solves >= 100);
  REQUIRE(res.bounds);
  CHECK(res.bounds->passed);
  CHECK(res.bounds->pointwise_ratio <= 1.0);
  for (const auto& r : res.trace) {
    CHECK(r.relative_error <= 1e-8);
    CHECK(r.step_length >= eta * (1.0 - 1e-12));
  }
}

TEST_CASE("HPE driver edge cases") {
  const auto ap = gen_affine({4, 2});
  auto oracle = exact_resolvent_oracle(ap.M, ap.q, 1.0);
  const auto empty = hpe_run(ap.problem, oracle, 0.1, 0.0, 1.0, Vector::Zero(4), 0);
  CHECK(empty.trace.empty());
  CHECK_FALSE(empty.ergodic.has_value());
  CHECK_THROWS_AS(hpe_run(ap.problem, oracle, 1.5, 0.0, 1.0, Vector::Zero(4), 5), ParameterError);
  CHECK_THROWS_AS(hpe_run(ap.problem, oracle, 0.1, 1.0, 1.0, Vector::Zero(4), 5), ParameterError);

  HpeOracle lazy = [](const Vector& x) { return HpeStep{1.0, x, Vector::Zero(x.size())}; };
  CHECK_THROWS_AS(hpe_run(ap.problem, lazy, 0.1, 0.0, 1.0, Vector::Ones(4), 3), OracleError);
}

TEST_CASE("NPE config validation") {
  NpeConfig c;
  CHECK_NOTHROW(validate_npe_config(c));
  c.sigma_l = 0.6;
  CHECK_THROWS_AS(validate_npe_config(c), ParameterError);
}

TEST_CASE("NPE solves a small cubic problem") {
  const auto cm = gen_cubic_minmax({10, 0, 1e-2, 5.0});
  SubproblemOptions o;
  o.backend = Backend::Direct;
  o.sigma_hat = 0.25;
  Vector x0 = Vector::Ones(20);
  const RunResult r = npe_run(cm.problem, NpeConfig{}, x0, 1e-8, 500, o);
  REQUIRE(r.succeeded());
  CHECK(r.method == "npe");
  Vector z(20);
  z << cm.x_star, cm.y_star;
  CHECK((r.y_best - z).norm() < 1e-4);
  for (const auto& rec : r.trace) CHECK(rec.probes >= 1);
}

}
