#include <cmath>

#include <Eigen/LU>

#include "doctest.h"
#include "helpers.hpp"
#include "hipnex/checks.hpp"
#include "hipnex/solver.hpp"

using namespace hipnex;

namespace {

SubproblemOptions exact_options() {
  SubproblemOptions o;
  o.backend = Backend::Direct;
  o.sigma_hat = 0.0;
  return o;
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("1-D identity: SMALL then skips") {
  // F(t) = t, L = 1, sigma_hat = 0, x0 = 1; values frozen from a 50-digit simulation
  const VIProblem prob = testing::linear_problem(Matrix::Identity(1, 1), Vector::Zero(1));
  Evaluator eval(prob);
  Params p = derive_params(0.0, 1.0);
  SolverState s = initial_state(eval, p, testing::vec({1.0}));
  CHECK(p.lambda1 == doctest::Approx(1.0));

  const auto o1 = step(s, eval, p, exact_options());
  REQUIRE_FALSE(o1.terminated);
  CHECK(o1.record.k == 1);
  CHECK_FALSE(o1.record.skipped);
  CHECK(o1.record.step == StepClass::Small);
  CHECK(o1.record.invariant_a == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(std::abs(o1.record.invariant_b) < 1e-15);
  CHECK(s.y(0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(s.x(0) == 1.0);
  CHECK(s.lambda == doctest::Approx(1.1483314773547882771).epsilon(1e-14));

  const double inv_a[] = {0.042583426132260586144, 0.10505317000722136839, 0.19468323890097961737};
  const double next[] = {1.3186651818838306217, 1.5142647364489798082, 1.7388778619127160952};
  for (int i = 0; i < 3; ++i) {
    const auto o = step(s, eval, p, exact_options());
    CHECK(o.record.skipped);
    CHECK(o.record.step == StepClass::Small);
    CHECK(o.record.linear_solves == 0);
    CHECK(o.record.invariant_a == doctest::Approx(inv_a[i]).epsilon(1e-13));
    CHECK(s.lambda == doctest::Approx(next[i]).epsilon(1e-13));
    CHECK(s.x(0) == 1.0);
  }
}

TEST_CASE("1-D identity: LARGE step with overridden theta, eta") {
  const VIProblem prob = testing::linear_problem(Matrix::Identity(1, 1), Vector::Zero(1));
  Evaluator eval(prob);
  Params p = derive_params(0.0, 1.0, 0.1, 0.1);
  SolverState s = initial_state(eval, p, testing::vec({1.0}));
  CHECK(p.lambda1 == doctest::Approx(0.44721359549995795169).epsilon(1e-14));

  auto o = step(s, eval, p, exact_options());
  CHECK(o.record.step == StepClass::Large);
  CHECK(o.record.step_length == doctest::Approx(0.13819660112501052167).epsilon(1e-13));
  CHECK(s.y(0) == doctest::Approx(0.69098300562505256997).epsilon(1e-14));
  CHECK(s.x(0) == doctest::Approx(0.86525036766010178044).epsilon(1e-14));
  CHECK(s.lambda == doctest::Approx(0.25220209558903643726).epsilon(1e-13));

  o = step(s, eval, p, exact_options());
  CHECK(o.record.skipped);
  CHECK(o.record.step == StepClass::Small);
  CHECK(s.lambda == doctest::Approx(0.44721359549995795169).epsilon(1e-13));

  o = step(s, eval, p, exact_options());
  CHECK_FALSE(o.record.skipped);
  CHECK(o.record.step == StepClass::Large);
  CHECK(s.y(0) == doctest::Approx(0.59787329966395891283).epsilon(1e-13));
  CHECK(s.x(0) == doctest::Approx(0.74865819873594130501).epsilon(1e-13));
}

TEST_CASE("F = 0 terminates at once") {
  const VIProblem prob = testing::linear_problem(Matrix::Zero(3, 3), Vector::Zero(3));
  RunOptions opt;
  opt.subproblem = exact_options();
  const RunResult r = run(prob, derive_params(0.0, 1.0), Vector::Ones(3), opt);
  CHECK(r.termination == Termination::ExactSolution);
  CHECK(r.iterations == 0);  // stops inside iteration 1, before any record
  CHECK(r.linear_solves == 0);
  CHECK(r.trace.empty());
}

TEST_CASE("x0 outside C is rejected") {
  VIProblem prob = testing::linear_problem(Matrix::Identity(2, 2), Vector::Zero(2));
  prob.project = [](const Vector& z) -> Vector { return z.cwiseMax(-1.0).cwiseMin(1.0); };
  prob.materialize_jacobian = nullptr;
  RunOptions opt;
  CHECK_THROWS_AS(run(prob, derive_params(0.0, 1.0), testing::vec({3.0, 0.0}), opt), Error);
  CHECK_THROWS_AS(run(prob, derive_params(0.0, 1.0), Vector::Zero(3), opt), DimensionError);
}

TEST_CASE("affine run converges and keeps its invariants") {
  Matrix M(2, 2);
  M << 1.0, 2.0, -2.0, 0.5;
  const VIProblem prob = testing::linear_problem(M, testing::vec({1.0, -1.0}));
  RunOptions opt;
  opt.rho = 1e-9;
  opt.subproblem.backend = Backend::Direct;
  opt.subproblem.sigma_hat = 0.2;
  opt.record_points = true;
  const Params p = derive_params(0.2, 1.0);
  const RunResult r = run(prob, p, testing::vec({3.0, 3.0}), opt);
  REQUIRE(r.succeeded());
  CHECK(r.invariants.breaches == 0);
  CHECK(r.invariants.max_a_excess <= 1e-8);
  CHECK(r.invariants.max_b_excess <= 1e-8);
  CHECK(r.invariants.max_lambda_law_error <= 1e-10);
  const Vector z = M.fullPivLu().solve(-testing::vec({1.0, -1.0}));
  CHECK((r.y_best - z).norm() < 1e-6);
  const auto rep = check_hpe_subsequence(r.trace, r.params);
  CHECK(rep.passed);
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    CHECK(r.trace[i].cum_linear_solves >= r.trace[i - 1].cum_linear_solves);
  }
}

TEST_CASE("fault injection is caught in strict mode only") {
  Matrix M(2, 2);
  M << 1.0, 2.0, -2.0, 0.5;
  const VIProblem prob = testing::linear_problem(M, testing::vec({1.0, -1.0}));
  RunOptions opt;
  opt.subproblem.backend = Backend::Direct;
  opt.fault_at_iteration = 3;
  opt.fault_lambda_scale = 100.0;
  opt.max_iter = 50;
  opt.strict = true;
  CHECK_THROWS_AS(run(prob, derive_params(0.1, 1.0), testing::vec({3.0, 3.0}), opt), InvariantViolation);
  opt.strict = false;
  const RunResult r = run(prob, derive_params(0.1, 1.0), testing::vec({3.0, 3.0}), opt);
  CHECK(r.invariants.breaches > 0);
  CHECK_FALSE(r.invariants.messages.empty());
}

TEST_CASE("corrupted trace fails the subsequence check") {
  Matrix M(2, 2);
  M << 1.0, 2.0, -2.0, 0.5;
  const VIProblem prob = testing::linear_problem(M, testing::vec({1.0, -1.0}));
  RunOptions opt;
  opt.subproblem.backend = Backend::Direct;
  opt.record_points = true;
  opt.rho = 1e-8;
  const RunResult r = run(prob, derive_params(0.1, 1.0), testing::vec({3.0, 3.0}), opt);
  auto trace = r.trace;
  bool corrupted = false;
  for (auto& rec : trace) {
    if (rec.step == StepClass::Large && rec.points) {
      rec.points->x += Vector::Constant(2, 0.5);
      corrupted = true;
      break;
    }
  }
  REQUIRE(corrupted);
  CHECK(check_hpe_subsequence(r.trace, r.params).passed);
  CHECK_FALSE(check_hpe_subsequence(trace, r.params).passed);

  RunOptions bare = opt;
  bare.record_points = false;
  const RunResult nr = run(prob, derive_params(0.1, 1.0), testing::vec({3.0, 3.0}), bare);
  CHECK_THROWS_AS(check_hpe_subsequence(nr.trace, nr.params), ParameterError);
}

TEST_CASE("labels") {
  CHECK(to_string(Termination::Pointwise) == "pointwise");
  IterationRecord rec;
  rec.step = StepClass::Large;
  CHECK(rec.class_label() == "LARGE");
  rec.skipped = true;
  rec.step = StepClass::Small;
  CHECK(rec.class_label() == "SKIP_SMALL");
}

}
