#include <cmath>

#include <Eigen/SVD>

#include "doctest.h"
#include "helpers.hpp"
#include "hipnex/problems.hpp"
#include "hipnex/rng.hpp"
#include "hipnex/subproblem.hpp"

using namespace hipnex;

TEST_SUITE("subproblem") {

TEST_CASE("Tseng constants, frozen") {
  auto c = tseng_constants(1.0, 1.0, 0.25);
  CHECK(c.lipschitz_k == doctest::Approx(2.0));
  CHECK(c.step == doctest::Approx(0.25));
  CHECK(c.omega == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(c.j_hat == 28);

  c = tseng_constants(10.0, 3.0, 0.1);
  CHECK(c.lipschitz_k == doctest::Approx(31.0));
  CHECK(c.step == doctest::Approx(1.0 / 62.0).epsilon(1e-14));
  CHECK(c.omega == doctest::Approx(0.0309278350515463917).epsilon(1e-13));
  CHECK(c.j_hat == 498);

  c = tseng_constants(0.5, 0.0, 0.4);
  CHECK(c.omega == doctest::Approx(3.0 / 7.0).epsilon(1e-14));
  CHECK(c.j_hat == 15);
}

TEST_CASE("backend names") {
  CHECK(parse_backend("krylov") == Backend::Krylov);
  CHECK(to_string(Backend::Tseng) == "tseng");
  CHECK_THROWS_AS(parse_backend("minres"), ParameterError);
}

TEST_CASE("direct and krylov meet the relative criterion") {
  const auto cm = gen_cubic_minmax({20, 4, 1e-2, 10.0});
  Rng rng(11);
  for (double sh : {0.05, 0.25, 0.45}) {
    Evaluator eval(cm.problem);
    const Vector a = rng.normal_vector(cm.problem.dim);
    const Vector c = rng.normal_vector(cm.problem.dim);
    const auto inst = SubproblemInstance::make(eval, 3.0, a, c);

    const auto d = solve_direct(eval, inst);
    CHECK(d.linear_solves == 1);
    CHECK(subproblem_residual(eval, inst, d.y, d.nu).norm() <= 1e-10 * (1.0 + (d.y - a).norm()));

    const auto k = solve_krylov(eval, inst, sh, 5000);
    const double e = subproblem_residual(eval, inst, k.y, k.nu).norm();
    CHECK(e <= sh * (k.y - a).norm() + 1e-12);
    CHECK(k.nu.isZero());
  }
}

TEST_CASE("krylov gives up with the best iterate") {
  const auto cm = gen_cubic_minmax({20, 4, 1e-2, 10.0});
  Evaluator eval(cm.problem);
  Rng rng(2);
  const auto inst = SubproblemInstance::make(eval, 3.0, rng.normal_vector(40), rng.normal_vector(40));
  try {
    solve_krylov(eval, inst, 1e-12, 2, 2);
    FAIL("expected SubproblemError");
  } catch (const SubproblemError& e) {
    CHECK(e.best_iterate().size() == 40);
    CHECK(e.best_residual() > 0.0);
  }
}

TEST_CASE("tseng on a box problem") {
  const auto bp = gen_box({15, 5, 1.0, -1.0, 1.0, 0.4});
  Rng rng(3);
  Evaluator eval(bp.problem);
  const Vector a = bp.problem.projected(rng.normal_vector(15));
  const auto inst = SubproblemInstance::make(eval, 2.0, a, rng.normal_vector(15));
  const auto s = solve_tseng(eval, inst, 0.25);
  CHECK(s.inner_iterations <= 2 * s.iteration_bound);
  CHECK(s.linear_solves == 0);
  CHECK(subproblem_residual(eval, inst, s.y, s.nu).norm() <= 0.25 * (s.y - a).norm() + 1e-12);
  CHECK(check_normal_cone(bp.problem, s.y, s.nu));
  CHECK((bp.problem.projected(s.y) - s.y).norm() == 0.0);
}

TEST_CASE("operator norm estimate is an upper estimate") {
  const auto cm = gen_cubic_minmax({10, 1, 1.0, 5.0});
  Evaluator eval(cm.problem);
  const Vector a = Vector::Ones(20);
  Eigen::JacobiSVD<Matrix> svd(cm.problem.materialize_jacobian(a));
  const double est = operator_norm_estimate(eval, a, 40);
  CHECK(est >= svd.singularValues()(0));
  CHECK(est <= 1.1 * svd.singularValues()(0));
}

TEST_CASE("auto backend selection") {
  SubproblemOptions o;
  const auto cm = gen_cubic_minmax({5, 0, 1e-3, 2.0});
  CHECK(select_backend(cm.problem, o) == Backend::Direct);
  o.direct_max_dim = 4;
  CHECK(select_backend(cm.problem, o) == Backend::Krylov);
  const auto bp = gen_box({5, 0});
  CHECK(select_backend(bp.problem, o) == Backend::Tseng);
}

}
