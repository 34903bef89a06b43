#include <cmath>

#include "doctest.h"
#include "hipnex/errors.hpp"
#include "hipnex/params.hpp"

using namespace hipnex;

TEST_SUITE("params") {

TEST_CASE("defaults at sigma_hat = 0, L = 1") {
  const Params p = derive_params(0.0, 1.0);
  CHECK(p.theta == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(p.theta_hat == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(p.theta_hat == doctest::Approx(p.theta * p.theta).epsilon(1e-15));
  CHECK(p.eta == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(p.sigma == doctest::Approx(0.25).epsilon(1e-15));
  // smallest root of 0.5 t^2 - 2 t + 0.25, by bisection at 50 digits
  CHECK(p.tau == doctest::Approx(0.12917130661302930721).epsilon(1e-14));
}

TEST_CASE("defaults at sigma_hat = 0.25, L = 2") {
  const Params p = derive_params(0.25, 2.0);
  CHECK(p.theta == doctest::Approx(0.1875).epsilon(1e-15));
  CHECK(p.theta_hat == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(p.eta == doctest::Approx(0.375).epsilon(1e-15));
  CHECK(p.sigma == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(p.tau == doctest::Approx(0.08514578448732378005).epsilon(1e-14));
  CHECK(std::abs(p.q(p.tau)) < 1e-15);
}

TEST_CASE("frozen packs") {
  const Params a = derive_params(0.1, 1e-3);
  CHECK(a.eta == doctest::Approx(1440.0).epsilon(1e-13));
  CHECK(a.sigma == doctest::Approx(0.27777777777777777949).epsilon(1e-13));
  CHECK(a.tau == doctest::Approx(0.11438191683587326736).epsilon(1e-13));
  const Params b = derive_params(0.4, 50.0);
  CHECK(b.theta_hat == doctest::Approx(0.05).epsilon(1e-13));
  CHECK(b.tau == doctest::Approx(0.04210997925487822763).epsilon(1e-13));
}

TEST_CASE("theta_hat = (1 - 2 sigma_hat) / 4 under the defaults") {
  for (double sh : {0.0, 0.05, 0.2, 0.33, 0.49}) {
    const Params p = derive_params(sh, 3.0);
    CHECK(p.theta_hat == doctest::Approx((1.0 - 2.0 * sh) / 4.0).epsilon(1e-14));
    CHECK(p.tau > 0.0);
    CHECK(p.tau < 1.0);
    CHECK(p.q(0.0) > 0.0);
    CHECK(params_violations(p).empty());
  }
}

TEST_CASE("overrides") {
  const Params p = derive_params(0.0, 1.0, 0.1, 0.1);
  CHECK(p.theta_hat == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(p.sigma == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(p.tau == doctest::Approx(0.43605897019501467722).epsilon(1e-13));
  CHECK_THROWS_AS(derive_params(0.0, 1.0, 0.5, 0.4), ParameterError);  // eta <= 2 theta_hat / L
  CHECK_THROWS_AS(derive_params(0.0, 1.0, 1.5), ParameterError);
}

TEST_CASE("invalid input") {
  CHECK_THROWS_AS(derive_params(0.5, 1.0), ParameterError);
  CHECK_THROWS_AS(derive_params(0.6, 1.0), ParameterError);
  CHECK_THROWS_AS(derive_params(-0.01, 1.0), ParameterError);
  CHECK_THROWS_AS(derive_params(0.1, 0.0), ParameterError);
  CHECK_THROWS_AS(derive_params(0.1, std::nan("")), ParameterError);

  Params p = derive_params(0.1, 1.0);
  p.tau = 0.5;
  CHECK_FALSE(params_violations(p).empty());
  CHECK_THROWS_AS(validate_params(p), ParameterError);
}

TEST_CASE("lambda1 bound") {
  Params p = derive_params(0.0, 1.0);
  CHECK(init_lambda(4.0, 0.5, 1.0) == doctest::Approx(0.5));
  CHECK(init_lambda(0.0, 0.5, 1.0) == 1.0);
  p.lambda1 = 0.6;
  CHECK_FALSE(params_violations(p, 4.0).empty());
  p.lambda1 = 0.5;
  CHECK(params_violations(p, 4.0).empty());
}

TEST_CASE("log_plus") {
  CHECK(log_plus(0.5) == 0.0);
  CHECK(log_plus(1.0) == 0.0);
  CHECK(log_plus(std::exp(2.0)) == doctest::Approx(2.0));
}

TEST_CASE("budgets, frozen") {
  Params p = derive_params(0.0, 1.0);
  p.lambda1 = 1.0;
  CHECK(budget_pointwise(p, 1.0, 1.0) == 15);
  CHECK(budget_ergodic(p, 1.0, 1.0) == 21);
  // closed form: ceil(16 L d0^2 / rho) + ceil(4 log+(5 / (2 lambda1^2 L rho)))
  CHECK(budget_pointwise_closed_form(0.0, 1.0, 1.0, 1.0, 1.0) == 20);
  CHECK(budget_ergodic_closed_form(0.0, 1.0, 1.0, 1.0, 1.0) == 24);
  CHECK(budget_pointwise(p, 1.0, 1e-3) == 10354);
  CHECK(budget_ergodic(p, 1.0, 1e-3) == 1648);
  CHECK(budget_pointwise_closed_form(0.0, 1.0, 1.0, 1.0, 1e-3) == 16032);
  CHECK(budget_ergodic_closed_form(0.0, 1.0, 1.0, 1.0, 1e-3) == 1971);

  Params q = derive_params(0.25, 2.0);
  q.lambda1 = 0.5;
  CHECK(budget_pointwise(q, 3.0, 1e-6) == 845608597);
  CHECK(budget_ergodic(q, 3.0, 1e-6) == 6980431);
  // 16 L d0^2 / rho is exactly 1.152e9 in decimal; the binary 1e-6 sits just below it
  CHECK(budget_pointwise_closed_form(0.25, 2.0, 0.5, 3.0, 1e-6) == 1152000088);
  CHECK(budget_ergodic_closed_form(0.25, 2.0, 0.5, 3.0, 1e-6) == 7987610);

  Params r = derive_params(0.4, 50.0);
  r.lambda1 = 0.01;
  CHECK(budget_pointwise(r, 0.5, 1e-2) == 424165);
  CHECK(budget_ergodic(r, 0.5, 1e-2) == 24245);
  CHECK(budget_pointwise_closed_form(0.4, 50.0, 0.01, 0.5, 1e-2) == 500107);
  CHECK(budget_ergodic_closed_form(0.4, 50.0, 0.01, 0.5, 1e-2) == 25305);
}

TEST_CASE("budget needs lambda1") {
  const Params p = derive_params(0.0, 1.0);
  CHECK_THROWS_AS(budget_pointwise(p, 1.0, 1e-3), ParameterError);
  Params q = p;
  q.lambda1 = 1.0;
  CHECK_THROWS_AS(budget_ergodic(q, 1.0, 0.0), ParameterError);
}

}
