#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "pafit/numeric.hpp"

using namespace pafit;

TEST_CASE("gauss-kronrod integrates polynomials and transcendentals") {
  auto q1 = num::integrate([](double x) { return x * x * x * x; }, 0.0, 1.0);
  CHECK(q1.value == doctest::Approx(0.2).epsilon(1e-14));
  auto q2 = num::integrate([](double x) { return std::sin(x); }, 0.0, M_PI);
  CHECK(q2.value == doctest::Approx(2.0).epsilon(1e-12));
  auto q3 = num::integrate([](double x) { return std::exp(-x * x); }, -8.0, 8.0, 1e-12);
  CHECK(q3.value == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
}

TEST_CASE("quadrature agrees with the simpson oracle on a peaked integrand") {
  auto f = [](double x) { return 1.0 / (1e-3 + (x - 0.7) * (x - 0.7)); };
  const double want = oracles::simpson(f, 0.0, 1.0, 1e-12);
  auto got = num::integrate(f, 0.0, 1.0, 1e-10);
  CHECK(got.value == doctest::Approx(want).epsilon(1e-9));
}

TEST_CASE("gap integrals handle the near-singular and singular endpoint") {
  // ∫0^1 x/(λ-x) dx = λ ln(λ/(λ-1)) - 1
  for (double lam : {2.0, 1.2550, 1.01, 1.0001}) {
    auto got = num::integrate_over_gap([](double x) { return x; }, 0.0, 1.0, lam, 1e-11);
    const double want = lam * std::log(lam / (lam - 1.0)) - 1.0;
    REQUIRE_FALSE(got.diverged);
    CHECK(got.value == doctest::Approx(want).epsilon(1e-9));
  }
  // integrable at the endpoint itself: ∫ x·3(1-x)²/(1-x) dx = 1/2
  auto beta13 = num::integrate_over_gap(
      [](double x) { return 3.0 * x * (1.0 - x) * (1.0 - x); }, 0.0, 1.0, 1.0, 1e-11);
  REQUIRE_FALSE(beta13.diverged);
  CHECK(beta13.value == doctest::Approx(0.5).epsilon(1e-9));
  // divergent at the endpoint: ∫ x/(1-x) dx
  auto unif = num::integrate_over_gap([](double x) { return x; }, 0.0, 1.0, 1.0, 1e-11);
  CHECK(unif.diverged);
}

TEST_CASE("bisection finds the root of a decreasing function") {
  auto root = num::bisect_decreasing([](double x) { return 1.0 / x; }, 0.25, 1.0, 2.0);
  REQUIRE(root.converged);
  CHECK(root.root == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(std::abs(root.residual) < 1e-12);
}

TEST_CASE("incomplete beta and inverse") {
  CHECK(num::ibeta(1.0, 3.0, 0.1) == doctest::Approx(1.0 - std::pow(0.9, 3)).epsilon(1e-12));
  CHECK(num::ibeta(2.0, 2.0, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
  for (double p : {0.01, 0.25, 0.5, 0.75, 0.99}) {
    const double x = num::ibeta_inv(1.5, 3.5, p);
    CHECK(num::ibeta(1.5, 3.5, x) == doctest::Approx(p).epsilon(1e-9));
  }
}

TEST_CASE("zeta values against the long-double oracle and known constants") {
  CHECK(num::riemann_zeta(4.0) ==
        doctest::Approx(std::pow(M_PI, 4) / 90.0).epsilon(1e-12));
  CHECK(num::riemann_zeta(3.0) == doctest::Approx(1.2020569031595943).epsilon(1e-12));
  CHECK(num::riemann_zeta(2.0) == doctest::Approx(M_PI * M_PI / 6.0).epsilon(1e-12));
  for (int64_t I : {0, 5, 10, 100}) {
    CHECK(num::zeta_tail(4.0, I) ==
          doctest::Approx(oracles::zeta_tail_bracket(4.0, I)).epsilon(1e-12));
  }
}
