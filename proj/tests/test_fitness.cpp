#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "pafit/fitness.hpp"

using namespace pafit;

TEST_CASE("dirac sampling is the point mass") {
  auto m = dirac(1.0);
  Rng rng(42);
  for (int i = 0; i < 100; ++i) {
    auto [f, atom] = m.sample(rng);
    CHECK(f == 1.0);
    CHECK(atom.value() == 1);
  }
}

TEST_CASE("two-point frequencies match the law over a million draws") {
  auto m = two_point(1.0, 2.0, 0.5);
  Rng rng(1);
  int64_t ones = 0;
  const int64_t n = 1'000'000;
  for (int64_t i = 0; i < n; ++i)
    if (m.sample(rng).second.value() == 1) ++ones;
  CHECK(std::abs(static_cast<double>(ones) / n - 0.5) < 0.002);
}

TEST_CASE("beta sampling mean matches the quadrature oracle") {
  auto m = beta_fitness(1.0, 3.0);
  // oracle: ∫ x·3(1-x)² dx over [0,1]
  const double want =
      oracles::simpson([](double x) { return x * 3.0 * (1.0 - x) * (1.0 - x); }, 0.0, 1.0);
  CHECK(want == doctest::Approx(0.25).epsilon(1e-10));
  Rng rng(2);
  double sum = 0.0;
  const int64_t n = 1'000'000;
  for (int64_t i = 0; i < n; ++i) sum += m.sample(rng).first;
  CHECK(std::abs(sum / n - want) < 0.001);
}

TEST_CASE("sampling is reproducible for equal seeds") {
  auto m = beta_fitness(2.0, 5.0);
  Rng a(123), b(123), c(321);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 1000; ++i) {
    const double fa = m.sample(a).first;
    const double fb = m.sample(b).first;
    const double fc = m.sample(c).first;
    all_equal = all_equal && fa == fb;
    any_diff = any_diff || fa != fc;
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("mass_beyond: finite tails and the zeta tail") {
  auto fin = finite_discrete({1.0, 2.0, 3.0}, {0.2, 0.3, 0.5});
  CHECK(fin.mass_beyond(3) == 0.0);
  CHECK(fin.mass_beyond(1) == doctest::Approx(0.8).epsilon(1e-15));
  auto tp = two_point(1.0, 2.0, 0.5);
  CHECK(tp.mass_beyond(1) == doctest::Approx(0.5).epsilon(1e-15));

  auto z = zeta_family(2.0);
  // oracle: partial sums with integral-test bracket, divided by ζ(4)
  const double want = oracles::zeta_tail_bracket(4.0, 10) / oracles::zeta_value(4.0);
  CHECK(want == doctest::Approx(2.6485e-4).epsilon(1e-3));
  CHECK(z.mass_beyond(10) == doctest::Approx(want).epsilon(1e-9));
  // integral-test bracket: ∫_{11}^∞ ≤ tail ≤ ∫_{10}^∞ (up to the ζ factor)
  const double z4 = oracles::zeta_value(4.0);
  CHECK(z.mass_beyond(10) >= std::pow(11.0, -3.0) / 3.0 / z4);
  CHECK(z.mass_beyond(10) <= std::pow(10.0, -3.0) / 3.0 / z4);
  CHECK_THROWS(uniform_fitness(1.0).mass_beyond(2));
}

TEST_CASE("validation accepts the built-ins") {
  for (const auto& m : {dirac(1.0), two_point(1.0, 2.0, 0.5), uniform_fitness(1.0),
                        beta_fitness(1.0, 3.0), zeta_family(2.0), exponential_fitness(1.0)}) {
    auto report = validate(m);
    INFO(m.name);
    for (auto& f : report.failures) INFO(f);
    CHECK(report.ok);
  }
}

TEST_CASE("validation rejects malformed models with reasons") {
  auto bad = finite_discrete({2.0, 1.0}, {0.5, 0.5});
  auto report = validate(bad);
  CHECK_FALSE(report.ok);
  bool mentions_order = false;
  for (auto& f : report.failures) mentions_order |= f.find("ascending") != std::string::npos;
  CHECK(mentions_order);

  auto zero = finite_discrete({0.0, 1.0}, {0.5, 0.5});
  CHECK_FALSE(validate(zero).ok);
  zero.allow_zero_atom = true;
  CHECK(validate(zero).ok);

  auto offmass = finite_discrete({1.0, 2.0}, {0.5, 0.6});
  CHECK_FALSE(validate(offmass).ok);
}

TEST_CASE("beta total mass via quadrature matches the declared mass") {
  auto m = beta_fitness(1.0, 3.0);
  const double mass = oracles::simpson([&](double x) { return m.pdf(x); }, 0.0, 1.0, 1e-12);
  CHECK(std::abs(mass - 1.0) < 1e-9);
}

TEST_CASE("zeta family atoms and probabilities follow the rule") {
  auto z = zeta_family(2.0);
  CHECK(z.atom_fitness(1) == 0.0);
  CHECK(z.atom_fitness(2) == doctest::Approx(0.5));
  CHECK(z.atom_fitness(3) == doctest::Approx(2.0 / 3.0));
  const double z4 = oracles::zeta_value(4.0);
  CHECK(z.atom_prob(1) == doctest::Approx(1.0 / z4).epsilon(1e-12));
  CHECK(z.atom_prob(2) == doctest::Approx(std::pow(2.0, -4.0) / z4).epsilon(1e-12));
}
