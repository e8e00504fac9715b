#include <random>

#include "doctest.h"

#include "bcert/bound.hpp"
#include "bcert/errors.hpp"

using namespace bcert;

TEST_CASE("published case-study bounds") {
  // Room ring: gamma 0.16, lambda 1.2, kappa 0.99, psi 7.07e-4, ten steps.
  const auto room = safety_bound(0.16, 1.2, 0.99, 7.07e-4, 10);
  CHECK(room.branch == BoundBranch::supermartingale);
  CHECK(1.0 - room.delta == doctest::Approx((1 - 0.16 / 1.2) * std::pow(1 - 7.07e-4 / 1.2, 10)).epsilon(1e-14));
  CHECK(1.0 - room.delta == doctest::Approx(0.86157).epsilon(1e-5));
  // Two-mode ring: gamma 0.321, lambda 2.3, kappa 0.706, psi 1.95e-5, 100 steps.
  const auto tm = safety_bound(0.321, 2.3, 0.706, 1.95e-5, 100);
  CHECK(tm.branch == BoundBranch::supermartingale);
  CHECK(1.0 - tm.delta == doctest::Approx(0.8597).epsilon(1e-4));
  CHECK(1.0 - tm.delta >= 0.85);
}

TEST_CASE("zero horizon gives gamma over lambda on both branches") {
  CHECK(safety_bound(0.1, 1.0, 0.5, 0.01, 0).delta == doctest::Approx(0.1));
  const auto c = safety_bound(0.1, 1.0, 0.1, 0.5, 0);
  CHECK(c.branch == BoundBranch::contraction);
  CHECK(c.delta == doctest::Approx(0.1));
  CHECK(safety_bound(0.0, 1.0, 0.5, 0.0, 1000).delta == 0.0);
}

TEST_CASE("bound properties over random constants") {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 1000; ++t) {
    const double lambda = 0.1 + 5 * u(rng);
    const double gamma = lambda * u(rng) * 0.999;
    const double kappa = 0.01 + 0.98 * u(rng);
    const double psi = u(rng) < 0.5 ? kappa * lambda * u(rng) : kappa * lambda * (1 + 3 * u(rng));
    const long T = static_cast<long>(200 * u(rng));
    const auto b = safety_bound(gamma, lambda, kappa, psi, T);
    double expect;
    if (lambda >= psi / kappa) {
      CHECK(b.branch == BoundBranch::supermartingale);
      expect = 1 - (1 - gamma / lambda) * std::pow(1 - psi / lambda, static_cast<double>(T));
    } else {
      CHECK(b.branch == BoundBranch::contraction);
      const double d = std::pow(1 - kappa, static_cast<double>(T));
      expect = gamma / lambda * d + psi / (kappa * lambda) * (1 - d);
    }
    CHECK(b.delta >= 0.0);
    CHECK(b.delta <= 1.0);
    CHECK(b.vacuous == (expect > 1.0 + 1e-12));
    CHECK(b.delta == doctest::Approx(std::min(expect, 1.0)).epsilon(1e-10).scale(1.0));
    CHECK(safety_bound(gamma, lambda, kappa, psi, T + 1).delta >= b.delta - 1e-15);
    CHECK(safety_bound(std::min(gamma * 1.1, 0.999 * lambda), lambda, kappa, psi, T).delta >= b.delta - 1e-15);
  }
}

TEST_CASE("bound input errors") {
  CHECK_THROWS_AS(safety_bound(0.1, 1.0, 1.0, 0.0, 5), InputError);
  CHECK_THROWS_AS(safety_bound(0.1, 1.0, 0.0, 0.0, 5), InputError);
  CHECK_THROWS_AS(safety_bound(0.1, 0.0, 0.5, 0.0, 5), InputError);
  CHECK_THROWS_AS(safety_bound(1.0, 1.0, 0.5, 0.0, 5), InputError);
  CHECK_THROWS_AS(safety_bound(-0.1, 1.0, 0.5, 0.0, 5), InputError);
  CHECK_THROWS_AS(safety_bound(0.1, 1.0, 0.5, -1.0, 5), InputError);
  CHECK_THROWS_AS(safety_bound(0.1, 1.0, 0.5, 0.0, -1), InputError);
}
