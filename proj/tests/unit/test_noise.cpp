#include <random>

#include "doctest.h"
#include "../support/oracles.hpp"

#include "bcert/errors.hpp"
#include "bcert/noise.hpp"
#include "bcert/parse.hpp"

using namespace bcert;

TEST_CASE("gaussian and uniform raw moments") {
  const NoiseSpec g(Gaussian{0.0, 1.0});
  for (unsigned k = 0; k <= 12; ++k) {
    const double expect = k % 2 ? 0.0 : oracle::double_factorial(static_cast<int>(k) - 1);
    CHECK(g.raw_moment(k) == doctest::Approx(expect).epsilon(1e-14));
  }
  const NoiseSpec h(Gaussian{0.5, 2.0});
  // E[(m + s Z)^3] = m^3 + 3 m s^2.
  CHECK(h.raw_moment(3) == doctest::Approx(0.125 + 3 * 0.5 * 4.0));
  const NoiseSpec u(Uniform{-1.0, 3.0});
  for (unsigned k = 0; k <= 8; ++k) {
    const double expect = (std::pow(3.0, k + 1) - std::pow(-1.0, k + 1)) / ((k + 1) * 4.0);
    CHECK(u.raw_moment(k) == doctest::Approx(expect).epsilon(1e-13));
  }
  CHECK_THROWS_AS(g.raw_moment(NoiseSpec::kMaxMomentDegree + 1), CapabilityError);
}

TEST_CASE("expectation is linear and fixes noise-free polynomials") {
  const auto s = make_space(VariableSpace::from_names({"x"}, {"w"}, {"v1", "v2"}));
  const std::vector<NoiseSpec> noise{NoiseSpec(Gaussian{0.1, 0.7}), NoiseSpec(Uniform{-0.5, 1.0})};
  const auto p = parse_polynomial("(x + 0.3*v1 - w*v2)^3 + v1^2*v2^2", s);
  const auto q = parse_polynomial("x*w*v1 + 2*v2^4 - 1", s);
  const auto lhs = expectation_over_noise(p * 2.5 + q, noise);
  const auto rhs = expectation_over_noise(p, noise) * 2.5 + expectation_over_noise(q, noise);
  CHECK(lhs.approx_equal(rhs, 1e-12));

  const auto nf = parse_polynomial("x^3 - 2*x*w + 4", s);
  const auto e = expectation_over_noise(nf, noise);
  CHECK(e.term_count() == nf.term_count());
  CHECK(e.rebase(s).approx_equal(nf));
}

TEST_CASE("expectation matches quadrature and Monte Carlo at 20 points") {
  const auto s = make_space(VariableSpace::from_names({"x", "y"}, {}, {"v1", "v2"}));
  const auto f = parse_polynomial("(0.5*x + 0.1*v1)^4 + (0.3*y - 0.2*v2)^2*(x + v1) + 0.7*v1*v2", s);
  const std::vector<NoiseSpec> noise(2, NoiseSpec::standard_gaussian());
  const auto e = expectation_over_noise(f, noise);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::normal_distribution<double> z;
  for (int i = 0; i < 20; ++i) {
    const double x = u(rng), y = u(rng);
    const double closed = e.eval(std::vector{x, y});
    const double quad = oracle::gaussian_expectation(
        [&](std::span<const double> v) { return f.eval(std::vector{x, y, v[0], v[1]}); }, 2);
    CHECK(closed == doctest::Approx(quad).epsilon(1e-10).scale(1.0));
    const int n = 100000;
    double m = 0.0, m2 = 0.0;
    for (int k = 0; k < n; ++k) {
      const double val = f.eval(std::vector{x, y, z(rng), z(rng)});
      m += val;
      m2 += val * val;
    }
    m /= n;
    const double se = std::sqrt((m2 / n - m * m) / n);
    CHECK(std::abs(closed - m) <= 3.0 * se + 1e-12);
  }
}
