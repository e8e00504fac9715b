#include <random>

#include "doctest.h"
#include "../support/systems.hpp"

#include "bcert/dwell.hpp"
#include "bcert/errors.hpp"
#include "bcert/fixtures.hpp"

using namespace bcert;

TEST_CASE("published two-mode dwell time and lifted constants") {
  const auto sys = two_mode_subsystem("s");
  const auto certs = two_mode_cbcs(sys.state_space);
  CHECK(min_dwell_time(2.0, 2.0, std::vector{0.469, 0.498}) == 3);
  const auto lift = lift_to_apbc(certs, DwellParams{2.0, 2.0, 3});
  const auto& k = lift.apbc.constants;
  CHECK(k.kappa == doctest::Approx(0.706).epsilon(1e-3));
  CHECK(k.gamma == doctest::Approx(0.321).epsilon(1e-3));
  CHECK(k.lambda == 2.3);
  CHECK(k.psi == doctest::Approx(1.95e-5).epsilon(5e-3));
  CHECK(lift.apbc.k_d == 3);
  CHECK(lift.derivation.size() >= 6);
}

TEST_CASE("dwell-time bound against its closed form") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> kap(0.05, 0.99), mu(1.0, 5.0), eps(1.1, 6.0);
  for (int t = 0; t < 500; ++t) {
    const std::vector<double> ks{kap(rng), kap(rng), kap(rng)};
    const double m = mu(rng), e = eps(rng);
    double expect = 0.0;
    for (double k : ks) expect = std::max(expect, e * std::log(m) / std::log(1.0 / k) + 1.0);
    CHECK(dwell_time_bound(e, m, ks) == doctest::Approx(expect).epsilon(1e-12));
    const int kd = min_dwell_time(e, m, ks);
    CHECK(kd >= expect - 1e-9);
    CHECK(kd - 1 < expect - 1e-9);
  }
  CHECK(min_dwell_time(2.0, 1.0, std::vector{0.5}) == 1);
}

TEST_CASE("lift constants against independent formulas, monotone in k_d") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto sys = testsys::scalar_switched("s", {0.5, 0.6, 0.7});
  for (int t = 0; t < 200; ++t) {
    std::vector<CbcCertificate> certs;
    for (int p = 1; p <= 3; ++p) {
      auto c = testsys::cbc(sys, p, "x^2", 0.05 + 0.9 * u(rng), u(rng), 1.0 + u(rng), 0.1 * u(rng), 0.1 + u(rng));
      c.constants.rho = {0.01 + u(rng), 2.0};
      certs.push_back(c);
    }
    std::shuffle(certs.begin(), certs.end(), rng);
    const double eps = 1.5 + 3 * u(rng), mu = 1.0 + u(rng);
    std::vector<double> ks;
    for (const auto& c : certs) ks.push_back(c.constants.kappa);
    const int kd0 = min_dwell_time(eps, mu, ks);
    double prev_gamma = 0.0, prev_psi = 0.0, prev_rho = 0.0;
    for (int kd = kd0; kd < kd0 + 3; ++kd) {
      const auto k = lift_to_apbc(certs, DwellParams{eps, mu, kd}).apbc.constants;
      double g = 0, l = HUGE_VAL, kap = 0, psi = 0, rho = 0, a = HUGE_VAL;
      for (const auto& c : certs) {
        const auto& ck = c.constants;
        g = std::max(g, ck.gamma / std::pow(ck.kappa, (kd - 1) / eps));
        l = std::min(l, ck.lambda);
        kap = std::max(kap, std::pow(ck.kappa, (eps - 1) / eps));
        psi = std::max(psi, ck.psi / std::pow(ck.kappa, kd / eps));
        rho = std::max(rho, ck.rho.coef / std::pow(ck.kappa, kd / eps));
        a = std::min(a, ck.alpha.coef);
      }
      CHECK(k.gamma == doctest::Approx(g).epsilon(1e-12));
      CHECK(k.lambda == l);
      CHECK(k.kappa == doctest::Approx(kap).epsilon(1e-12));
      CHECK(k.psi == doctest::Approx(psi).epsilon(1e-12));
      CHECK(k.rho.coef == doctest::Approx(rho).epsilon(1e-12));
      CHECK(k.alpha.coef == a);
      CHECK(k.gamma >= prev_gamma);
      CHECK(k.psi >= prev_psi);
      CHECK(k.rho.coef >= prev_rho);
      prev_gamma = k.gamma, prev_psi = k.psi, prev_rho = k.rho.coef;
    }
    if (kd0 > 1) CHECK_THROWS_AS(lift_to_apbc(certs, DwellParams{eps, mu, kd0 - 1}), InputError);
  }
}

TEST_CASE("lift input errors") {
  const auto sys = testsys::scalar_switched("s", {0.5, 0.6});
  auto certs = testsys::scalar_cbcs(sys);
  CHECK_THROWS_AS(lift_to_apbc(std::vector<CbcCertificate>{}, DwellParams{}), InputError);
  auto gap = certs;
  gap[1].mode = 3;
  CHECK_THROWS_AS(lift_to_apbc(gap, DwellParams{2.0, 1.2, 5}), InputError);
  auto dup = certs;
  dup[1].mode = 1;
  CHECK_THROWS_AS(lift_to_apbc(dup, DwellParams{2.0, 1.2, 5}), InputError);
  auto mixed = certs;
  mixed[1].constants.alpha.exp = 1.0;
  CHECK_THROWS_AS(lift_to_apbc(mixed, DwellParams{2.0, 1.2, 5}), CapabilityError);
}

TEST_CASE("mu estimate dominates every pointwise ratio") {
  const auto sys = testsys::scalar_switched("s", {0.5, 0.6});
  const std::vector<Polynomial> bs{parse_polynomial("x^2 + 0.1", sys.state_space),
                                   parse_polynomial("2*x^2 + 0.05", sys.state_space)};
  const auto m = estimate_mu(bs, sys.X, GridConfig{});
  CHECK(m.mu == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(m.inflated == doctest::Approx(m.mu * 1.05));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 1000; ++t) {
    const std::vector<double> x{u(rng)};
    const double a = bs[0].eval(x), b = bs[1].eval(x);
    CHECK(m.mu >= std::max(a / b, b / a) - 1e-9);
  }
  const std::vector<Polynomial> same{bs[0], bs[0]};
  CHECK(estimate_mu(same, sys.X, GridConfig{}).mu == 1.0);
  const std::vector<Polynomial> neg{parse_polynomial("x - 0.5", sys.state_space), bs[0]};
  CHECK_THROWS_AS(estimate_mu(neg, sys.X, GridConfig{}), InputError);
}

TEST_CASE("common barrier keeps its constants with k_d = 1") {
  const auto fx = room_temp(2);
  const auto a = apbc_from_common_barrier(fx.cbcs.front(), 7);
  CHECK(a.k_d == 1);
  CHECK(a.mode_count() == 7);
  CHECK(a.constants == fx.cbcs.front().constants);
  CHECK(a.factor(4, 0) == 1.0);
  CHECK_THROWS_AS(apbc_from_common_barrier(fx.cbcs.front(), 0), InputError);
}

TEST_CASE("dwell trade-off table") {
  const auto t = dwell_tradeoff(2.0, std::vector{0.469, 0.498}, std::vector{1.5, 2.0, 3.0});
  REQUIRE(t.size() == 3);
  CHECK(t[1].second == 3);
  CHECK(t[0].second <= t[1].second);
  CHECK(t[1].second <= t[2].second);
}
