#include <random>

#include "doctest.h"
#include "../support/oracles.hpp"
#include "../support/systems.hpp"

#include "bcert/certify.hpp"
#include "bcert/compose.hpp"
#include "bcert/dwell.hpp"
#include "bcert/fixtures.hpp"

using namespace bcert;

namespace {

const CheckReport& report(const std::vector<CheckReport>& r, const std::string& cond) {
  for (const auto& x : r)
    if (x.condition == cond) return x;
  throw std::runtime_error("missing " + cond);
}

// E[B(f_p(x, w, v))] by Gauss-Hermite over standard-normal-mapped noise.
double oracle_expectation(const SubsystemSpec& sys, int mode, const Polynomial& B, std::span<const double> x,
                          std::span<const double> w) {
  return oracle::gaussian_expectation(
      [&](std::span<const double> z) {
        std::vector<double> v(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) v[i] = sys.noise[i].mean() + sys.noise[i].stddev() * z[i];
        return B.eval(sys.step(mode, x, w, v));
      },
      sys.noise_dim(), 12);
}

}  // namespace

TEST_CASE("expected barrier of a scalar contraction") {
  const auto sys = contraction_1d();
  const auto B = parse_polynomial("x^2", sys.state_space);
  const auto E = expected_barrier(sys, 1, B);
  CHECK(E.approx_equal(parse_polynomial("0.25*x^2 + 0.01", E.space()), 1e-15));
}

TEST_CASE("hand-checked scalar certificate verifies") {
  const auto sys = contraction_1d();
  const auto c = testsys::cbc(sys, 1, "x^2", 0.5, 0.01, 0.5, 0.03);
  const auto r = check_cbc(sys, c, GridConfig{});
  REQUIRE(r.size() == 4);
  CHECK(all_verified(r));
  for (const auto& x : r) CHECK(x.worst_margin >= -kMarginTolerance);
}

TEST_CASE("unreachable lambda is refuted in the unsafe set") {
  const auto sys = contraction_1d();
  const auto c = testsys::cbc(sys, 1, "x^2", 0.5, 0.01, 5.0, 0.03);
  const auto r = check_cbc(sys, c, GridConfig{});
  const auto& c3 = report(r, "C3");
  CHECK(c3.status == CertStatus::refuted);
  REQUIRE(c3.counterexample.size() == 1);
  CHECK(sys.X1.contains(c3.counterexample));
  const double x = c3.counterexample[0];
  CHECK(x * x - 5.0 == doctest::Approx(c3.worst_margin));
  CHECK(report(r, "C1").status == CertStatus::verified);
  CHECK(report(r, "C4").status == CertStatus::verified);
}

TEST_CASE("counterexamples of the published two-mode certificates are genuine") {
  const auto sys = two_mode_subsystem("s");
  const auto certs = two_mode_cbcs(sys.state_space);
  std::size_t refuted = 0;
  for (const auto& c : certs) {
    const auto r = check_cbc(sys, c, GridConfig{});
    const auto& k = c.constants;
    for (const auto& rep : r) {
      if (rep.status != CertStatus::refuted) continue;
      ++refuted;
      const auto& p = rep.counterexample;
      REQUIRE_FALSE(p.empty());
      const std::span<const double> x(p.data(), sys.state_dim());
      const double B = c.barrier.eval(x);
      double margin = 0.0;
      if (rep.condition == "C1") {
        CHECK(sys.X.contains(x));
        margin = B - k.alpha(sys.output_norm(x));
      } else if (rep.condition == "C2") {
        CHECK(sys.X0.contains(x));
        margin = k.gamma - B;
      } else if (rep.condition == "C3") {
        CHECK(sys.X1.contains(x));
        margin = B - k.lambda;
      } else {
        REQUIRE(p.size() == sys.state_dim() + sys.input_dim());
        const std::span<const double> w(p.data() + sys.state_dim(), sys.input_dim());
        CHECK(sys.X.contains(x));
        CHECK(sys.W.contains(w));
        double wn = 0.0;
        for (double v : w) wn = std::max(wn, std::abs(v));
        margin = std::max({k.kappa * B, k.rho(wn), k.psi}) - oracle_expectation(sys, c.mode, c.barrier, x, w);
      }
      CHECK(margin < 0.0);
      CHECK(margin == doctest::Approx(rep.worst_margin).epsilon(1e-9).scale(1.0));
    }
  }
  CHECK(refuted > 0);
}

TEST_CASE("finer nested grids never report a larger worst margin") {
  const auto sys = contraction_1d();
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int trial = 0; trial < 20; ++trial) {
    const std::string b = std::to_string(0.2 + u(rng)) + " + " + std::to_string(u(rng)) + "*x + " +
                          std::to_string(u(rng)) + "*x^2 + " + std::to_string(1.0 + u(rng)) + "*x^4";
    const auto c = testsys::cbc(sys, 1, b, 0.5, 0.2, 0.6, 0.05, 0.1);
    std::vector<double> prev;
    for (double h : {0.2, 0.1, 0.05, 0.025}) {
      GridConfig g;
      g.resolution = h;
      g.refine_starts = 0;
      const auto r = check_cbc(sys, c, g);
      REQUIRE(r.size() == 4);
      for (std::size_t i = 0; i < r.size() && !prev.empty(); ++i) CHECK(r[i].worst_margin <= prev[i] + 1e-15);
      prev.clear();
      for (const auto& x : r) prev.push_back(x.worst_margin);
    }
  }
}

TEST_CASE("augmented factor grows with the dwell counter") {
  ApbcCertificate a;
  const auto sys = testsys::scalar_switched("s", {0.5, 0.6});
  a.barriers = {parse_polynomial("x^2", sys.state_space), parse_polynomial("1.2*x^2", sys.state_space)};
  a.mode_kappas = {0.3, 0.8};
  a.epsilon = 2.0;
  a.k_d = 5;
  for (int p = 1; p <= 2; ++p) {
    CHECK(a.factor(p, 0) == 1.0);
    for (int l = 1; l < 5; ++l) {
      CHECK(a.factor(p, l) > a.factor(p, l - 1));
      CHECK(a.factor(p, l) == doctest::Approx(std::pow(a.mode_kappas[p - 1], -l / 2.0)));
    }
  }
  const std::vector<double> x{0.5};
  CHECK(a.eval(x, 2, 3) == doctest::Approx(std::pow(0.8, -1.5) * 0.3));
}

TEST_CASE("lifted scalar certificates verify as augmented certificates") {
  const auto sys = testsys::scalar_switched("s", {0.5, 0.6});
  const auto certs = testsys::scalar_cbcs(sys);
  for (const auto& c : certs) CHECK(all_verified(check_cbc(sys, c, GridConfig{})));
  const auto mu = estimate_mu(std::vector{certs[0].barrier, certs[1].barrier}, sys.X, GridConfig{});
  CHECK(mu.mu == doctest::Approx(1.2).epsilon(1e-9));
  const int kd = min_dwell_time(2.0, mu.mu, std::vector{0.5, 0.5});
  const auto lift = lift_to_apbc(certs, DwellParams{2.0, mu.mu, kd});
  const auto r = check_apbc(sys, lift.apbc, GridConfig{});
  CHECK(all_verified(r));

  // Dropping psi breaks the decrease condition near the origin.
  auto bad = lift.apbc;
  bad.constants.psi = 0.0;
  const auto rb = check_apbc(sys, bad, GridConfig{});
  const auto& c4 = report(rb, "C4");
  CHECK(c4.status == CertStatus::refuted);
  REQUIRE(c4.mode.has_value());
  REQUIRE(c4.counter.has_value());
  CHECK_FALSE(c4.witnesses.empty());
}

TEST_CASE("composed certificate of independent scalar subsystems") {
  NetworkSpec net;
  net.subsystems = {testsys::scalar_switched("a", {0.5, 0.6}), testsys::scalar_switched("b", {0.5, 0.6})};
  const auto certs = testsys::scalar_cbcs(net.subsystems[0]);
  const auto lift = lift_to_apbc(certs, DwellParams{2.0, 1.2, 2});
  const std::vector<ApbcCertificate> parts{lift.apbc, lift.apbc};
  auto abc = compose_abc(net, parts, std::vector{1.0, 1.0}, UnsafeSemantics::union_);
  CHECK(all_verified(check_abc(net, abc, GridConfig{})));

  abc.constants.kappa = 0.01;
  abc.constants.psi = 0.0;
  const auto r = check_abc(net, abc, GridConfig{});
  CHECK(report(r, "C4").status == CertStatus::refuted);
  CHECK(report(r, "C1").status == CertStatus::verified);
}
