#include <cstdlib>
#include <sstream>

#include "doctest.h"
#include "../support/oracles.hpp"
#include "../support/systems.hpp"

#include "bcert/augment.hpp"
#include "bcert/certify.hpp"
#include "bcert/compose.hpp"
#include "bcert/dwell.hpp"
#include "bcert/errors.hpp"
#include "bcert/sim.hpp"

using namespace bcert;

namespace {

struct Setup {
  NetworkSpec net;
  AbcCertificate abc;
};

// Two independent scalar switched subsystems with a verified composed certificate.
Setup scalar_network() {
  Setup s;
  s.net.subsystems = {testsys::scalar_switched("a", {0.5, 0.6}), testsys::scalar_switched("b", {0.5, 0.6})};
  const auto certs = testsys::scalar_cbcs(s.net.subsystems[0]);
  const auto apbc = lift_to_apbc(certs, DwellParams{2.0, 1.2, 2}).apbc;
  s.abc = compose_abc(s.net, std::vector{apbc, apbc}, std::vector{1.0, 1.0}, UnsafeSemantics::union_);
  record(s.abc.verification, check_abc(s.net, s.abc, GridConfig{}));
  return s;
}

struct EnvGuard {
  explicit EnvGuard(const char* v) { setenv("BCERT_THREADS", v, 1); }
  ~EnvGuard() { unsetenv("BCERT_THREADS"); }
};

}  // namespace

TEST_CASE("Clopper-Pearson limits match the bisection oracle") {
  for (std::size_t n : {1u, 10u, 100u, 1000u, 10000u}) {
    for (std::size_t k : {std::size_t{0}, std::size_t{1}, n / 3, n / 2, n - 1, n}) {
      if (k > n) continue;
      CHECK(clopper_pearson_upper(k, n) == doctest::Approx(oracle::cp_upper(k, n)).epsilon(1e-8).scale(1.0));
      CHECK(clopper_pearson_lower(k, n) == doctest::Approx(oracle::cp_lower(k, n)).epsilon(1e-8).scale(1.0));
    }
  }
  CHECK(clopper_pearson_upper(5, 5) == 1.0);
  CHECK(clopper_pearson_lower(0, 5) == 0.0);
  // Zero successes: upper limit 1 - 0.05^(1/n).
  CHECK(clopper_pearson_upper(0, 1000) == doctest::Approx(1.0 - std::pow(0.05, 1e-3)).epsilon(1e-10));
  CHECK_THROWS_AS(clopper_pearson_upper(0, 0), InputError);
  const auto e = estimate_proportion(0, 0);
  CHECK_FALSE(e.frequency.has_value());
  CHECK(estimate_proportion(3, 10).frequency == doctest::Approx(0.3));
}

TEST_CASE("counter-based draws are stable and well distributed") {
  CHECK(uniform_draw(1, 2, 3, 4, 5) == uniform_draw(1, 2, 3, 4, 5));
  CHECK(uniform_draw(1, 2, 3, 4, 5) != uniform_draw(1, 2, 3, 4, 6));
  const std::size_t n = 200000;
  double m = 0, m2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = normal_draw(9, i, 0, 0, 0);
    m += z;
    m2 += z * z;
  }
  CHECK(std::abs(m / n) < 0.01);
  CHECK(std::abs(m2 / n - 1.0) < 0.02);
  const NoiseSpec u(Uniform{2.0, 3.0});
  for (std::size_t i = 0; i < 1000; ++i) {
    const double v = noise_draw(u, 1, i, 0, 0, 0);
    CHECK(v >= 2.0);
    CHECK(v <= 3.0);
  }
}

TEST_CASE("Monte Carlo is reproducible across thread counts") {
  const auto s = scalar_network();
  REQUIRE(s.abc.verification.status == CertStatus::verified);
  SimConfig cfg;
  cfg.trajectories = 300;
  cfg.horizon = 20;
  cfg.seed = 7;
  SimReport a, b;
  {
    EnvGuard g("1");
    a = run_monte_carlo(s.net, s.abc, cfg);
  }
  {
    EnvGuard g("4");
    b = run_monte_carlo(s.net, s.abc, cfg);
  }
  CHECK(a.exceedance.count == b.exceedance.count);
  CHECK(a.max_barrier == b.max_barrier);
  CHECK(a.controller_checks == b.controller_checks);
  cfg.seed = 8;
  CHECK(run_monte_carlo(s.net, s.abc, cfg).max_barrier != a.max_barrier);
}

TEST_CASE("simulated switching respects the dwell time and the bound") {
  const auto s = scalar_network();
  for (auto ctl : {ControllerKind::lookahead, ControllerKind::one_step}) {
    SimConfig cfg;
    cfg.trajectories = 2000;
    cfg.horizon = 30;
    cfg.retain = 20;
    cfg.controller = ctl;
    cfg.initial_modes = {1, 2};
    const auto r = run_monte_carlo(s.net, s.abc, cfg);
    CHECK(r.dwell_violations == 0);
    CHECK(r.retained.size() == 20);
    for (const auto& traj : r.retained) {
      REQUIRE(traj.size() == 31);
      for (std::size_t i = 0; i < 2; ++i) {
        std::vector<int> sig;
        for (const auto& step : traj) sig.push_back(step[i].p);
        CHECK(check_dwell_time(sig, s.abc.parts[i].k_d));
      }
    }
    REQUIRE(r.exceedance.frequency.has_value());
    CHECK(*r.exceedance.frequency <= r.bound.delta);
    CHECK(r.controller_checks > 0);
    CHECK(r.warnings.empty());
  }
}

TEST_CASE("unverified certificates need an explicit override") {
  auto s = scalar_network();
  s.abc.verification.status = CertStatus::refuted;
  SimConfig cfg;
  cfg.trajectories = 10;
  CHECK_THROWS_AS(run_monte_carlo(s.net, s.abc, cfg), InputError);
  cfg.allow_unverified = true;
  const auto r = run_monte_carlo(s.net, s.abc, cfg);
  CHECK_FALSE(r.warnings.empty());
  cfg.initial_modes = {1};
  CHECK_THROWS_AS(run_monte_carlo(s.net, s.abc, cfg), InputError);
}

TEST_CASE("plot data layout") {
  const auto s = scalar_network();
  SimConfig cfg;
  cfg.trajectories = 5;
  cfg.horizon = 4;
  cfg.retain = 3;
  const auto r = run_monte_carlo(s.net, s.abc, cfg);
  std::ostringstream os;
  plot_data(os, r, s.net, 1, 2);
  std::istringstream is(os.str());
  std::string header, line;
  std::getline(is, header);
  CHECK(header.rfind("k,", 0) == 0);
  CHECK(std::count(header.begin(), header.end(), ',') == 2);
  std::size_t rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 5);
  SimReport empty;
  CHECK_THROWS_AS(plot_data(os, empty, s.net), InputError);
}
