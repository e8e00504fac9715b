#include "doctest.h"
#include "../support/oracles.hpp"
#include "../support/systems.hpp"

#include "bcert/cegis.hpp"
#include "bcert/certify.hpp"
#include "bcert/errors.hpp"
#include "bcert/fixtures.hpp"

using namespace bcert;

namespace {

CegisConfig small_config() {
  CegisConfig cfg;
  cfg.budget = 40;
  cfg.grid.points_per_dim = 401;
  return cfg;
}

}  // namespace

TEST_CASE("synthesis on a scalar contraction yields an independently valid certificate") {
  const auto sys = contraction_1d();
  const auto cfg = small_config();
  const auto r = synthesize_cbc(sys, 1, cfg);
  REQUIRE(r.success);
  REQUIRE(r.certificate.has_value());
  const auto& c = *r.certificate;
  const auto& k = c.constants;
  CHECK(c.verification.status == CertStatus::verified);
  CHECK(k.gamma < k.lambda);
  CHECK(all_verified(check_cbc(sys, c, cfg.grid)));

  // Independent pass: direct evaluation and Gauss-Hermite expectation on the same grid.
  const double tol = 1e-9;
  for (int i = 0; i <= 400; ++i) {
    const double x = -1.0 + i * 0.005;
    const std::vector<double> pt{x};
    const double B = c.barrier.eval(pt);
    CHECK(B >= k.alpha(std::abs(x)) - tol);
    if (std::abs(x) <= 0.1) CHECK(B <= k.gamma + tol);
    if (std::abs(x) >= 0.8) CHECK(B >= k.lambda - tol);
    const double E = oracle::gaussian_expectation(
        [&](std::span<const double> z) { return c.barrier.eval(std::vector{0.5 * x + 0.1 * z[0]}); }, 1);
    CHECK(E <= std::max(k.kappa * B, k.psi) + tol);
  }
}

TEST_CASE("synthesis is deterministic for a fixed seed") {
  const auto sys = contraction_1d();
  const auto cfg = small_config();
  const auto a = synthesize_cbc(sys, 1, cfg);
  const auto b = synthesize_cbc(sys, 1, cfg);
  REQUIRE(a.success == b.success);
  REQUIRE(a.certificate.has_value() == b.certificate.has_value());
  if (a.certificate) {
    CHECK(a.certificate->barrier.approx_equal(b.certificate->barrier));
    CHECK(a.certificate->constants == b.certificate->constants);
  }
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("constant barriers cannot separate initial and unsafe sets") {
  auto cfg = small_config();
  cfg.degree = 0;
  cfg.budget = 10;
  const auto r = synthesize_cbc(contraction_1d(), 1, cfg);
  CHECK_FALSE(r.success);
  CHECK_FALSE(r.reason.empty());
}

TEST_CASE("synthesis configuration errors") {
  const auto sys = contraction_1d();
  auto cfg = small_config();
  cfg.kappa_grid.clear();
  CHECK_THROWS_AS(synthesize_cbc(sys, 1, cfg), ConfigError);
  cfg = small_config();
  cfg.kappa_grid = {1.5};
  CHECK_THROWS_AS(synthesize_cbc(sys, 1, cfg), ConfigError);
  cfg = small_config();
  cfg.lambda_grid = {-1.0, 0.0};
  CHECK_THROWS_AS(synthesize_cbc(sys, 1, cfg), ConfigError);
  cfg = small_config();
  cfg.budget = 0;
  CHECK_THROWS_AS(synthesize_cbc(sys, 1, cfg), ConfigError);
  CHECK_THROWS_AS(synthesize_cbc(sys, 2, small_config()), InputError);
}
