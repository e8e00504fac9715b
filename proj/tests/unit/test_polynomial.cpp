#include <random>

#include "doctest.h"

#include "bcert/errors.hpp"
#include "bcert/parse.hpp"
#include "bcert/polynomial.hpp"

using namespace bcert;

namespace {

SpacePtr xyz() { return make_space(VariableSpace::from_names({"x", "y"}, {"w"}, {"v"})); }

Polynomial random_poly(std::mt19937_64& rng, const SpacePtr& s, unsigned max_deg, int terms) {
  std::uniform_int_distribution<int> e(0, static_cast<int>(max_deg));
  std::uniform_real_distribution<double> c(-2.0, 2.0);
  Polynomial p(s);
  for (int t = 0; t < terms; ++t) {
    Exponents ex(s->size());
    for (auto& v : ex) v = static_cast<std::uint16_t>(e(rng) / 2);
    p.add_term(ex, c(rng));
  }
  return p;
}

}  // namespace

TEST_CASE("parse examples") {
  const auto s = make_space(VariableSpace::from_names({"T"}));
  const auto b = parse_polynomial("-0.00012*T^4 + 0.01045*T^3 - 0.19932*T^2 - 0.64538*T + 28.68175", s);
  CHECK(b.degree() == 4);
  CHECK(b.term_count() == 5);
  const double T = 20.0;
  CHECK(b.eval(std::vector{T}) ==
        doctest::Approx(-0.00012 * T * T * T * T + 0.01045 * T * T * T - 0.19932 * T * T - 0.64538 * T + 28.68175)
            .epsilon(1e-14));

  const auto s2 = xyz();
  const auto q = parse_polynomial("(x + 2*y)^2 - x*x", s2);
  CHECK(q.approx_equal(parse_polynomial("4*x*y + 4*y^2", s2)));
  CHECK(parse_polynomial("x - x", s2).is_zero());
  CHECK(parse_polynomial("1e-13*x + 1", s2).term_count() == 1);
}

TEST_CASE("parse errors") {
  const auto s = xyz();
  CHECK_THROWS_AS(parse_polynomial("x + q", s), InputError);
  CHECK_THROWS_AS(parse_polynomial("x +", s), InputError);
  CHECK_THROWS_AS(parse_polynomial("x^-1", s), InputError);
  CHECK_THROWS_AS(parse_polynomial("(x", s), InputError);
}

TEST_CASE("ring laws at random points") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const auto s = xyz();
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = random_poly(rng, s, 6, 5);
    const auto q = random_poly(rng, s, 6, 5);
    std::vector<double> pt(s->size());
    for (auto& v : pt) v = u(rng);
    const double pv = p.eval(pt), qv = q.eval(pt);
    const double tol = 1e-9 * (1.0 + std::abs(pv) + std::abs(qv) + std::abs(pv * qv));
    CHECK(std::abs((p + q).eval(pt) - (pv + qv)) <= tol);
    CHECK(std::abs((p - q).eval(pt) - (pv - qv)) <= tol);
    CHECK(std::abs((p * q).eval(pt) - pv * qv) <= tol);
    CHECK(std::abs(p.pow(3).eval(pt) - pv * pv * pv) <= 1e-9 * (1.0 + std::abs(pv * pv * pv)));
  }
}

TEST_CASE("composition degree bound and value") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto outer = make_space(VariableSpace::from_names({"a", "b"}));
  const auto inner = xyz();
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = random_poly(rng, outer, 6, 4);
    const auto fa = random_poly(rng, inner, 4, 3);
    const auto fb = random_poly(rng, inner, 4, 3);
    const auto c = p.compose({{"a", fa}, {"b", fb}});
    CHECK(c.degree() <= p.degree() * std::max(fa.degree(), fb.degree()));
    std::vector<double> pt(inner->size());
    for (auto& v : pt) v = u(rng);
    const std::vector<double> ab{fa.eval(pt), fb.eval(pt)};
    CHECK(c.eval(pt) == doctest::Approx(p.eval(ab)).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("rebase and roles") {
  const auto s = xyz();
  const auto p = parse_polynomial("x^2 + 3*w*v", s);
  CHECK(p.degree_in(Role::noise) == 1);
  CHECK(p.depends_on(Role::input));
  const auto t = make_space(VariableSpace::from_names({"y", "x"}, {"w"}, {"v"}));
  const auto r = p.rebase(t);
  CHECK(r.eval(std::vector{0.0, 2.0, 1.0, 1.0}) == doctest::Approx(7.0));
  CHECK_THROWS_AS(p.rebase(make_space(VariableSpace::from_names({"x"}))), InputError);
}
