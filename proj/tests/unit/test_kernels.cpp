#include <cstring>
#include <random>

#include "doctest.h"

#include "bcert/kernels.hpp"
#include "bcert/parse.hpp"

using namespace bcert;
using namespace bcert::kernels;

namespace {

Polynomial random_poly(std::mt19937_64& rng, const SpacePtr& s) {
  std::uniform_int_distribution<int> e(0, 4), nt(1, 12);
  std::uniform_real_distribution<double> c(-3.0, 3.0);
  Polynomial p(s);
  const int terms = nt(rng);
  for (int t = 0; t < terms; ++t) {
    Exponents ex(s->size());
    for (auto& v : ex) v = static_cast<std::uint16_t>(e(rng));
    p.add_term(ex, c(rng));
  }
  return p;
}

}  // namespace

TEST_CASE("eval_batch scalar reference agrees with Polynomial::eval") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const auto s = make_space(VariableSpace::from_names({"a", "b", "c"}));
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = random_poly(rng, s);
    const EvalPlan plan(p);
    const std::size_t n = 37;
    std::vector<std::vector<double>> cols(3, std::vector<double>(n));
    for (auto& c : cols)
      for (auto& v : c) v = u(rng);
    std::vector<const double*> ptr{cols[0].data(), cols[1].data(), cols[2].data()};
    std::vector<double> out(n);
    eval_batch(plan, ptr, n, out.data(), Isa::scalar);
    for (std::size_t i = 0; i < n; ++i) {
      const std::vector<double> pt{cols[0][i], cols[1][i], cols[2][i]};
      CHECK(out[i] == doctest::Approx(p.eval(pt)).epsilon(1e-12).scale(1.0));
      CHECK(eval_point(plan, pt.data()) == out[i]);
    }
  }
}

TEST_CASE("SIMD variants are bit-identical to the scalar reference") {
  if (!isa_available(Isa::avx2)) {
    MESSAGE("AVX2 not available on this machine; equivalence test skipped");
    return;
  }
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  const auto s = make_space(VariableSpace::from_names({"a", "b", "c", "d"}));
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 8u, 63u, 1000u, 1027u}) {
    for (int trial = 0; trial < 10; ++trial) {
      const EvalPlan plan(random_poly(rng, s));
      std::vector<std::vector<double>> cols(4, std::vector<double>(n));
      for (auto& c : cols)
        for (auto& v : c) v = u(rng);
      std::vector<const double*> ptr;
      for (auto& c : cols) ptr.push_back(c.data());
      std::vector<double> a(n), b(n);
      eval_batch(plan, ptr, n, a.data(), Isa::scalar);
      eval_batch(plan, ptr, n, b.data(), Isa::avx2);
      CHECK(std::memcmp(a.data(), b.data(), n * sizeof(double)) == 0);
      abs_max_batch(ptr, n, a.data(), Isa::scalar);
      abs_max_batch(ptr, n, b.data(), Isa::avx2);
      CHECK(std::memcmp(a.data(), b.data(), n * sizeof(double)) == 0);
    }
  }
}

TEST_CASE("abs_max without columns is zero") {
  std::vector<double> out(5, 7.0);
  abs_max_batch({}, out.size(), out.data(), Isa::scalar);
  for (double v : out) CHECK(v == 0.0);
}
