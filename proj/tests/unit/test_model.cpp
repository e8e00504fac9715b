#include <random>

#include "doctest.h"

#include "bcert/errors.hpp"
#include "bcert/fixtures.hpp"
#include "bcert/model.hpp"

using namespace bcert;

namespace {

bool has_condition(const std::vector<Violation>& v, const std::string& cond) {
  return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.condition == cond; });
}

}  // namespace

TEST_CASE("fixture rings validate") {
  for (std::size_t n : {2u, 3u, 10u}) {
    const auto room = room_temp(n);
    CHECK(validate_network(room.net).empty());
    CHECK(two_mode(n).net.size() == n);
    CHECK_FALSE(has_errors(validate_network(two_mode(n).net)));
  }
  CHECK_THROWS_AS(room_temp(1), InputError);
  CHECK_THROWS_AS(make_fixture("nope", 3), InputError);
}

TEST_CASE("flattened room ring") {
  const auto f = flatten(room_temp(3).net);
  CHECK(f.state_dim() == 3);
  CHECK(f.noise_dim() == 3);
  REQUIRE(f.mode_count().has_value());
  CHECK(*f.mode_count() == 343);
  CHECK(f.dynamics_for(std::vector{1, 4, 7}).size() == 3);
  CHECK_FALSE(flatten(room_temp(40).net).mode_count().has_value());
}

TEST_CASE("flat step commutes with wired per-subsystem steps") {
  std::mt19937_64 rng(3);
  for (const auto& fx : {room_temp(3), two_mode(4)}) {
    const auto& net = fx.net;
    const auto flat = flatten(net);
    const Wiring wiring(net);
    const int m = net.subsystems[0].mode_count();
    std::uniform_int_distribution<int> pick(1, m);
    std::normal_distribution<double> z;
    for (int draw = 0; draw < 100; ++draw) {
      std::vector<std::vector<double>> xs(net.size());
      std::vector<double> xflat, vflat;
      std::vector<std::vector<double>> vs(net.size());
      std::vector<int> modes(net.size());
      for (std::size_t i = 0; i < net.size(); ++i) {
        const Box hull = net.subsystems[i].X.hull();
        for (std::size_t d = 0; d < hull.dim(); ++d) {
          std::uniform_real_distribution<double> u(hull[d].lo, hull[d].hi);
          xs[i].push_back(u(rng));
        }
        for (std::size_t d = 0; d < net.subsystems[i].noise_dim(); ++d) vs[i].push_back(z(rng));
        modes[i] = pick(rng);
        xflat.insert(xflat.end(), xs[i].begin(), xs[i].end());
        vflat.insert(vflat.end(), vs[i].begin(), vs[i].end());
      }
      const auto next = flat.step(xflat, modes, vflat);
      std::size_t off = 0;
      for (std::size_t i = 0; i < net.size(); ++i) {
        const auto xi = net.subsystems[i].step(modes[i], xs[i], wiring.inputs(i, xs), vs[i]);
        for (double v : xi) CHECK(next[off++] == doctest::Approx(v).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("validation reports each broken rule") {
  auto base = two_mode(3).net;
  {
    auto net = base;
    net.subsystems[1].id = net.subsystems[0].id;
    CHECK(has_condition(validate_network(net), "duplicate-id"));
  }
  {
    auto net = base;
    net.edges.push_back({"sub1", "ghost", 0});
    CHECK(has_condition(validate_network(net), "edge-endpoint"));
  }
  {
    auto net = base;
    net.edges.push_back({"sub2", "sub2", 0});
    CHECK(has_condition(validate_network(net), "self-edge"));
  }
  {
    auto net = base;
    net.edges.pop_back();
    const auto v = validate_network(net);
    CHECK(has_condition(v, "dangling-output"));
    CHECK(has_condition(v, "input-gap"));
  }
  {
    auto net = base;
    net.edges[0].offset = 1;
    CHECK(has_condition(validate_network(net), "dimension-mismatch"));
  }
  {
    auto net = base;
    net.subsystems[0].X0 = BoxSet::single(Box({{-100, 100}, {0, 1}}));
    CHECK(has_condition(validate_network(net), "initial-set"));
  }
  {
    auto net = base;
    net.subsystems[0].noise.clear();
    CHECK(has_condition(validate_network(net), "noise"));
  }
  {
    auto net = base;
    net.subsystems[1].W = BoxSet::single(Box({{-0.5, 0.5}, {-0.5, 0.5}}));
    const auto v = validate_network(net);
    CHECK(has_condition(v, "range-containment"));
    CHECK_FALSE(has_errors(v));
  }
}

TEST_CASE("builder rejects unknown variables") {
  SubsystemBuilder b;
  b.id = "s";
  b.state = {"x"};
  b.modes = {{"0.5*x + y"}};
  b.X = BoxSet::single(Box({{-1, 1}}));
  b.X0 = b.X;
  b.X1 = BoxSet(1);
  b.W = BoxSet(0);
  CHECK_THROWS_AS(b.build(), InputError);
}
