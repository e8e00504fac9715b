#include <set>

#include "doctest.h"

#include "bcert/grid.hpp"

using namespace bcert;

TEST_CASE("grid axes are nested under halving") {
  for (double h : {0.3, 0.25, 0.1, 0.07}) {
    const auto a = grid_axis(-1.0, 2.0, h);
    const auto b = grid_axis(-1.0, 2.0, h / 2);
    CHECK(a.front() == -1.0);
    CHECK(a.back() == 2.0);
    const std::set<double> fine(b.begin(), b.end());
    for (double v : a) CHECK(fine.count(v) == 1);
    for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i] - a[i - 1] <= h + 1e-12);
  }
  CHECK(grid_axis(3.0, 3.0, 0.1).size() == 1);
}

TEST_CASE("box grids cover every box and respect the cap") {
  GridConfig cfg;
  cfg.points_per_dim = 5;
  const BoxSet s(2, {Box({{0, 1}, {0, 1}}), Box({{2, 3}, {-1, 0}})});
  const auto pts = grid_points(s, cfg);
  CHECK(pts.size() == 50);
  CHECK_FALSE(pts.sampled);
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK(s.boxes()[pts.box_of[i]].contains(pts.point(i)));

  cfg.max_points = 20;
  const auto capped = grid_points(s, cfg);
  CHECK(capped.sampled);
  CHECK(capped.size() <= 20 + 8);
  for (std::size_t i = 0; i < capped.size(); ++i) CHECK(s.contains(capped.point(i)));
}

TEST_CASE("latin hypercube stratifies every axis") {
  const Box b({{0, 1}, {-2, 2}, {5, 6}});
  const std::size_t n = 40;
  const auto pts = latin_hypercube(b, n, 17);
  REQUIRE(pts.size() == n);
  const std::size_t m = n - 8;  // the last eight points are the corners
  for (std::size_t d = 0; d < 3; ++d) {
    std::set<std::size_t> strata;
    for (std::size_t i = 0; i < m; ++i) {
      const double t = (pts.cols[d][i] - b[d].lo) / b[d].width();
      strata.insert(std::min<std::size_t>(m - 1, static_cast<std::size_t>(t * m)));
    }
    CHECK(strata.size() == m);
    for (std::size_t i = m; i < n; ++i) CHECK((pts.cols[d][i] == b[d].lo || pts.cols[d][i] == b[d].hi));
  }
  const auto again = latin_hypercube(b, n, 17);
  CHECK(again.cols == pts.cols);
}

TEST_CASE("refinement finds an interior minimum") {
  const Box b({{-2, 2}, {-2, 2}});
  const auto r = refine_min([](std::span<const double> x) { return (x[0] - 0.3) * (x[0] - 0.3) + (x[1] + 1.1) * (x[1] + 1.1); },
                            b, {1.5, 1.5}, 0.5, 200);
  CHECK(r.value < 1e-10);
  CHECK(r.point[0] == doctest::Approx(0.3).epsilon(1e-4));
  const auto edge = refine_min([](std::span<const double> x) { return x[0]; }, b, {0.0, 0.0}, 0.5, 200);
  CHECK(edge.value == doctest::Approx(-2.0));
}

TEST_CASE("product of box sets") {
  const BoxSet a(1, {Box({{0, 1}}), Box({{2, 3}})});
  const BoxSet b(2, {Box({{0, 1}, {0, 1}})});
  const auto p = product(a, b);
  CHECK(p.dim() == 3);
  CHECK(p.boxes().size() == 2);
  CHECK(p.volume() == doctest::Approx(2.0));
}
