#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "bcert/boxes.hpp"

namespace bcert {

struct GridConfig {
  double resolution = 0.0;          // spacing h; 0 means points_per_dim per box
  std::size_t points_per_dim = 50;
  std::size_t max_points = 1'000'000;  // beyond this, Latin-hypercube sampling
  std::size_t refine_starts = 8;       // refinement from the k worst points
  std::size_t refine_sweeps = 200;
  std::size_t max_counterexamples = 1;
  std::uint64_t seed = 0x5eed;
};

// Column-major point cloud. box_of[i] names the source box of point i.
struct PointSet {
  std::size_t dim = 0;
  std::vector<std::vector<double>> cols;
  std::vector<std::uint32_t> box_of;
  bool sampled = false;  // true when the cap forced Latin-hypercube sampling
  double resolution = 0.0;

  std::size_t size() const { return box_of.size(); }
  std::vector<double> point(std::size_t i) const;
  std::vector<const double*> column_ptrs(std::size_t offset = 0) const;
};

// Axis points lo, lo + h, lo + 2h, ... followed by hi. Halving h yields a
// superset, so grids at h and h/2 are nested.
std::vector<double> grid_axis(double lo, double hi, double h);

PointSet grid_points(const Box& box, const GridConfig& cfg, std::uint64_t salt = 0);
PointSet grid_points(const BoxSet& set, const GridConfig& cfg, std::uint64_t salt = 0);

// Pairs every box of a with every box of b; coordinates of a come first.
BoxSet product(const BoxSet& a, const BoxSet& b);

// n points: the box corners when 2^dim <= n, the rest a Latin-hypercube
// sample stored first.
PointSet latin_hypercube(const Box& box, std::size_t n, std::uint64_t seed);

struct RefineResult {
  std::vector<double> point;
  double value;
};

// Coordinate descent minimizing f inside the box, starting at `start` with
// initial step `step` halved whenever a sweep makes no progress.
RefineResult refine_min(const std::function<double(std::span<const double>)>& f, const Box& box,
                        std::vector<double> start, double step, std::size_t sweeps);

}  // namespace bcert
