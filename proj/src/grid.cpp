#include "bcert/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "bcert/errors.hpp"

namespace bcert {

std::vector<double> PointSet::point(std::size_t i) const {
  std::vector<double> p(dim);
  for (std::size_t d = 0; d < dim; ++d) p[d] = cols[d][i];
  return p;
}

std::vector<const double*> PointSet::column_ptrs(std::size_t offset) const {
  std::vector<const double*> out(dim);
  for (std::size_t d = 0; d < dim; ++d) out[d] = cols[d].data() + offset;
  return out;
}

std::vector<double> grid_axis(double lo, double hi, double h) {
  if (!(h > 0.0)) throw InputError("grid resolution must be positive");
  std::vector<double> axis;
  if (hi <= lo) return {lo};
  const double tol = 1e-9 * h;
  for (std::size_t k = 0;; ++k) {
    const double v = lo + static_cast<double>(k) * h;
    if (v >= hi - tol) break;
    axis.push_back(v);
  }
  axis.push_back(hi);
  return axis;
}

namespace {

double unit_double(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

void append(PointSet& into, const PointSet& from, std::uint32_t box) {
  if (into.cols.empty()) into.cols.resize(from.dim);
  for (std::size_t d = 0; d < from.dim; ++d) into.cols[d].insert(into.cols[d].end(), from.cols[d].begin(), from.cols[d].end());
  into.box_of.insert(into.box_of.end(), from.size(), box);
  into.sampled = into.sampled || from.sampled;
  into.resolution = std::max(into.resolution, from.resolution);
}

}  // namespace

PointSet latin_hypercube(const Box& box, std::size_t n, std::uint64_t seed) {
  PointSet ps;
  ps.dim = box.dim();
  ps.cols.assign(ps.dim, {});
  ps.sampled = true;
  std::mt19937_64 rng(seed);
  const bool corners = ps.dim < 63 && (std::size_t{1} << ps.dim) <= n;
  const std::size_t ncorner = corners ? (std::size_t{1} << ps.dim) : 0;
  const std::size_t nlhs = n - ncorner;
  std::vector<std::size_t> perm(nlhs);
  for (std::size_t d = 0; d < ps.dim; ++d) {
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    auto& col = ps.cols[d];
    col.reserve(n);
    const auto& iv = box[d];
    for (std::size_t i = 0; i < nlhs; ++i)
      col.push_back(iv.lo + (static_cast<double>(perm[i]) + unit_double(rng)) / static_cast<double>(nlhs) * iv.width());
    for (std::size_t c = 0; c < ncorner; ++c) col.push_back(((c >> d) & 1u) ? iv.hi : iv.lo);
  }
  ps.box_of.assign(n, 0);
  double w = 0.0;
  for (std::size_t d = 0; d < ps.dim; ++d) w = std::max(w, box[d].width());
  ps.resolution = ps.dim == 0 ? 0.0 : w / std::pow(static_cast<double>(std::max<std::size_t>(nlhs, 1)), 1.0 / static_cast<double>(ps.dim));
  return ps;
}

PointSet grid_points(const Box& box, const GridConfig& cfg, std::uint64_t salt) {
  PointSet ps;
  ps.dim = box.dim();
  ps.cols.assign(ps.dim, {});
  if (ps.dim == 0) {
    ps.box_of.assign(1, 0);
    return ps;
  }
  std::vector<std::vector<double>> axes(ps.dim);
  double total = 1.0;
  for (std::size_t d = 0; d < ps.dim; ++d) {
    const auto& iv = box[d];
    double h = cfg.resolution;
    if (h <= 0.0) {
      if (cfg.points_per_dim < 2) throw InputError("points_per_dim must be at least 2");
      h = iv.width() / static_cast<double>(cfg.points_per_dim - 1);
      if (h <= 0.0) h = 1.0;
    }
    axes[d] = grid_axis(iv.lo, iv.hi, h);
    ps.resolution = std::max(ps.resolution, iv.width() > 0 ? h : 0.0);
    total *= static_cast<double>(axes[d].size());
  }
  if (total > static_cast<double>(cfg.max_points)) {
    auto lhs = latin_hypercube(box, cfg.max_points, cfg.seed ^ (salt * 0x9e3779b97f4a7c15ULL));
    lhs.resolution = std::max(lhs.resolution, ps.resolution);
    return lhs;
  }
  const auto n = static_cast<std::size_t>(total);
  for (auto& c : ps.cols) c.resize(n);
  std::vector<std::size_t> idx(ps.dim, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 0; d < ps.dim; ++d) ps.cols[d][i] = axes[d][idx[d]];
    for (std::size_t d = ps.dim; d-- > 0;) {  // last coordinate fastest: lexicographic order
      if (++idx[d] < axes[d].size()) break;
      idx[d] = 0;
    }
  }
  ps.box_of.assign(n, 0);
  return ps;
}

PointSet grid_points(const BoxSet& set, const GridConfig& cfg, std::uint64_t salt) {
  PointSet out;
  out.dim = set.dim();
  out.cols.assign(out.dim, {});
  if (set.empty()) return out;
  GridConfig per_box = cfg;
  per_box.max_points = std::max<std::size_t>(1, cfg.max_points / set.boxes().size());
  for (std::size_t b = 0; b < set.boxes().size(); ++b)
    append(out, grid_points(set.boxes()[b], per_box, salt * 131 + b), static_cast<std::uint32_t>(b));
  return out;
}

BoxSet product(const BoxSet& a, const BoxSet& b) {
  BoxSet out(a.dim() + b.dim());
  if (b.dim() == 0) return a;
  if (a.dim() == 0) return b;
  for (const auto& x : a.boxes())
    for (const auto& y : b.boxes()) out.add(product(x, y));
  return out;
}

RefineResult refine_min(const std::function<double(std::span<const double>)>& f, const Box& box,
                        std::vector<double> start, double step, std::size_t sweeps) {
  box.clamp(start);
  RefineResult best{start, f(start)};
  if (box.dim() == 0 || !(step > 0.0)) return best;
  const double min_step = step * 1e-6;
  std::vector<double> trial;
  for (std::size_t s = 0; s < sweeps && step >= min_step; ++s) {
    bool improved = false;
    for (std::size_t d = 0; d < box.dim(); ++d) {
      for (double dir : {-1.0, 1.0}) {
        trial = best.point;
        trial[d] = std::clamp(trial[d] + dir * step, box[d].lo, box[d].hi);
        if (trial[d] == best.point[d]) continue;
        const double v = f(trial);
        if (v < best.value) {
          best = {trial, v};
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

}  // namespace bcert
