#include "bcert/boxes.hpp"

#include <algorithm>
#include <cmath>

#include "bcert/errors.hpp"

namespace bcert {

Interval operator*(Interval a, Interval b) {
  const double p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  return {*std::min_element(p, p + 4), *std::max_element(p, p + 4)};
}

Interval Interval::pow(unsigned k) const {
  if (k == 0) return {1.0, 1.0};
  const double a = std::pow(lo, k);
  const double b = std::pow(hi, k);
  if (k % 2 == 1) return {a, b};
  if (lo >= 0.0) return {a, b};
  if (hi <= 0.0) return {b, a};
  return {0.0, std::max(a, b)};
}

Interval Interval::hull(Interval a, Interval b) { return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)}; }

Box::Box(std::vector<Interval> dims) : dims_(std::move(dims)) {
  for (std::size_t i = 0; i < dims_.size(); ++i)
    if (!(dims_[i].lo <= dims_[i].hi))
      throw InputError("box interval " + std::to_string(i) + " has lo > hi (" + std::to_string(dims_[i].lo) + ", " +
                       std::to_string(dims_[i].hi) + ")");
}

bool Box::contains(std::span<const double> x, double tol) const {
  if (x.size() != dims_.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!dims_[i].contains(x[i], tol)) return false;
  return true;
}

bool Box::contains(const Box& o, double tol) const {
  if (o.dim() != dim()) return false;
  for (std::size_t i = 0; i < dims_.size(); ++i)
    if (!dims_[i].contains(o.dims_[i], tol)) return false;
  return true;
}

double Box::volume() const {
  double v = 1.0;
  for (const auto& d : dims_) v *= d.width();
  return v;
}

double Box::max_abs() const {
  double m = 0.0;
  for (const auto& d : dims_) m = std::max({m, std::abs(d.lo), std::abs(d.hi)});
  return m;
}

std::vector<double> Box::center() const {
  std::vector<double> c;
  c.reserve(dims_.size());
  for (const auto& d : dims_) c.push_back(d.mid());
  return c;
}

void Box::clamp(std::span<double> x) const {
  for (std::size_t i = 0; i < dims_.size(); ++i) x[i] = std::clamp(x[i], dims_[i].lo, dims_[i].hi);
}

Box Box::slice(std::size_t offset, std::size_t len) const {
  if (offset + len > dims_.size()) throw InputError("box slice out of range");
  return Box(std::vector<Interval>(dims_.begin() + static_cast<long>(offset),
                                   dims_.begin() + static_cast<long>(offset + len)));
}

BoxSet::BoxSet(std::size_t dim, std::vector<Box> boxes) : dim_(dim) {
  for (auto& b : boxes) add(std::move(b));
}

BoxSet BoxSet::single(Box b) {
  BoxSet s(b.dim());
  s.add(std::move(b));
  return s;
}

void BoxSet::add(Box b) {
  if (b.dim() != dim_)
    throw InputError("box of dimension " + std::to_string(b.dim()) + " added to set of dimension " +
                     std::to_string(dim_));
  boxes_.push_back(std::move(b));
}

bool BoxSet::contains(std::span<const double> x, double tol) const {
  return std::any_of(boxes_.begin(), boxes_.end(), [&](const Box& b) { return b.contains(x, tol); });
}

bool BoxSet::contains(const BoxSet& o, double tol) const {
  if (o.dim_ != dim_) return false;
  return std::all_of(o.boxes_.begin(), o.boxes_.end(), [&](const Box& ob) {
    return std::any_of(boxes_.begin(), boxes_.end(), [&](const Box& b) { return b.contains(ob, tol); });
  });
}

Box BoxSet::hull() const {
  if (boxes_.empty()) throw InputError("hull of an empty box set");
  std::vector<Interval> h(boxes_.front().intervals().begin(), boxes_.front().intervals().end());
  for (const auto& b : boxes_)
    for (std::size_t i = 0; i < dim_; ++i) h[i] = Interval::hull(h[i], b[i]);
  return Box(std::move(h));
}

double BoxSet::volume() const {
  double v = 0.0;
  for (const auto& b : boxes_) v += b.volume();
  return v;
}

double BoxSet::max_abs() const {
  double m = 0.0;
  for (const auto& b : boxes_) m = std::max(m, b.max_abs());
  return m;
}

Box product(const Box& a, const Box& b) {
  std::vector<Interval> d(a.intervals().begin(), a.intervals().end());
  d.insert(d.end(), b.intervals().begin(), b.intervals().end());
  return Box(std::move(d));
}

Interval range_bound(const Polynomial& p, std::span<const Interval> domain) {
  if (domain.size() != p.space()->size()) throw InputError("range_bound: domain dimension mismatch");
  Interval r{0.0, 0.0};
  for (const auto& [e, c] : p.terms()) {
    Interval t{c, c};
    for (std::size_t v = 0; v < e.size(); ++v)
      if (e[v] > 0) t = t * domain[v].pow(e[v]);
    r = r + t;
  }
  return r;
}

}  // namespace bcert
