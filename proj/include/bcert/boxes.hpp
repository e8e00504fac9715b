#pragma once

#include <span>
#include <string>
#include <vector>

#include "bcert/polynomial.hpp"

namespace bcert {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double x, double tol = 0.0) const { return x >= lo - tol && x <= hi + tol; }
  bool contains(const Interval& o, double tol = 0.0) const { return o.lo >= lo - tol && o.hi <= hi + tol; }
  bool operator==(const Interval&) const = default;

  friend Interval operator+(Interval a, Interval b) { return {a.lo + b.lo, a.hi + b.hi}; }
  friend Interval operator*(Interval a, Interval b);
  Interval pow(unsigned k) const;
  static Interval hull(Interval a, Interval b);
};

// Axis-aligned box; lo <= hi in every dimension.
class Box {
 public:
  Box() = default;
  explicit Box(std::vector<Interval> dims);

  std::size_t dim() const { return dims_.size(); }
  const Interval& operator[](std::size_t i) const { return dims_[i]; }
  std::span<const Interval> intervals() const { return dims_; }

  bool contains(std::span<const double> x, double tol = 0.0) const;
  bool contains(const Box& o, double tol = 0.0) const;
  double volume() const;
  double max_abs() const;  // max |coordinate| over the box (infinity-norm radius)
  std::vector<double> center() const;
  void clamp(std::span<double> x) const;
  Box slice(std::size_t offset, std::size_t len) const;

  bool operator==(const Box&) const = default;

 private:
  std::vector<Interval> dims_;
};

// Finite union of boxes of equal dimension. May be empty (no boxes).
class BoxSet {
 public:
  BoxSet() = default;
  explicit BoxSet(std::size_t dim) : dim_(dim) {}
  BoxSet(std::size_t dim, std::vector<Box> boxes);
  static BoxSet single(Box b);

  std::size_t dim() const { return dim_; }
  bool empty() const { return boxes_.empty(); }
  std::span<const Box> boxes() const { return boxes_; }
  void add(Box b);

  bool contains(std::span<const double> x, double tol = 0.0) const;
  // Every box of `o` lies inside a single box of this set (sufficient check).
  bool contains(const BoxSet& o, double tol = 0.0) const;
  Box hull() const;
  double volume() const;  // sum of box volumes (overlap counted twice)
  double max_abs() const;

  bool operator==(const BoxSet&) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<Box> boxes_;
};

// Cartesian product of two boxes.
Box product(const Box& a, const Box& b);

// Natural interval extension of p over a box (one interval per variable of
// p's space). Over-approximates the true range.
Interval range_bound(const Polynomial& p, std::span<const Interval> domain);

}  // namespace bcert
