#pragma once

#include <span>
#include <variant>
#include <vector>

#include "bcert/polynomial.hpp"

namespace bcert {

struct Gaussian {
  double mean = 0.0;
  double std = 1.0;
  bool operator==(const Gaussian&) const = default;
};

struct Uniform {
  double lo = -1.0;
  double hi = 1.0;
  bool operator==(const Uniform&) const = default;
};

// Distribution of one scalar noise component. Components are independent.
class NoiseSpec {
 public:
  static constexpr unsigned kMaxMomentDegree = 64;

  NoiseSpec() = default;
  NoiseSpec(Gaussian g);
  NoiseSpec(Uniform u);

  static NoiseSpec standard_gaussian() { return NoiseSpec(Gaussian{0.0, 1.0}); }

  bool is_gaussian() const { return std::holds_alternative<Gaussian>(dist_); }
  const Gaussian& gaussian() const { return std::get<Gaussian>(dist_); }
  const Uniform& uniform() const { return std::get<Uniform>(dist_); }

  double mean() const;
  double stddev() const;
  double raw_moment(unsigned k) const;  // E[v^k]; throws CapabilityError past kMaxMomentDegree

  // Maps a standard-uniform pair / standard-normal draw to this distribution.
  double from_standard(double standard_normal, double standard_uniform) const;

  bool operator==(const NoiseSpec& o) const { return dist_ == o.dist_; }

 private:
  std::variant<Gaussian, Uniform> dist_ = Gaussian{};
};

// Replaces every noise monomial by the product of raw moments of its
// components. `noise[i]` describes the noise variable with role index i.
// The result lives in the space with the noise variables removed.
Polynomial expectation_over_noise(const Polynomial& p, std::span<const NoiseSpec> noise);

// As above but keeps the input space (noise exponents become zero). Useful
// when the caller wants to keep evaluating at full-length points.
Polynomial expectation_in_place(const Polynomial& p, std::span<const NoiseSpec> noise);

}  // namespace bcert
