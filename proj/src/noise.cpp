#include "bcert/noise.hpp"

#include <cmath>
#include <string>

#include "bcert/errors.hpp"

namespace bcert {

NoiseSpec::NoiseSpec(Gaussian g) : dist_(g) {
  if (!(g.std >= 0.0) || !std::isfinite(g.mean)) throw InputError("gaussian noise needs finite mean and std >= 0");
}

NoiseSpec::NoiseSpec(Uniform u) : dist_(u) {
  if (!(u.lo <= u.hi) || !std::isfinite(u.lo) || !std::isfinite(u.hi))
    throw InputError("uniform noise needs finite lo <= hi");
}

double NoiseSpec::mean() const {
  if (is_gaussian()) return gaussian().mean;
  return 0.5 * (uniform().lo + uniform().hi);
}

double NoiseSpec::stddev() const {
  if (is_gaussian()) return gaussian().std;
  return (uniform().hi - uniform().lo) / std::sqrt(12.0);
}

namespace {

// E[Z^k] for standard normal Z: (k-1)!! for even k, 0 for odd k.
double standard_normal_moment(unsigned k) {
  if (k % 2 == 1) return 0.0;
  double m = 1.0;
  for (unsigned j = k; j > 1; j -= 2) m *= static_cast<double>(j - 1);
  return m;
}

double binomial(unsigned n, unsigned k) {
  double r = 1.0;
  for (unsigned i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

}  // namespace

double NoiseSpec::raw_moment(unsigned k) const {
  if (k > kMaxMomentDegree)
    throw CapabilityError("noise moment of degree " + std::to_string(k) + " exceeds supported maximum " +
                          std::to_string(kMaxMomentDegree));
  if (k == 0) return 1.0;
  if (is_gaussian()) {
    const auto& g = gaussian();
    // E[(m + sZ)^k] = sum_j C(k,j) m^(k-j) s^j E[Z^j]
    double sum = 0.0;
    for (unsigned j = 0; j <= k; j += 2)
      sum += binomial(k, j) * std::pow(g.mean, static_cast<double>(k - j)) * std::pow(g.std, static_cast<double>(j)) *
             standard_normal_moment(j);
    return sum;
  }
  const auto& u = uniform();
  if (u.hi == u.lo) return std::pow(u.lo, static_cast<double>(k));
  const double kp1 = static_cast<double>(k + 1);
  return (std::pow(u.hi, kp1) - std::pow(u.lo, kp1)) / (kp1 * (u.hi - u.lo));
}

double NoiseSpec::from_standard(double standard_normal, double standard_uniform) const {
  if (is_gaussian()) return gaussian().mean + gaussian().std * standard_normal;
  return uniform().lo + (uniform().hi - uniform().lo) * standard_uniform;
}

namespace {

template <class Emit>
void integrate_noise(const Polynomial& p, std::span<const NoiseSpec> noise, Emit&& emit) {
  const auto& space = *p.space();
  const auto noise_pos = space.positions(Role::noise);
  if (noise.size() < noise_pos.size())
    throw InputError("expectation needs " + std::to_string(noise_pos.size()) + " noise specs, got " +
                     std::to_string(noise.size()));
  for (const auto& [e, c] : p.terms()) {
    double factor = 1.0;
    for (std::size_t k = 0; k < noise_pos.size(); ++k) {
      const auto pos = noise_pos[k];
      if (e[pos] > 0) factor *= noise[space[pos].index].raw_moment(e[pos]);
    }
    emit(e, c * factor);
  }
}

}  // namespace

Polynomial expectation_over_noise(const Polynomial& p, std::span<const NoiseSpec> noise) {
  const auto& space = *p.space();
  auto reduced = make_space(space.without(Role::noise));
  std::vector<std::size_t> keep;
  for (std::size_t v = 0; v < space.size(); ++v)
    if (space[v].role != Role::noise) keep.push_back(v);
  Polynomial out(reduced);
  Exponents r(keep.size());
  integrate_noise(p, noise, [&](const Exponents& e, double c) {
    for (std::size_t i = 0; i < keep.size(); ++i) r[i] = e[keep[i]];
    out.add_term(r, c);
  });
  return out;
}

Polynomial expectation_in_place(const Polynomial& p, std::span<const NoiseSpec> noise) {
  const auto noise_pos = p.space()->positions(Role::noise);
  Polynomial out(p.space());
  Exponents r;
  integrate_noise(p, noise, [&](const Exponents& e, double c) {
    r = e;
    for (auto pos : noise_pos) r[pos] = 0;
    out.add_term(r, c);
  });
  return out;
}

}  // namespace bcert
