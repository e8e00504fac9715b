#pragma once

// Independent reference computations for the test suites. Nothing here calls
// into the library's numeric engines.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace oracle {

// Gauss-Hermite rule for E[g(Z)], Z ~ N(0, 1). Newton iteration on the
// physicists' Hermite recurrence, then rescaled to the probabilists' weight.
inline std::pair<std::vector<double>, std::vector<double>> gauss_hermite(int n) {
  std::vector<double> x(n), w(n);
  const double pim4 = std::pow(std::numbers::pi, -0.25);
  double z = 0.0;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    if (i == 0) z = std::sqrt(2.0 * n + 1) - 1.85575 * std::pow(2.0 * n + 1, -1.0 / 6);
    else if (i == 1) z -= 1.14 * std::pow(n, 0.426) / z;
    else if (i == 2) z = 1.86 * z - 0.86 * x[0];
    else if (i == 3) z = 1.91 * z - 0.91 * x[1];
    else z = 2.0 * z - x[i - 2];
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = pim4, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15) break;
    }
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = w[n - 1 - i] = 2.0 / (pp * pp);
  }
  for (int i = 0; i < n; ++i) {
    x[i] *= std::numbers::sqrt2;
    w[i] /= std::sqrt(std::numbers::pi);
  }
  return {x, w};
}

// E[g(Z)] for Z standard normal in `dim` dimensions, tensor rule with n nodes.
inline double gaussian_expectation(const std::function<double(std::span<const double>)>& g, std::size_t dim,
                                   int n = 20) {
  const auto [x, w] = gauss_hermite(n);
  std::vector<std::size_t> idx(dim, 0);
  std::vector<double> z(dim);
  double sum = 0.0;
  while (true) {
    double weight = 1.0;
    for (std::size_t d = 0; d < dim; ++d) {
      z[d] = x[idx[d]];
      weight *= w[idx[d]];
    }
    sum += weight * g(z);
    std::size_t d = 0;
    while (d < dim && ++idx[d] == static_cast<std::size_t>(n)) idx[d++] = 0;
    if (d == dim) break;
  }
  return sum;
}

inline double double_factorial(int k) {
  double r = 1.0;
  for (int i = k; i > 1; i -= 2) r *= i;
  return r;
}

// Maximum over all simple cycles of the mean arc weight, by enumeration.
inline double brute_max_cycle_mean(std::size_t n, const std::vector<std::tuple<std::size_t, std::size_t, double>>& arcs) {
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
  for (auto [u, v, w] : arcs) adj[u].push_back({v, w});
  double best = -HUGE_VAL;
  std::vector<bool> on(n, false);
  std::function<void(std::size_t, std::size_t, double, std::size_t)> dfs = [&](std::size_t start, std::size_t u,
                                                                               double sum, std::size_t len) {
    for (auto [v, w] : adj[u]) {
      if (v == start) best = std::max(best, (sum + w) / static_cast<double>(len + 1));
      else if (v > start && !on[v]) {
        on[v] = true;
        dfs(start, v, sum + w, len + 1);
        on[v] = false;
      }
    }
  };
  for (std::size_t s = 0; s < n; ++s) {
    on[s] = true;
    dfs(s, s, 0.0, 0);
    on[s] = false;
  }
  return best;
}

// Binomial tail P[X <= k] for X ~ Bin(n, p), summed directly.
inline double binom_cdf(std::size_t k, std::size_t n, double p) {
  double s = 0.0;
  for (std::size_t i = 0; i <= k; ++i)
    s += std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) + i * std::log(p) +
                  (n - i) * std::log1p(-p));
  return s;
}

// One-sided Clopper-Pearson upper limit by bisection on the binomial CDF.
inline double cp_upper(std::size_t k, std::size_t n, double conf = 0.95) {
  if (k >= n) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (binom_cdf(k, n, mid) > 1.0 - conf ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline double cp_lower(std::size_t k, std::size_t n, double conf = 0.95) {
  if (k == 0) return 0.0;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    // P[X >= k] = 1 - P[X <= k - 1] increases in p.
    (1.0 - binom_cdf(k - 1, n, mid) < 1.0 - conf ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Dwell-feasible switching signal of length T + 1 over modes 1..m.
inline std::vector<int> dwell_signal(std::mt19937_64& rng, std::size_t T, int m, int k_d, double switch_prob = 0.4) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> pick(1, m);
  std::vector<int> s(T + 1);
  s[0] = pick(rng);
  std::size_t last = 0;
  for (std::size_t k = 1; k <= T; ++k) {
    s[k] = s[k - 1];
    if (m > 1 && k - last >= static_cast<std::size_t>(k_d) && u(rng) < switch_prob) {
      while (s[k] == s[k - 1]) s[k] = pick(rng);
      last = k;
    }
  }
  return s;
}

}  // namespace oracle
