#include "bcert/compose.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "bcert/errors.hpp"

namespace bcert {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kExpTol = 1e-12;
}  // namespace

bool GainDigraph::linear() const {
  return std::all_of(edges.begin(), edges.end(),
                     [](const GainEdge& e) { return e.gain.is_zero() || std::abs(e.gain.exp - 1.0) <= kExpTol; });
}

GainDigraph build_gain_digraph(const NetworkSpec& net, std::span<const ApbcCertificate> apbcs) {
  if (apbcs.size() != net.size()) throw InputError("one APBC per subsystem is required");
  GainDigraph g;
  for (std::size_t i = 0; i < net.size(); ++i) {
    g.ids.push_back(net.subsystems[i].id);
    g.self_gain.push_back(apbcs[i].constants.kappa);
  }
  for (const auto& e : net.edges) {
    const auto i = net.index_of(e.to);
    const auto j = net.index_of(e.from);
    if (std::any_of(g.edges.begin(), g.edges.end(), [&](const GainEdge& x) { return x.to == i && x.from == j; }))
      continue;  // several slices from the same neighbor share one gain
    const auto& rho = apbcs[i].constants.rho;
    const auto& alpha = apbcs[j].constants.alpha;
    PowerLawFn gain = PowerLawFn::zero();
    if (!rho.is_zero()) {
      const double e_ij = rho.exp / alpha.exp;
      gain = {rho.coef / std::pow(alpha.coef, e_ij), e_ij};
    }
    g.edges.push_back({i, j, gain});
  }
  return g;
}

double max_cycle_mean(const GainDigraph& g, std::vector<std::size_t>* cycle) {
  const std::size_t n = g.size();
  if (cycle) cycle->clear();
  if (n == 0) return kNegInf;
  struct Arc {
    std::size_t u, v;
    double w;
  };
  std::vector<Arc> arcs;
  for (const auto& e : g.edges)
    if (!e.gain.is_zero()) arcs.push_back({e.from, e.to, std::log(e.gain.coef)});
  if (arcs.empty()) return kNegInf;

  // D[k][v]: max weight of a k-arc walk ending at v from any start.
  std::vector<std::vector<double>> D(n + 1, std::vector<double>(n, kNegInf));
  std::vector<std::vector<std::size_t>> pred(n + 1, std::vector<std::size_t>(n, n));
  std::fill(D[0].begin(), D[0].end(), 0.0);
  for (std::size_t k = 1; k <= n; ++k)
    for (const auto& a : arcs) {
      if (D[k - 1][a.u] == kNegInf) continue;
      const double v = D[k - 1][a.u] + a.w;
      if (v > D[k][a.v]) {
        D[k][a.v] = v;
        pred[k][a.v] = a.u;
      }
    }
  double best = kNegInf;
  std::size_t best_v = n;
  for (std::size_t v = 0; v < n; ++v) {
    if (D[n][v] == kNegInf) continue;
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
      if (D[k][v] == kNegInf) continue;
      worst = std::min(worst, (D[n][v] - D[k][v]) / static_cast<double>(n - k));
    }
    if (worst > best) {
      best = worst;
      best_v = v;
    }
  }
  if (best_v == n) return kNegInf;

  if (cycle) {
    // The n-arc walk into best_v repeats a node; among the cycles it
    // contains, report the one with the largest mean.
    std::vector<std::size_t> walk(n + 1);
    walk[n] = best_v;
    for (std::size_t k = n; k > 0; --k) walk[k - 1] = pred[k][walk[k]];
    std::map<std::pair<std::size_t, std::size_t>, double> arc_weight;
    for (const auto& a : arcs) {
      auto [it, fresh] = arc_weight.try_emplace({a.u, a.v}, a.w);
      if (!fresh) it->second = std::max(it->second, a.w);
    }
    auto weight = [&](std::size_t u, std::size_t v) { return arc_weight.at({u, v}); };
    double best_mean = kNegInf;
    for (std::size_t a = 0; a <= n; ++a)
      for (std::size_t b = a + 1; b <= n; ++b) {
        if (walk[a] != walk[b]) continue;
        double sum = 0.0;
        for (std::size_t t = a; t < b; ++t) sum += weight(walk[t], walk[t + 1]);
        const double mean = sum / static_cast<double>(b - a);
        if (mean > best_mean) {
          best_mean = mean;
          cycle->assign(walk.begin() + static_cast<std::ptrdiff_t>(a), walk.begin() + static_cast<std::ptrdiff_t>(b));
        }
        break;
      }
  }
  return best;
}

SmallGainResult small_gain_check(const GainDigraph& g) {
  if (!g.linear())
    throw CapabilityError(
        "cross gains with exponent != 1 are not supported; the pairwise sufficient check (every gain below the "
        "identity) applies only to linear gains");
  SmallGainResult r;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (!(g.self_gain[i] < 1.0)) {
      r.satisfied = false;
      r.cycle = {i};
      r.max_cycle_mean = std::log(g.self_gain[i]);
      r.reason = "self gain of '" + g.ids[i] + "' is " + std::to_string(g.self_gain[i]) + " >= 1";
      return r;
    }
  std::vector<std::size_t> cyc;
  r.max_cycle_mean = max_cycle_mean(g, &cyc);
  r.satisfied = r.max_cycle_mean < 0.0;
  if (!r.satisfied) {
    r.cycle = cyc;
    r.reason = "cycle with geometric-mean gain " + std::to_string(std::exp(r.max_cycle_mean)) + " >= 1";
  }
  return r;
}

bool pairwise_gain_check(const GainDigraph& g) {
  for (double k : g.self_gain)
    if (!(k < 1.0)) return false;
  return std::all_of(g.edges.begin(), g.edges.end(), [](const GainEdge& e) { return e.gain.coef < 1.0; });
}

double scaled_cross_gain(const GainDigraph& g, std::span<const double> s) {
  double m = 0.0;
  for (const auto& e : g.edges) m = std::max(m, e.gain.coef * s[e.from] / s[e.to]);
  return m;
}

std::vector<double> find_sigma(const GainDigraph& g) {
  const auto sg = small_gain_check(g);
  if (!sg.satisfied) throw InputError("small-gain condition violated: " + sg.reason);
  const std::size_t n = g.size();
  std::vector<double> s(n, 1.0);
  if (scaled_cross_gain(g, s) < 1.0 - kMarginTolerance) return s;

  // Longest-path potentials on log c + slack; the shifted graph has negative
  // cycle means, so Bellman-Ford converges within n rounds.
  const double slack = std::isfinite(sg.max_cycle_mean) ? -0.5 * sg.max_cycle_mean : 1.0;
  std::vector<double> pi(n, 0.0);
  for (std::size_t round = 0; round < n; ++round) {
    bool changed = false;
    for (const auto& e : g.edges) {
      if (e.gain.is_zero()) continue;
      const double cand = pi[e.from] + std::log(e.gain.coef) + slack;
      if (cand > pi[e.to]) {
        pi[e.to] = cand;
        changed = true;
      }
    }
    if (!changed) break;
  }
  const double top = *std::max_element(pi.begin(), pi.end());
  for (std::size_t i = 0; i < n; ++i) s[i] = std::exp(pi[i] - top);
  if (!(scaled_cross_gain(g, s) < 1.0 - kMarginTolerance))
    throw InputError("scaling search failed to meet c_ij s_j / s_i < 1");
  return s;
}

UnsafeSemantics default_semantics(std::span<const ApbcCertificate> apbcs) {
  for (const auto& a : apbcs)
    if (a.constants.lambda != apbcs.front().constants.lambda) return UnsafeSemantics::product;
  return UnsafeSemantics::union_;
}

AbcCertificate compose_abc(const NetworkSpec& net, std::span<const ApbcCertificate> apbcs,
                           std::span<const double> scalings, UnsafeSemantics semantics) {
  const std::size_t N = net.size();
  if (apbcs.size() != N || scalings.size() != N)
    throw InputError("composition needs one APBC and one scaling per subsystem");
  for (double s : scalings)
    if (!(s > 0.0)) throw InputError("scalings must be positive");
  const auto g = build_gain_digraph(net, apbcs);
  const auto sg = small_gain_check(g);
  if (!sg.satisfied) throw CompositionInfeasible("small-gain condition violated: " + sg.reason);
  const double cross = scaled_cross_gain(g, scalings);
  if (!(cross < 1.0)) throw CompositionInfeasible("scaled cross gain " + std::to_string(cross) + " is not below 1");

  AbcCertificate abc;
  abc.parts.assign(apbcs.begin(), apbcs.end());
  abc.scalings.assign(scalings.begin(), scalings.end());
  abc.semantics = semantics;
  auto& k = abc.constants;
  k.gamma = 0.0;
  k.kappa = cross;
  k.psi = 0.0;
  double lam_max = 0.0, lam_min = HUGE_VAL, alpha_min = HUGE_VAL;
  std::size_t arg_gamma = 0, arg_lmin = 0, arg_lmax = 0;
  for (std::size_t i = 0; i < N; ++i) {
    const auto& c = apbcs[i].constants;
    const double s = scalings[i];
    if (c.gamma / s > k.gamma || i == 0) {
      k.gamma = c.gamma / s;
      arg_gamma = i;
    }
    if (c.lambda / s > lam_max) {
      lam_max = c.lambda / s;
      arg_lmax = i;
    }
    if (c.lambda / s < lam_min) {
      lam_min = c.lambda / s;
      arg_lmin = i;
    }
    k.kappa = std::max(k.kappa, c.kappa);
    k.psi = std::max(k.psi, c.psi / s);
    alpha_min = std::min(alpha_min, c.alpha.coef / s);
  }
  if (!(lam_max > k.gamma))
    throw CompositionInfeasible("max scaled lambda (" + std::to_string(lam_max) + ", '" + net.subsystems[arg_lmax].id +
                                "') does not exceed max scaled gamma (" + std::to_string(k.gamma) + ", '" +
                                net.subsystems[arg_gamma].id + "')");
  if (semantics == UnsafeSemantics::union_ && !(lam_min > k.gamma))
    throw CompositionInfeasible("union semantics: min scaled lambda (" + std::to_string(lam_min) + ", '" +
                                net.subsystems[arg_lmin].id + "') does not exceed max scaled gamma (" +
                                std::to_string(k.gamma) + ", '" + net.subsystems[arg_gamma].id + "')");
  k.lambda = semantics == UnsafeSemantics::product ? lam_max : lam_min;
  k.alpha = {alpha_min, apbcs.front().constants.alpha.exp};
  k.rho = PowerLawFn::zero();
  return abc;
}

}  // namespace bcert
