#include "bcert/dwell.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "bcert/errors.hpp"
#include "bcert/kernels.hpp"

namespace bcert {

namespace {
constexpr double kVanish = 1e-12;
constexpr std::size_t kSkipListMax = 16;
}  // namespace

MuEstimate estimate_mu(std::span<const Polynomial> barriers, const BoxSet& X, const GridConfig& grid,
                       double inflation) {
  if (barriers.empty()) throw InputError("estimate_mu needs at least one barrier");
  MuEstimate est;
  const PointSet pts = grid_points(X, grid, 101);
  est.points = pts.size();
  est.sampled = pts.sampled;
  est.resolution = pts.resolution;
  const std::size_t M = barriers.size();
  const std::size_t n = pts.size();
  std::vector<std::vector<double>> vals(M, std::vector<double>(n));
  const auto cols = pts.column_ptrs();
  for (std::size_t p = 0; p < M; ++p) {
    kernels::eval_batch(kernels::EvalPlan(barriers[p]), cols, n, vals[p].data());
    for (std::size_t i = 0; i < n; ++i)
      if (vals[p][i] < -kMarginTolerance) {
        std::string where;
        for (double c : pts.point(i)) where += (where.empty() ? "" : ", ") + std::to_string(c);
        throw InputError("barrier of mode " + std::to_string(p + 1) + " is negative (" + std::to_string(vals[p][i]) +
                         ") at (" + where + ")");
      }
  }
  if (M == 1) return est;

  struct Cand {
    double ratio;
    std::size_t i, p, q;
  };
  std::vector<Cand> cands;
  for (std::size_t i = 0; i < n; ++i) {
    bool all_vanish = true;
    for (std::size_t p = 0; p < M; ++p) all_vanish = all_vanish && std::abs(vals[p][i]) < kVanish;
    if (all_vanish) {
      ++est.skipped;
      if (est.skip_list.size() < kSkipListMax) est.skip_list.push_back(pts.point(i));
      continue;
    }
    for (std::size_t p = 0; p < M; ++p)
      for (std::size_t q = 0; q < M; ++q) {
        if (p == q) continue;
        const double r = vals[q][i] < kVanish ? (vals[p][i] < kVanish ? 1.0 : HUGE_VAL) : vals[p][i] / vals[q][i];
        cands.push_back({r, i, p, q});
      }
  }
  if (cands.empty()) return est;
  const std::size_t k = std::min(cands.size(), std::max<std::size_t>(grid.refine_starts, 1));
  std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(k), cands.end(),
                    [](const Cand& a, const Cand& b) { return a.ratio > b.ratio || (a.ratio == b.ratio && a.i < b.i); });
  est.grid_max = std::max(1.0, cands.front().ratio);
  double best = cands.front().ratio;
  est.p = static_cast<int>(cands.front().p + 1);
  est.q = static_cast<int>(cands.front().q + 1);
  est.argmax = pts.point(cands.front().i);

  for (std::size_t s = 0; s < k; ++s) {
    const auto& c = cands[s];
    const auto& bp = barriers[c.p];
    const auto& bq = barriers[c.q];
    auto neg_ratio = [&](std::span<const double> x) {
      const double a = bp.eval(x), b = bq.eval(x);
      if (std::abs(a) < kVanish && std::abs(b) < kVanish) return 0.0;
      return b < kVanish ? -HUGE_VAL : -a / b;
    };
    const auto& box = X.boxes()[pts.box_of[c.i]];
    const auto r = refine_min(neg_ratio, box, pts.point(c.i), pts.resolution, grid.refine_sweeps);
    if (-r.value > best) {
      best = -r.value;
      est.p = static_cast<int>(c.p + 1);
      est.q = static_cast<int>(c.q + 1);
      est.argmax = r.point;
    }
  }
  est.mu = std::max(1.0, best);
  if (est.mu == 1.0 && best < 1.0) {
    est.p = est.q = 0;
    est.argmax.clear();
  }
  est.inflated = est.mu * (1.0 + inflation);
  return est;
}

double dwell_time_bound(double epsilon, double mu, std::span<const double> kappas) {
  if (!(epsilon > 1.0)) throw InputError("epsilon must exceed 1");
  if (!(mu >= 1.0)) throw InputError("mu must be at least 1");
  if (kappas.empty()) throw InputError("at least one kappa is required");
  double bound = 1.0;
  for (double k : kappas) {
    if (!(k > 0.0 && k < 1.0)) throw InputError("kappa_p must lie in (0, 1), got " + std::to_string(k));
    bound = std::max(bound, epsilon * std::log(mu) / std::log(1.0 / k) + 1.0);
  }
  return bound;
}

int min_dwell_time(double epsilon, double mu, std::span<const double> kappas) {
  const double b = dwell_time_bound(epsilon, mu, kappas);
  return std::max(1, static_cast<int>(std::ceil(b - 1e-9)));
}

std::vector<std::pair<double, int>> dwell_tradeoff(double mu, std::span<const double> kappas,
                                                   std::span<const double> epsilons) {
  std::vector<std::pair<double, int>> out;
  for (double e : epsilons) out.emplace_back(e, min_dwell_time(e, mu, kappas));
  return out;
}

LiftResult lift_to_apbc(std::span<const CbcCertificate> certs, const DwellParams& params) {
  if (certs.empty()) throw InputError("lift needs at least one per-mode certificate");
  std::map<int, const CbcCertificate*> by_mode;
  for (const auto& c : certs) {
    c.constants.validate();
    if (!by_mode.emplace(c.mode, &c).second) throw InputError("two certificates for mode " + std::to_string(c.mode));
  }
  const int M = static_cast<int>(by_mode.size());
  if (by_mode.begin()->first != 1 || by_mode.rbegin()->first != M)
    throw InputError("per-mode certificates must cover modes 1.." + std::to_string(M));

  const double eps = params.epsilon;
  const int kd = params.k_d;
  std::vector<double> kappas;
  for (const auto& [p, c] : by_mode) kappas.push_back(c->constants.kappa);
  const double bound = dwell_time_bound(eps, params.mu, kappas);
  if (static_cast<double>(kd) < bound - 1e-9)
    throw InputError("k_d = " + std::to_string(kd) + " is below the required " + std::to_string(bound));

  const auto& first = by_mode.begin()->second->constants;
  bool rho_zero = true;
  double rho_exp = 0.0;
  for (const auto& [p, c] : by_mode) {
    if (c->constants.alpha.exp != first.alpha.exp)
      throw CapabilityError("alpha exponents differ across modes; pointwise min is not a power law");
    if (!c->constants.rho.is_zero()) {
      if (!rho_zero && c->constants.rho.exp != rho_exp)
        throw CapabilityError("rho exponents differ across modes; pointwise max is not a power law");
      rho_zero = false;
      rho_exp = c->constants.rho.exp;
    }
  }

  LiftResult out;
  auto& a = out.apbc;
  a.epsilon = eps;
  a.k_d = kd;
  auto& k = a.constants;
  k.gamma = 0.0;
  k.lambda = HUGE_VAL;
  k.kappa = 0.0;
  k.psi = 0.0;
  k.alpha = {HUGE_VAL, first.alpha.exp};
  k.rho = rho_zero ? PowerLawFn::zero() : PowerLawFn{0.0, rho_exp};
  for (const auto& [p, c] : by_mode) {
    const auto& ck = c->constants;
    const double kp = ck.kappa;
    a.barriers.push_back(c->barrier);
    a.mode_kappas.push_back(kp);
    k.gamma = std::max(k.gamma, std::pow(kp, -(kd - 1) / eps) * ck.gamma);
    k.lambda = std::min(k.lambda, ck.lambda);
    k.kappa = std::max(k.kappa, std::pow(kp, (eps - 1.0) / eps));
    k.psi = std::max(k.psi, std::pow(kp, -kd / eps) * ck.psi);
    k.alpha.coef = std::min(k.alpha.coef, ck.alpha.coef);
    if (!rho_zero) k.rho.coef = std::max(k.rho.coef, std::pow(kp, -kd / eps) * ck.rho.coef);
  }
  out.derivation = {
      {"gamma", "max_p kappa_p^(-(k_d-1)/eps) * gamma_p", k.gamma},
      {"lambda", "min_p lambda_p", k.lambda},
      {"kappa", "max_p kappa_p^((eps-1)/eps)", k.kappa},
      {"psi", "max_p kappa_p^(-k_d/eps) * psi_p", k.psi},
      {"rho.coef", "max_p kappa_p^(-k_d/eps) * rho_p.coef", k.rho.coef},
      {"alpha.coef", "min_p alpha_p.coef", k.alpha.coef},
      {"k_d bound", "max_p eps*ln(mu)/ln(1/kappa_p) + 1", bound},
  };
  return out;
}

ApbcCertificate apbc_from_common_barrier(const CbcCertificate& cert, int modes) {
  if (modes < 1) throw InputError("mode count must be positive");
  cert.constants.validate();
  ApbcCertificate a;
  a.barriers.assign(static_cast<std::size_t>(modes), cert.barrier);
  a.mode_kappas.assign(static_cast<std::size_t>(modes), cert.constants.kappa);
  a.epsilon = 2.0;
  a.k_d = 1;
  a.constants = cert.constants;
  a.verification = cert.verification;
  return a;
}

}  // namespace bcert
