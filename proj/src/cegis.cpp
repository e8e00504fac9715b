#include "bcert/cegis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>

#include "bcert/certify.hpp"
#include "bcert/errors.hpp"
#include "bcert/parallel.hpp"

namespace bcert {

namespace {

enum class Disjunct { kappa, rho, psi };

struct PoolPoint {
  int cond;  // 1..4
  std::vector<double> x, w;
  std::vector<double> phi;   // basis at x
  std::vector<double> ephi;  // expected basis at the successor (C4 only)
  double hnorm = 0.0, wnorm = 0.0;
};

// Row a.z <= b, stored normalized so that a.z - b is a signed distance.
struct Row {
  std::vector<double> a;
  double b;
};

// Variables: theta (nb), gamma, psi, rho coefficient.
struct Layout {
  std::size_t nb;
  std::size_t gamma() const { return nb; }
  std::size_t psi() const { return nb + 1; }
  std::size_t rho() const { return nb + 2; }
  std::size_t size() const { return nb + 3; }
};

void monomials(std::size_t n, unsigned degree, Exponents& cur, std::size_t var, unsigned left, std::vector<Exponents>& out) {
  if (var == n) {
    out.push_back(cur);
    return;
  }
  for (unsigned e = 0; e <= left; ++e) {
    cur[var] = static_cast<std::uint16_t>(e);
    monomials(n, degree, cur, var + 1, left - e, out);
  }
  cur[var] = 0;
}

struct Basis {
  std::vector<Polynomial> phi;   // over the state space
  std::vector<Polynomial> ephi;  // E[phi(f_p)] over the noise-free space
};

Basis make_basis(const SubsystemSpec& sys, int mode, unsigned degree) {
  const auto n = sys.state_dim();
  const Box hull = sys.X.hull();
  std::vector<Polynomial> u;
  for (std::size_t d = 0; d < n; ++d) {
    const double c = hull[d].mid();
    const double r = hull[d].width() > 0.0 ? 0.5 * hull[d].width() : 1.0;
    u.push_back((Polynomial::variable(sys.state_space, (*sys.state_space)[d].name) -
                 Polynomial::constant(sys.state_space, c)) *
                (1.0 / r));
  }
  std::vector<Exponents> exps;
  Exponents cur(n, 0);
  monomials(n, degree, cur, 0, degree, exps);
  Basis b;
  for (const auto& e : exps) {
    Polynomial m = Polynomial::constant(sys.state_space, 1.0);
    for (std::size_t d = 0; d < n; ++d)
      if (e[d]) m = m * u[d].pow(e[d]);
    b.phi.push_back(m);
    b.ephi.push_back(expected_barrier(sys, mode, m));
  }
  return b;
}

std::vector<double> eval_all(const std::vector<Polynomial>& ps, std::span<const double> pt) {
  std::vector<double> v;
  v.reserve(ps.size());
  for (const auto& p : ps) v.push_back(p.eval(pt));
  return v;
}

double dot(const std::vector<double>& a, const std::vector<double>& z, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * z[i];
  return s;
}

class Pool {
 public:
  Pool(const SubsystemSpec& sys, const Basis& basis) : sys_(sys), basis_(basis) {
    const auto& nf = *basis.ephi.front().space();
    for (const auto& v : nf.variables()) layout_.emplace_back(v.role, v.index);
  }

  void add(int cond, std::vector<double> x, std::vector<double> w) {
    PoolPoint p;
    p.cond = cond;
    p.phi = eval_all(basis_.phi, x);
    p.hnorm = sys_.output_norm(x);
    if (cond == 4) {
      std::vector<double> pt(layout_.size());
      for (std::size_t v = 0; v < layout_.size(); ++v)
        pt[v] = layout_[v].first == Role::state ? x[layout_[v].second] : w[layout_[v].second];
      p.ephi = eval_all(basis_.ephi, pt);
      for (double c : w) p.wnorm = std::max(p.wnorm, std::abs(c));
    }
    p.x = std::move(x);
    p.w = std::move(w);
    points_.push_back(std::move(p));
    choice_.push_back(Disjunct::psi);
  }

  std::size_t size() const { return points_.size(); }
  const std::vector<PoolPoint>& points() const { return points_; }
  std::vector<Disjunct>& choice() { return choice_; }

 private:
  const SubsystemSpec& sys_;
  const Basis& basis_;
  std::vector<std::pair<Role, std::size_t>> layout_;
  std::vector<PoolPoint> points_;
  std::vector<Disjunct> choice_;
};

struct Candidate {
  double kappa, lambda, alpha;
};

struct Bounds {
  std::vector<double> lo, hi;
  void project(std::vector<double>& z) const {
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = std::clamp(z[i], lo[i], hi[i]);
  }
};

void push_row(std::vector<Row>& rows, std::vector<double> a, double b) {
  double n = 0.0;
  for (double v : a) n += v * v;
  n = std::sqrt(n);
  if (n == 0.0) {
    // Constant row: either trivially true or unsatisfiable.
    rows.push_back({std::move(a), b >= 0.0 ? HUGE_VAL : b});
    return;
  }
  for (double& v : a) v /= n;
  rows.push_back({std::move(a), b / n});
}

std::vector<Row> build_rows(Pool& pool, const Layout& L, const Candidate& c, double tau, bool has_input,
                            const CegisConfig& cfg) {
  std::vector<Row> rows;
  const auto& pts = pool.points();
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const auto& p = pts[k];
    std::vector<double> a(L.size(), 0.0);
    switch (p.cond) {
      case 1:
        for (std::size_t i = 0; i < L.nb; ++i) a[i] = -p.phi[i];
        push_row(rows, std::move(a), -c.alpha * std::pow(p.hnorm, cfg.alpha_exp) - tau);
        break;
      case 2:
        for (std::size_t i = 0; i < L.nb; ++i) a[i] = p.phi[i];
        a[L.gamma()] = -1.0;
        push_row(rows, std::move(a), -tau);
        break;
      case 3:
        for (std::size_t i = 0; i < L.nb; ++i) a[i] = -p.phi[i];
        push_row(rows, std::move(a), -c.lambda - tau);
        break;
      default: {
        auto d = pool.choice()[k];
        if (d == Disjunct::rho && !has_input) d = Disjunct::psi;
        for (std::size_t i = 0; i < L.nb; ++i) a[i] = p.ephi[i] - (d == Disjunct::kappa ? c.kappa * p.phi[i] : 0.0);
        if (d == Disjunct::psi) a[L.psi()] = -1.0;
        if (d == Disjunct::rho) a[L.rho()] = -std::pow(p.wnorm, cfg.rho_exp);
        push_row(rows, std::move(a), -tau);
      }
    }
  }
  return rows;
}

struct LpResult {
  std::vector<double> z;
  double violation;
};

double max_violation(const std::vector<Row>& rows, const std::vector<double>& z, std::size_t* arg) {
  double worst = -HUGE_VAL;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double v = dot(rows[i].a, z, z.size()) - rows[i].b;
    if (v > worst) {
      worst = v;
      if (arg) *arg = i;
    }
  }
  return worst;
}

// Phase-1 feasibility by projected subgradient descent on the maximum row
// violation: each step projects onto the half-space of the worst row, then
// onto the variable box.
LpResult solve_phase1(const std::vector<Row>& rows, const Bounds& box, const std::vector<double>& start,
                      std::size_t iters, std::size_t restarts, std::uint64_t seed) {
  LpResult best{start, HUGE_VAL};
  std::mt19937_64 rng(seed);
  for (std::size_t r = 0; r < restarts; ++r) {
    std::vector<double> z = start;
    if (r > 0)
      for (std::size_t i = 0; i < z.size(); ++i) {
        std::uniform_real_distribution<double> u(box.lo[i], box.hi[i]);
        z[i] = 0.01 * u(rng);
      }
    box.project(z);
    std::size_t arg = 0;
    for (std::size_t k = 0; k < iters; ++k) {
      const double v = max_violation(rows, z, &arg);
      if (v < best.violation) best = {z, v};
      if (v <= 0.0) break;
      const double step = v * 1.5;  // over-relaxed projection, rows are unit-norm
      for (std::size_t i = 0; i < z.size(); ++i) z[i] -= step * rows[arg].a[i];
      box.project(z);
    }
    const double v = max_violation(rows, z, nullptr);
    if (v < best.violation) best = {z, v};
    if (best.violation <= 0.0) break;
  }
  return best;
}

CbcCertificate make_cert(const SubsystemSpec& sys, int mode, const Basis& basis, const Layout& L,
                         const std::vector<double>& z, const Candidate& c, const CegisConfig& cfg, bool has_input) {
  CbcCertificate cert;
  cert.mode = mode;
  Polynomial b(sys.state_space);
  for (std::size_t i = 0; i < L.nb; ++i) b += basis.phi[i] * z[i];
  cert.barrier = b;
  auto& k = cert.constants;
  k.kappa = c.kappa;
  k.lambda = c.lambda;
  k.gamma = std::max(0.0, z[L.gamma()]);
  k.psi = std::max(0.0, z[L.psi()]);
  k.alpha = {c.alpha, cfg.alpha_exp};
  k.rho = has_input && z[L.rho()] > 0.0 ? PowerLawFn{z[L.rho()], cfg.rho_exp} : PowerLawFn::zero();
  return cert;
}

double worst(const std::vector<CheckReport>& reps) {
  double m = HUGE_VAL;
  for (const auto& r : reps) m = std::min(m, r.worst_margin);
  return m;
}

struct CandidateOutcome {
  bool success = false;
  std::optional<CbcCertificate> cert;
  std::vector<CheckReport> reports;
  double margin = -HUGE_VAL;
  std::size_t iterations = 0;
  std::size_t pool = 0;
  std::vector<CegisLogEntry> log;
};

}  // namespace

CegisResult synthesize_cbc(const SubsystemSpec& sys, int mode, const CegisConfig& cfg) {
  if (mode < 1 || mode > sys.mode_count()) throw InputError("mode " + std::to_string(mode) + " out of range");
  if (cfg.kappa_grid.empty()) throw ConfigError("kappa grid is empty");
  for (double k : cfg.kappa_grid)
    if (!(k > 0.0 && k < 1.0)) throw ConfigError("kappa candidates must lie in (0, 1)");
  std::vector<double> lambdas = cfg.lambda_grid.empty() ? std::vector<double>{1.0} : cfg.lambda_grid;
  if (std::none_of(lambdas.begin(), lambdas.end(), [](double l) { return l > 0.0; }))
    throw ConfigError("no lambda candidate is positive, so lambda > gamma >= 0 is impossible");
  if (cfg.alpha_fractions.empty()) throw ConfigError("alpha grid is empty");
  if (!(cfg.alpha_exp > 0.0) || !(cfg.rho_exp > 0.0)) throw ConfigError("alpha and rho exponents must be positive");
  if (cfg.budget == 0) throw ConfigError("budget must be positive");

  const bool has_input = sys.input_dim() > 0;
  const Basis basis = make_basis(sys, mode, cfg.degree);
  const Layout L{basis.phi.size()};

  // Initial pool: Latin-hypercube points per conjunct domain.
  Pool seed_pool(sys, basis);
  auto seed_domain = [&](int cond, const BoxSet& dom, std::size_t nx) {
    const auto boxes = dom.boxes();
    for (std::size_t bi = 0; bi < boxes.size(); ++bi) {
      const auto n = std::max<std::size_t>(8, cfg.initial_pool / boxes.size());
      const auto ps = latin_hypercube(boxes[bi], n, cfg.seed * 1315423911ULL + static_cast<std::uint64_t>(cond * 97 + bi));
      for (std::size_t i = 0; i < ps.size(); ++i) {
        auto pt = ps.point(i);
        std::vector<double> x(pt.begin(), pt.begin() + static_cast<long>(nx));
        std::vector<double> w(pt.begin() + static_cast<long>(nx), pt.end());
        seed_pool.add(cond, std::move(x), std::move(w));
      }
    }
  };
  const auto nx = sys.state_dim();
  seed_domain(1, sys.X, nx);
  seed_domain(2, sys.X0, nx);
  seed_domain(3, sys.X1, nx);
  seed_domain(4, product(sys.X, sys.W), nx);

  double hmax = 0.0;
  for (const auto& p : seed_pool.points()) hmax = std::max(hmax, p.hnorm);
  for (const auto& b : sys.X.boxes())
    for (std::size_t d = 0; d < b.dim(); ++d) hmax = std::max(hmax, std::max(std::abs(b[d].lo), std::abs(b[d].hi)));
  hmax = std::max(hmax, 1.0);

  std::vector<Candidate> cands;
  for (double lam : lambdas) {
    if (!(lam > 0.0)) continue;
    for (double af : cfg.alpha_fractions)
      for (double k : cfg.kappa_grid) cands.push_back({k, lam, af * lam / std::pow(hmax, cfg.alpha_exp)});
  }
  const std::size_t per = std::max<std::size_t>(3, cfg.budget / cands.size());

  std::atomic<std::size_t> first_success{cands.size()};
  std::vector<CandidateOutcome> outcomes(cands.size());

  parallel_for(cands.size(), [&](std::size_t ci) {
    const Candidate& c = cands[ci];
    auto& out = outcomes[ci];
    Pool pool = seed_pool;
    const double tau = 1e-6 * c.lambda;
    Bounds box;
    box.lo.assign(L.size(), -1e3 * c.lambda);
    box.hi.assign(L.size(), 1e3 * c.lambda);
    box.lo[L.gamma()] = 0.0;
    box.hi[L.gamma()] = c.lambda * (1.0 - 1e-3);
    box.lo[L.psi()] = 0.0;
    box.hi[L.psi()] = cfg.psi_fraction * c.kappa * c.lambda;
    box.lo[L.rho()] = 0.0;
    box.hi[L.rho()] = has_input ? 1e3 * c.lambda : 0.0;
    std::vector<double> z(L.size(), 0.0);

    for (std::size_t it = 0; it < per; ++it) {
      if (first_success.load() < ci) return;  // a lower-index candidate already won
      const std::vector<Row> rows = build_rows(pool, L, c, tau, has_input, cfg);
      const auto lp = solve_phase1(rows, box, z, cfg.lp_iterations, cfg.lp_restarts,
                                   cfg.seed ^ (ci * 0x9e3779b97f4a7c15ULL) ^ (it + 1));
      z = lp.z;
      auto cert = make_cert(sys, mode, basis, L, z, c, cfg, has_input);
      auto reports = check_cbc(sys, cert, cfg.grid);
      record(cert.verification, reports);
      const double m = worst(reports);
      ++out.iterations;
      out.log.push_back({ci, c.kappa, c.lambda, c.alpha, it, pool.size(), lp.violation, m});
      if (m > out.margin || !out.cert) {
        out.margin = m;
        out.cert = cert;
        out.reports = reports;
      }
      if (all_verified(reports)) {
        out.success = true;
        out.cert = cert;
        out.reports = reports;
        std::size_t cur = first_success.load();
        while (ci < cur && !first_success.compare_exchange_weak(cur, ci)) {
        }
        break;
      }
      // Grow the pool with the refutations.
      for (const auto& r : reports) {
        if (r.status != CertStatus::refuted) continue;
        const int cond = r.condition == "C1" ? 1 : r.condition == "C2" ? 2 : r.condition == "C3" ? 3 : 4;
        for (const auto& cx : r.counterexamples) {
          std::vector<double> x(cx.begin(), cx.begin() + static_cast<long>(nx));
          std::vector<double> w(cx.begin() + static_cast<long>(nx), cx.end());
          pool.add(cond, std::move(x), std::move(w));
        }
      }
      // Re-select the active disjunct of every C4 point under the new iterate.
      for (std::size_t k = 0; k < pool.size(); ++k) {
        const auto& p = pool.points()[k];
        if (p.cond != 4) continue;
        const double bx = dot(p.phi, z, L.nb);
        const double kb = c.kappa * bx;
        const double rw = has_input ? z[L.rho()] * std::pow(p.wnorm, cfg.rho_exp) : -HUGE_VAL;
        const double ps = z[L.psi()];
        pool.choice()[k] = kb >= rw && kb >= ps ? Disjunct::kappa : rw >= ps ? Disjunct::rho : Disjunct::psi;
      }
      out.pool = pool.size();
    }
    out.pool = pool.size();
  });

  CegisResult res;
  for (std::size_t ci = 0; ci < cands.size(); ++ci) {
    const auto& o = outcomes[ci];
    res.iterations += o.iterations;
    res.pool_size = std::max(res.pool_size, o.pool);
    res.log.insert(res.log.end(), o.log.begin(), o.log.end());
  }
  const std::size_t win = first_success.load();
  if (win < cands.size()) {
    res.success = true;
    res.certificate = outcomes[win].cert;
    res.reports = outcomes[win].reports;
    res.best_margin = outcomes[win].margin;
    return res;
  }
  for (const auto& o : outcomes)
    if (o.cert && o.margin > res.best_margin) {
      res.best_margin = o.margin;
      res.certificate = o.cert;
      res.reports = o.reports;
    }
  res.reason = "budget exhausted without a verified candidate (best margin " + std::to_string(res.best_margin) + ")";
  return res;
}

}  // namespace bcert
