#include "bcert/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include <boost/math/special_functions/beta.hpp>

#include "bcert/certify.hpp"
#include "bcert/errors.hpp"
#include "bcert/kernels.hpp"
#include "bcert/parallel.hpp"

namespace bcert {

namespace {

std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t key(std::uint64_t seed, std::uint64_t traj, std::uint64_t sub, std::uint64_t step, std::uint64_t slot) {
  std::uint64_t h = mix(seed);
  h = mix(h ^ traj);
  h = mix(h ^ sub);
  h = mix(h ^ step);
  return mix(h ^ slot);
}

constexpr std::uint64_t kInitialStep = ~std::uint64_t{0};

}  // namespace

double uniform_draw(std::uint64_t seed, std::uint64_t traj, std::uint64_t sub, std::uint64_t step, std::uint64_t slot) {
  return (static_cast<double>(key(seed, traj, sub, step, slot) >> 11) + 0.5) * 0x1.0p-53;
}

double normal_draw(std::uint64_t seed, std::uint64_t traj, std::uint64_t sub, std::uint64_t step, std::uint64_t comp) {
  const double u1 = uniform_draw(seed, traj, sub, step, 2 * comp);
  const double u2 = uniform_draw(seed, traj, sub, step, 2 * comp + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double noise_draw(const NoiseSpec& spec, std::uint64_t seed, std::uint64_t traj, std::uint64_t sub, std::uint64_t step,
                  std::uint64_t comp) {
  if (spec.is_gaussian()) return spec.from_standard(normal_draw(seed, traj, sub, step, comp), 0.5);
  return spec.from_standard(0.0, uniform_draw(seed, traj, sub, step, 2 * comp));
}

std::string_view controller_name(ControllerKind k) { return k == ControllerKind::one_step ? "one-step" : "lookahead"; }

ControllerKind parse_controller(std::string_view s) {
  if (s == "one-step") return ControllerKind::one_step;
  if (s == "lookahead") return ControllerKind::lookahead;
  throw InputError("unknown controller '" + std::string(s) + "' (expected one-step or lookahead)");
}

double clopper_pearson_upper(std::size_t k, std::size_t n, double confidence) {
  if (n == 0) throw InputError("Clopper-Pearson bound needs n > 0");
  if (k >= n) return 1.0;
  return boost::math::ibeta_inv(static_cast<double>(k + 1), static_cast<double>(n - k), confidence);
}

double clopper_pearson_lower(std::size_t k, std::size_t n, double confidence) {
  if (n == 0) throw InputError("Clopper-Pearson bound needs n > 0");
  if (k == 0) return 0.0;
  return boost::math::ibeta_inv(static_cast<double>(k), static_cast<double>(n - k + 1), 1.0 - confidence);
}

ProportionEstimate estimate_proportion(std::size_t k, std::size_t n) {
  ProportionEstimate e;
  e.count = k;
  if (n == 0) return e;
  e.frequency = static_cast<double>(k) / static_cast<double>(n);
  e.lower95 = clopper_pearson_lower(k, n);
  e.upper95 = clopper_pearson_upper(k, n);
  return e;
}

namespace {

struct SubCtl {
  const SubsystemSpec* sys = nullptr;
  const ApbcCertificate* apbc = nullptr;
  double scale = 1.0;
  int M = 1, kd = 1;
  std::vector<std::pair<Role, std::size_t>> layout;  // noise-free space positions
  std::vector<std::vector<kernels::EvalPlan>> Ef;    // [p-1][k]: E[f_p]
  std::vector<std::vector<kernels::EvalPlan>> EB;    // [p-1][q-1]: E[B_q(f_p)]
  std::vector<kernels::EvalPlan> B;
  std::vector<std::vector<double>> fac;

  void fill(std::vector<double>& pt, std::span<const double> x, std::span<const double> w) const {
    pt.resize(layout.size());
    for (std::size_t v = 0; v < layout.size(); ++v) pt[v] = layout[v].first == Role::state ? x[layout[v].second] : w[layout[v].second];
  }
  int next_counter(int p, int l, int q) const {
    if (l < kd - 1) return l + 1;
    return q == p ? kd - 1 : 0;
  }
};

struct TrajOut {
  bool exceeded = false;
  bool unsafe = false;
  std::size_t checks = 0, violations = 0, dwell_violations = 0;
  double max_barrier = 0.0;
  std::vector<std::vector<AugmentedState>> retained;
};

std::vector<double> sample_initial(const BoxSet& X0, std::uint64_t seed, std::uint64_t traj, std::uint64_t sub) {
  const auto boxes = X0.boxes();
  if (boxes.empty()) throw InputError("cannot sample an initial state from an empty X0");
  double total = 0.0;
  for (const auto& b : boxes) total += b.volume();
  std::size_t pick = 0;
  const double u = uniform_draw(seed, traj, sub, kInitialStep, 0);
  if (total > 0.0) {
    double acc = 0.0;
    for (pick = 0; pick + 1 < boxes.size(); ++pick) {
      acc += boxes[pick].volume() / total;
      if (u < acc) break;
    }
  } else {
    pick = std::min(boxes.size() - 1, static_cast<std::size_t>(u * static_cast<double>(boxes.size())));
  }
  const auto& b = boxes[pick];
  std::vector<double> x(b.dim());
  for (std::size_t d = 0; d < b.dim(); ++d) x[d] = b[d].lo + uniform_draw(seed, traj, sub, kInitialStep, d + 1) * b[d].width();
  return x;
}

}  // namespace

SimReport run_monte_carlo(const NetworkSpec& net, const AbcCertificate& cert, const SimConfig& cfg) {
  const std::size_t N = net.size();
  if (cert.parts.size() != N || cert.scalings.size() != N)
    throw InputError("certificate does not match the network size");
  if (cfg.horizon < 0) throw InputError("horizon must be non-negative");
  SimReport rep;
  rep.trajectories = cfg.trajectories;
  rep.horizon = cfg.horizon;
  rep.seed = cfg.seed;
  rep.controller = cfg.controller;
  rep.semantics = cert.semantics;
  for (const auto& s : net.subsystems) rep.subsystem_ids.push_back(s.id);
  if (cert.verification.status != CertStatus::verified) {
    if (!cfg.allow_unverified)
      throw InputError("certificate status is '" + std::string(status_name(cert.verification.status)) +
                       "'; simulation refused without an explicit override");
    rep.warnings.push_back("simulating with an unverified certificate (status '" +
                           std::string(status_name(cert.verification.status)) + "')");
  }
  const auto& K = cert.constants;
  rep.bound = safety_bound(K.gamma, K.lambda, K.kappa, K.psi, cfg.horizon);

  std::vector<int> p0 = cfg.initial_modes;
  if (p0.empty()) p0.assign(N, 1);
  if (p0.size() != N) throw InputError("one initial mode per subsystem is required");

  std::vector<SubCtl> ctl(N);
  for (std::size_t i = 0; i < N; ++i) {
    auto& c = ctl[i];
    const auto& sys = net.subsystems[i];
    c.sys = &sys;
    c.apbc = &cert.parts[i];
    c.scale = cert.scalings[i];
    c.M = sys.mode_count();
    c.kd = c.apbc->k_d;
    if (c.apbc->mode_count() != c.M) throw InputError("APBC mode count mismatch for '" + sys.id + "'");
    if (p0[i] < 1 || p0[i] > c.M) throw InputError("initial mode out of range for '" + sys.id + "'");
    SpacePtr nf;
    for (int p = 1; p <= c.M; ++p) {
      std::vector<kernels::EvalPlan> fp;
      for (const auto& f : sys.dynamics(p)) {
        const auto ef = expectation_over_noise(f, sys.noise);
        nf = ef.space();
        fp.emplace_back(ef);
      }
      c.Ef.push_back(std::move(fp));
      std::vector<kernels::EvalPlan> row;
      for (int q = 1; q <= c.M; ++q)
        row.emplace_back(expected_barrier(sys, p, c.apbc->barriers[static_cast<std::size_t>(q - 1)]));
      c.EB.push_back(std::move(row));
      c.B.emplace_back(c.apbc->barriers[static_cast<std::size_t>(p - 1)].rebase(sys.state_space));
    }
    if (!nf) nf = make_space(sys.space->without(Role::noise));
    for (const auto& v : nf->variables()) c.layout.emplace_back(v.role, v.index);
    c.fac.assign(static_cast<std::size_t>(c.M), std::vector<double>(static_cast<std::size_t>(c.kd)));
    for (int p = 1; p <= c.M; ++p)
      for (int l = 0; l < c.kd; ++l) c.fac[p - 1][l] = c.apbc->factor(p, l);
  }
  const Wiring wiring(net);
  const long T = cfg.horizon;

  auto composite = [&](std::span<const AugmentedState> st) {
    double b = -HUGE_VAL;
    for (std::size_t i = 0; i < N; ++i)
      b = std::max(b, ctl[i].fac[st[i].p - 1][st[i].l] * kernels::eval_point(ctl[i].B[st[i].p - 1], st[i].x.data()) /
                          ctl[i].scale);
    return b;
  };
  auto in_unsafe = [&](std::span<const AugmentedState> st) {
    if (cert.semantics == UnsafeSemantics::product) {
      for (std::size_t i = 0; i < N; ++i)
        if (!net.subsystems[i].X1.contains(st[i].x)) return false;
      return true;
    }
    for (std::size_t i = 0; i < N; ++i)
      if (net.subsystems[i].X1.contains(st[i].x)) return true;
    return false;
  };

  auto run_one = [&](std::size_t j) {
    TrajOut out;
    const bool keep = j < cfg.retain;
    std::vector<AugmentedState> st(N);
    for (std::size_t i = 0; i < N; ++i) st[i] = {sample_initial(net.subsystems[i].X0, cfg.seed, j, i), p0[i], 0};
    std::vector<long> last_switch(N, 0);
    std::vector<double> pt, pt2, xbar, noise;
    std::vector<std::vector<double>> xs(N);
    auto observe = [&] {
      const double b = composite(st);
      out.max_barrier = std::max(out.max_barrier, b);
      out.exceeded = out.exceeded || b >= K.lambda;
      out.unsafe = out.unsafe || in_unsafe(st);
      if (keep) out.retained.push_back(st);
    };
    observe();
    for (long k = 0; k < T; ++k) {
      for (std::size_t i = 0; i < N; ++i) xs[i] = st[i].x;
      std::vector<AugmentedState> next(N);
      for (std::size_t i = 0; i < N; ++i) {
        const auto& c = ctl[i];
        const auto& s = st[i];
        const auto w = wiring.inputs(i, xs);
        c.fill(pt, s.x, w);
        int q = s.p;
        if (s.l == c.kd - 1) {
          if (cfg.controller == ControllerKind::lookahead) {
            xbar.resize(s.x.size());
            for (std::size_t d = 0; d < s.x.size(); ++d) xbar[d] = kernels::eval_point(c.Ef[s.p - 1][d], pt.data());
            c.fill(pt2, xbar, w);
          }
          double best = HUGE_VAL;
          for (int cand = 1; cand <= c.M; ++cand) {
            const double f = c.fac[cand - 1][c.next_counter(s.p, s.l, cand)];
            const double score = cfg.controller == ControllerKind::lookahead
                                     ? f * kernels::eval_point(c.EB[cand - 1][cand - 1], pt2.data())
                                     : f * kernels::eval_point(c.EB[s.p - 1][cand - 1], pt.data());
            if (score < best) {
              best = score;
              q = cand;
            }
          }
        }
        // Online check of the expected-decrease inequality for the chosen p'.
        const auto& A = c.apbc->constants;
        double wn = 0.0;
        for (double v : w) wn = std::max(wn, std::abs(v));
        const double lhs = c.fac[q - 1][c.next_counter(s.p, s.l, q)] * kernels::eval_point(c.EB[s.p - 1][q - 1], pt.data());
        const double rhs = std::max({A.kappa * c.fac[s.p - 1][s.l] * kernels::eval_point(c.B[s.p - 1], s.x.data()),
                                     A.rho(wn), A.psi});
        ++out.checks;
        if (lhs > rhs + kMarginTolerance) ++out.violations;

        noise.resize(c.sys->noise_dim());
        for (std::size_t d = 0; d < noise.size(); ++d)
          noise[d] = noise_draw(c.sys->noise[d], cfg.seed, j, i, static_cast<std::uint64_t>(k), d);
        next[i] = augmented_step(s, q, w, noise, *c.sys, c.kd);
        if (next[i].p != s.p) {
          if (k + 1 - last_switch[i] < c.kd) ++out.dwell_violations;
          last_switch[i] = k + 1;
        }
      }
      st = std::move(next);
      observe();
    }
    return out;
  };

  const std::size_t M = cfg.trajectories;
  constexpr std::size_t kBlock = 32;
  std::vector<TrajOut> results(M);
  parallel_for((M + kBlock - 1) / kBlock, [&](std::size_t b) {
    for (std::size_t j = b * kBlock; j < std::min(M, (b + 1) * kBlock); ++j) results[j] = run_one(j);
  });

  std::size_t exceed = 0, unsafe = 0;
  for (std::size_t j = 0; j < M; ++j) {
    auto& r = results[j];
    exceed += r.exceeded;
    unsafe += r.unsafe;
    rep.controller_checks += r.checks;
    rep.controller_violations += r.violations;
    rep.dwell_violations += r.dwell_violations;
    rep.max_barrier = std::max(rep.max_barrier, r.max_barrier);
    if (j < cfg.retain) rep.retained.push_back(std::move(r.retained));
  }
  rep.exceedance = estimate_proportion(exceed, M);
  rep.entered_unsafe = estimate_proportion(unsafe, M);
  if (rep.controller_violations > 0)
    rep.warnings.push_back(std::to_string(rep.controller_violations) + " of " + std::to_string(rep.controller_checks) +
                           " controller steps violated the expected-decrease inequality");
  return rep;
}

void plot_data(std::ostream& os, const SimReport& report, const NetworkSpec& net, std::size_t subsystem,
               std::size_t realizations) {
  if (report.retained.empty()) throw InputError("no trajectories were retained; rerun with retention enabled");
  if (subsystem >= net.size()) throw InputError("subsystem index out of range");
  const auto R = std::min(realizations, report.retained.size());
  if (R == 0) throw InputError("at least one realization is required");
  const auto& sys = net.subsystems[subsystem];
  os << "k";
  for (std::size_t r = 0; r < R; ++r)
    for (const auto& v : sys.state_space->variables()) os << "," << sys.id << "." << v.name << "#" << r;
  os << "\n";
  std::ostringstream line;
  line.precision(17);
  const auto steps = report.retained.front().size();
  for (std::size_t k = 0; k < steps; ++k) {
    line.str("");
    line << k;
    for (std::size_t r = 0; r < R; ++r)
      for (double x : report.retained[r][k][subsystem].x) line << "," << x;
    os << line.str() << "\n";
  }
}

void write_retained_csv(std::ostream& os, const SimReport& report, const std::string& json_header) {
  std::vector<TrajectoryRow> rows;
  for (std::size_t r = 0; r < report.retained.size(); ++r)
    for (std::size_t k = 0; k < report.retained[r].size(); ++k)
      for (std::size_t i = 0; i < report.retained[r][k].size(); ++i) {
        const auto& s = report.retained[r][k][i];
        rows.push_back({k, report.subsystem_ids[i] + (report.retained.size() > 1 ? "#" + std::to_string(r) : ""), s.x,
                        s.p, s.l});
      }
  write_trajectory_csv(os, json_header, rows);
}

}  // namespace bcert
