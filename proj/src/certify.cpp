#include "bcert/certify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "bcert/errors.hpp"
#include "bcert/kernels.hpp"
#include "bcert/noise.hpp"
#include "bcert/parallel.hpp"

namespace bcert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kChunk = 1024;

using Cols = std::span<const double* const>;
using BatchMargin = std::function<void(Cols cols, std::size_t n, double* out)>;

struct Condition {
  std::string id;
  std::string layout;
  BoxSet domain;
  BatchMargin batch;
};

double point_margin(const BatchMargin& batch, std::span<const double> x) {
  std::vector<const double*> cols(x.size());
  for (std::size_t d = 0; d < x.size(); ++d) cols[d] = &x[d];
  double out = 0.0;
  batch(cols, 1, &out);
  return std::isnan(out) ? -kInf : out;
}

double grid_count(const BoxSet& set, const GridConfig& cfg) {
  double total = 0.0;
  for (const auto& box : set.boxes()) {
    double n = 1.0;
    for (std::size_t d = 0; d < box.dim(); ++d) {
      const auto& iv = box[d];
      double h = cfg.resolution > 0.0 ? cfg.resolution : iv.width() / static_cast<double>(cfg.points_per_dim - 1);
      n *= h > 0.0 ? static_cast<double>(grid_axis(iv.lo, iv.hi, h).size()) : 1.0;
    }
    total += n;
  }
  return total;
}

// Evaluates one condition on the grid, refines from the worst points and
// assembles the report. Margins are rhs - lhs; the refinement and the
// reported counterexamples use the same batch routine with one point, so a
// counterexample re-evaluates to exactly the reported margin.
CheckReport run_condition(const Condition& c, const GridConfig& cfg, std::uint64_t salt) {
  CheckReport r;
  r.condition = c.id;
  r.layout = c.layout;
  const PointSet pts = grid_points(c.domain, cfg, salt);
  r.points = pts.size();
  r.sampled = pts.sampled;
  r.resolution = pts.resolution;
  if (pts.size() == 0) {
    r.status = CertStatus::verified;
    r.worst_margin = kInf;
    r.note = "empty domain, condition holds vacuously";
    return r;
  }
  const std::size_t n = pts.size();
  std::vector<double> margin(n);
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  parallel_for(chunks, [&](std::size_t ci) {
    const std::size_t begin = ci * kChunk;
    const std::size_t len = std::min(kChunk, n - begin);
    const auto cols = pts.column_ptrs(begin);
    c.batch(cols, len, margin.data() + begin);
  });
  for (auto& m : margin)
    if (std::isnan(m)) m = -kInf;

  const std::size_t k = std::min(n, std::max<std::size_t>({cfg.refine_starts, cfg.max_counterexamples, 1}));
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                    [&](std::size_t a, std::size_t b) { return margin[a] < margin[b] || (margin[a] == margin[b] && a < b); });

  const std::size_t starts = std::min(k, cfg.refine_starts);
  std::vector<RefineResult> refined(starts);
  auto f = [&](std::span<const double> x) { return point_margin(c.batch, x); };
  parallel_for(starts, [&](std::size_t s) {
    const auto i = idx[s];
    const auto& box = c.domain.boxes()[pts.box_of[i]];
    refined[s] = refine_min(f, box, pts.point(i), pts.resolution, cfg.refine_sweeps);
  });

  std::vector<RefineResult> candidates = refined;
  for (std::size_t s = 0; s < k; ++s) {
    auto p = pts.point(idx[s]);
    const double v = f(p);
    candidates.push_back({std::move(p), v});
  }
  r.worst_margin = margin[idx[0]];
  for (const auto& cand : candidates) r.worst_margin = std::min(r.worst_margin, cand.value);

  std::erase_if(candidates, [](const RefineResult& x) { return !(x.value < -kMarginTolerance); });
  std::sort(candidates.begin(), candidates.end(), [](const RefineResult& a, const RefineResult& b) {
    return a.value < b.value || (a.value == b.value && a.point < b.point);
  });
  for (const auto& cand : candidates) {
    if (r.counterexamples.size() >= std::max<std::size_t>(cfg.max_counterexamples, 1)) break;
    if (std::find(r.counterexamples.begin(), r.counterexamples.end(), cand.point) != r.counterexamples.end()) continue;
    r.counterexamples.push_back(cand.point);
  }
  if (!r.counterexamples.empty()) {
    r.status = CertStatus::refuted;
    r.counterexample = r.counterexamples.front();
  } else {
    r.status = CertStatus::verified;
  }
  return r;
}

struct Buffers {
  std::vector<std::vector<double>> data;
  double* get(std::size_t i, std::size_t n) {
    if (data.size() <= i) data.resize(i + 1);
    if (data[i].size() < n) data[i].resize(n);
    return data[i].data();
  }
};

void abs_max_into(std::span<const kernels::EvalPlan> plans, Cols cols, std::size_t n, double* out, Buffers& buf,
                  std::size_t slot) {
  std::vector<const double*> vals;
  for (std::size_t k = 0; k < plans.size(); ++k) {
    double* v = buf.get(slot + k, n);
    kernels::eval_batch(plans[k], cols, n, v);
    vals.push_back(v);
  }
  kernels::abs_max_batch(vals, n, out);
}

std::vector<kernels::EvalPlan> plans_of(const std::vector<Polynomial>& ps) {
  std::vector<kernels::EvalPlan> out;
  for (const auto& p : ps) out.emplace_back(p);
  return out;
}

BoxSet product_all(const std::vector<const BoxSet*>& sets) {
  BoxSet out(0, {Box{}});
  for (const auto* s : sets) {
    BoxSet next(out.dim() + s->dim());
    for (const auto& a : out.boxes())
      for (const auto& b : s->boxes()) next.add(product(a, b));
    out = std::move(next);
  }
  return out;
}

}  // namespace

std::vector<const double*> map_columns(const VariableSpace& space, std::span<const double* const> x,
                                       std::span<const double* const> w, std::span<const double* const> noise) {
  std::vector<const double*> cols(space.size());
  for (std::size_t v = 0; v < space.size(); ++v) {
    const auto& var = space[v];
    const auto src = var.role == Role::state ? x : var.role == Role::input ? w : noise;
    if (var.index >= src.size()) throw InputError("missing column for variable '" + var.name + "'");
    cols[v] = src[var.index];
  }
  return cols;
}

Polynomial expected_barrier(const SubsystemSpec& sys, int dyn_mode, const Polynomial& barrier) {
  const Polynomial b = barrier.rebase(sys.state_space);
  const auto& f = sys.dynamics(dyn_mode);
  std::map<std::string, Polynomial> subst;
  for (std::size_t v = 0; v < sys.state_space->size(); ++v) {
    const auto& var = (*sys.state_space)[v];
    subst.emplace(var.name, f[var.index]);
  }
  return expectation_over_noise(b.compose(subst), sys.noise);
}

// ---------------------------------------------------------------------------

std::vector<CheckReport> check_cbc(const SubsystemSpec& sys, const CbcCertificate& cert, const GridConfig& grid) {
  cert.constants.validate();
  const auto& k = cert.constants;
  const Polynomial B = cert.barrier.rebase(sys.state_space);
  const kernels::EvalPlan planB(B);
  const auto outputs = plans_of(sys.all_outputs());
  const Polynomial E = expected_barrier(sys, cert.mode, B);
  const kernels::EvalPlan planE(E);
  const auto n = sys.state_dim();

  std::vector<CheckReport> reports;

  Condition c1{"C1", "x", sys.X, [&](Cols cols, std::size_t len, double* out) {
                 Buffers buf;
                 double* b = buf.get(0, len);
                 double* h = buf.get(1, len);
                 kernels::eval_batch(planB, cols, len, b);
                 abs_max_into(outputs, cols, len, h, buf, 2);
                 for (std::size_t i = 0; i < len; ++i) out[i] = b[i] - k.alpha(h[i]);
               }};
  Condition c2{"C2", "x", sys.X0, [&](Cols cols, std::size_t len, double* out) {
                 kernels::eval_batch(planB, cols, len, out);
                 for (std::size_t i = 0; i < len; ++i) out[i] = k.gamma - out[i];
               }};
  Condition c3{"C3", "x", sys.X1, [&](Cols cols, std::size_t len, double* out) {
                 kernels::eval_batch(planB, cols, len, out);
                 for (std::size_t i = 0; i < len; ++i) out[i] = out[i] - k.lambda;
               }};
  const auto noise_free = E.space();
  Condition c4{"C4", sys.input_dim() ? "x,w" : "x", product(sys.X, sys.W), [&](Cols cols, std::size_t len, double* out) {
                 Buffers buf;
                 double* b = buf.get(0, len);
                 double* wn = buf.get(1, len);
                 kernels::eval_batch(planB, cols.first(n), len, b);
                 kernels::abs_max_batch(cols.subspan(n), len, wn);
                 const auto ecols = map_columns(*noise_free, cols.first(n), cols.subspan(n));
                 kernels::eval_batch(planE, ecols, len, out);
                 for (std::size_t i = 0; i < len; ++i)
                   out[i] = std::max({k.kappa * b[i], k.rho(wn[i]), k.psi}) - out[i];
               }};
  std::uint64_t salt = 1;
  for (const auto* c : {&c1, &c2, &c3, &c4}) {
    auto r = run_condition(*c, grid, salt++);
    r.mode = cert.mode;
    reports.push_back(std::move(r));
  }
  return reports;
}

// ---------------------------------------------------------------------------

namespace {

int successor_counter(int l, int p, int p_next, int k_d) {
  if (l < k_d - 1) return l + 1;
  return p_next == p ? k_d - 1 : 0;
}

std::vector<int> admissible_successors(int p, int l, int k_d, int modes) {
  if (l < k_d - 1) return {p};
  std::vector<int> out(static_cast<std::size_t>(modes));
  std::iota(out.begin(), out.end(), 1);
  return out;
}

}  // namespace

std::vector<CheckReport> check_apbc(const SubsystemSpec& sys, const ApbcCertificate& cert, const GridConfig& grid) {
  cert.validate();
  if (cert.mode_count() != sys.mode_count())
    throw InputError("APBC has " + std::to_string(cert.mode_count()) + " barriers, subsystem has " +
                     std::to_string(sys.mode_count()) + " modes");
  const auto& k = cert.constants;
  const int M = cert.mode_count();
  const int kd = cert.k_d;
  const auto n = sys.state_dim();
  const auto m = sys.input_dim();

  std::vector<Polynomial> B;
  std::vector<kernels::EvalPlan> planB;
  for (const auto& b : cert.barriers) {
    B.push_back(b.rebase(sys.state_space));
    planB.emplace_back(B.back());
  }
  // E[p-1][q-1] = E[B_q(f_p(x, w, noise))]
  std::vector<std::vector<kernels::EvalPlan>> planE(static_cast<std::size_t>(M));
  SpacePtr noise_free;
  for (int p = 1; p <= M; ++p)
    for (int q = 1; q <= M; ++q) {
      const auto e = expected_barrier(sys, p, B[static_cast<std::size_t>(q - 1)]);
      noise_free = e.space();
      planE[static_cast<std::size_t>(p - 1)].emplace_back(e);
    }
  const auto outputs = plans_of(sys.all_outputs());
  std::vector<std::vector<double>> fac(static_cast<std::size_t>(M), std::vector<double>(static_cast<std::size_t>(kd)));
  for (int p = 1; p <= M; ++p)
    for (int l = 0; l < kd; ++l) fac[static_cast<std::size_t>(p - 1)][static_cast<std::size_t>(l)] = cert.factor(p, l);

  auto eval_all_modes = [&](Cols cols, std::size_t len, Buffers& buf) {
    std::vector<double*> out;
    for (int p = 0; p < M; ++p) {
      out.push_back(buf.get(static_cast<std::size_t>(p), len));
      kernels::eval_batch(planB[static_cast<std::size_t>(p)], cols, len, out.back());
    }
    return out;
  };

  std::vector<CheckReport> reports;

  Condition c1{"C1", "x", sys.X, [&](Cols cols, std::size_t len, double* out) {
                 Buffers buf;
                 const auto b = eval_all_modes(cols, len, buf);
                 double* h = buf.get(static_cast<std::size_t>(M), len);
                 abs_max_into(outputs, cols, len, h, buf, static_cast<std::size_t>(M) + 1);
                 for (std::size_t i = 0; i < len; ++i) {
                   const double a = k.alpha(h[i]);
                   double worst = kInf;
                   for (int p = 0; p < M; ++p)
                     for (int l = 0; l < kd; ++l) worst = std::min(worst, fac[p][l] * b[p][i] - a);
                   out[i] = worst;
                 }
               }};
  Condition c2{"C2", "x", sys.X0, [&](Cols cols, std::size_t len, double* out) {
                 Buffers buf;
                 const auto b = eval_all_modes(cols, len, buf);
                 for (std::size_t i = 0; i < len; ++i) {
                   double worst = kInf;
                   for (int p = 0; p < M; ++p) worst = std::min(worst, k.gamma - fac[p][0] * b[p][i]);
                   out[i] = worst;
                 }
               }};
  Condition c3{"C3", "x", sys.X1, [&](Cols cols, std::size_t len, double* out) {
                 Buffers buf;
                 const auto b = eval_all_modes(cols, len, buf);
                 for (std::size_t i = 0; i < len; ++i) {
                   double worst = kInf;
                   for (int p = 0; p < M; ++p)
                     for (int l = 0; l < kd; ++l) worst = std::min(worst, fac[p][l] * b[p][i] - k.lambda);
                   out[i] = worst;
                 }
               }};

  // W sample for the inner universal quantifier; the x grid shares the budget.
  const double nx_full = std::max(1.0, grid_count(sys.X, grid));
  GridConfig wcfg = grid;
  wcfg.max_points = static_cast<std::size_t>(
      std::clamp(static_cast<double>(grid.max_points) / nx_full, 64.0, static_cast<double>(grid.max_points)));
  const PointSet wpts = m ? grid_points(sys.W, wcfg, 77) : PointSet{0, {}, {0}, false, 0.0};
  const std::size_t nw = wpts.size();
  GridConfig xcfg = grid;
  xcfg.max_points = std::max<std::size_t>(64, grid.max_points / std::max<std::size_t>(nw, 1));
  std::vector<double> wnorm(nw, 0.0);
  for (std::size_t j = 0; j < nw; ++j)
    for (std::size_t d = 0; d < m; ++d) wnorm[j] = std::max(wnorm[j], std::abs(wpts.cols[d][j]));
  std::vector<double> rho_w(nw);
  for (std::size_t j = 0; j < nw; ++j) rho_w[j] = k.rho(wnorm[j]);

  // Margin of (x, p, l, p') minimized over the W sample; witness index optional.
  auto successor_margin = [&](Cols xcols, std::size_t len, const double* rhs_base, int p, int l, int q, Buffers& buf,
                              std::size_t slot, double* out, std::size_t* arg) {
    const double fq = fac[q - 1][successor_counter(l, p, q, kd)];
    std::vector<double*> wbuf(m);
    for (std::size_t d = 0; d < m; ++d) wbuf[d] = buf.get(slot + 1 + d, len);
    const std::vector<const double*> wcols(wbuf.begin(), wbuf.end());
    double* e = buf.get(slot, len);
    std::fill(out, out + len, kInf);
    for (std::size_t j = 0; j < nw; ++j) {
      for (std::size_t d = 0; d < m; ++d) std::fill(wbuf[d], wbuf[d] + len, wpts.cols[d][j]);
      const auto ecols = map_columns(*noise_free, xcols, wcols);
      kernels::eval_batch(planE[p - 1][q - 1], ecols, len, e);
      for (std::size_t i = 0; i < len; ++i) {
        const double v = std::max(rhs_base[i], rho_w[j]) - fq * e[i];
        if (v < out[i]) {
          out[i] = v;
          if (arg) arg[i] = j;
        }
      }
    }
  };

  Condition c4{"C4", "x", sys.X, [&](Cols cols, std::size_t len, double* out) {
                 Buffers buf;
                 const auto b = eval_all_modes(cols, len, buf);
                 double* rhs = buf.get(static_cast<std::size_t>(M), len);
                 double* best = buf.get(static_cast<std::size_t>(M) + 1, len);
                 double* cur = buf.get(static_cast<std::size_t>(M) + 2, len);
                 std::fill(out, out + len, kInf);
                 for (int p = 1; p <= M; ++p)
                   for (int l = 0; l < kd; ++l) {
                     for (std::size_t i = 0; i < len; ++i) rhs[i] = std::max(k.kappa * fac[p - 1][l] * b[p - 1][i], k.psi);
                     std::fill(best, best + len, -kInf);
                     for (int q : admissible_successors(p, l, kd, M)) {
                       successor_margin(cols, len, rhs, p, l, q, buf, static_cast<std::size_t>(M) + 3, cur, nullptr);
                       for (std::size_t i = 0; i < len; ++i) best[i] = std::max(best[i], cur[i]);
                     }
                     for (std::size_t i = 0; i < len; ++i) out[i] = std::min(out[i], best[i]);
                   }
               }};

  std::uint64_t salt = 11;
  for (const auto* c : {&c1, &c2, &c3}) reports.push_back(run_condition(*c, grid, salt++));
  auto r4 = run_condition(c4, xcfg, salt++);
  r4.sampled = r4.sampled || wpts.sampled;
  r4.resolution = std::max(r4.resolution, wpts.resolution);
  r4.note = "W sampled at " + std::to_string(nw) + " points";
  reports.push_back(std::move(r4));

  // Locate the worst (p, l) of each counterexample and, for C4, the witness w
  // of every admissible successor mode.
  for (auto& r : reports) {
    if (r.status != CertStatus::refuted) continue;
    const auto& x = r.counterexample;
    std::vector<const double*> xcols(n);
    for (std::size_t d = 0; d < n; ++d) xcols[d] = &x[d];
    double worst = kInf;
    const int lmax = r.condition == "C2" ? 1 : kd;
    for (int p = 1; p <= M; ++p)
      for (int l = 0; l < lmax; ++l) {
        const double bp = B[p - 1].eval(x);
        double v = 0.0;
        if (r.condition == "C1") v = fac[p - 1][l] * bp - k.alpha(sys.output_norm(x));
        else if (r.condition == "C2") v = k.gamma - fac[p - 1][l] * bp;
        else if (r.condition == "C3") v = fac[p - 1][l] * bp - k.lambda;
        else {
          Buffers buf;
          double rhs = std::max(k.kappa * fac[p - 1][l] * bp, k.psi);
          v = -kInf;
          for (int q : admissible_successors(p, l, kd, M)) {
            double cur = 0.0;
            std::size_t arg = 0;
            successor_margin(xcols, 1, &rhs, p, l, q, buf, 0, &cur, &arg);
            v = std::max(v, cur);
          }
        }
        if (v < worst) {
          worst = v;
          r.mode = p;
          r.counter = l;
        }
      }
    if (r.condition == "C4") {
      Buffers buf;
      const int p = *r.mode, l = *r.counter;
      double rhs = std::max(k.kappa * fac[p - 1][l] * B[p - 1].eval(x), k.psi);
      for (int q : admissible_successors(p, l, kd, M)) {
        double cur = 0.0;
        std::size_t arg = 0;
        successor_margin(xcols, 1, &rhs, p, l, q, buf, 0, &cur, &arg);
        r.witnesses.emplace_back(q, m ? wpts.point(arg) : std::vector<double>{});
      }
    }
  }
  return reports;
}

// ---------------------------------------------------------------------------

std::vector<CheckReport> check_abc(const NetworkSpec& net, const AbcCertificate& cert, const GridConfig& grid) {
  cert.constants.validate(true);
  const std::size_t N = net.size();
  if (cert.parts.size() != N || cert.scalings.size() != N)
    throw InputError("ABC must have one APBC and one scaling per subsystem");
  for (double s : cert.scalings)
    if (!(s > 0.0)) throw InputError("scalings must be positive");
  const auto& k = cert.constants;
  const Wiring wiring(net);

  struct Part {
    std::size_t offset, n, m;
    int M, kd;
    double s;
    std::vector<kernels::EvalPlan> B;
    std::vector<std::vector<kernels::EvalPlan>> E;
    std::vector<std::vector<double>> fac;
    SpacePtr noise_free;
    struct Src {
      std::size_t from_offset, from_n, offset;
      std::vector<kernels::EvalPlan> h;
    };
    std::vector<Src> sources;
  };
  std::vector<Part> parts(N);
  std::size_t offset = 0;
  std::vector<std::size_t> offsets(N);
  for (std::size_t i = 0; i < N; ++i) {
    offsets[i] = offset;
    offset += net.subsystems[i].state_dim();
  }
  for (std::size_t i = 0; i < N; ++i) {
    const auto& sys = net.subsystems[i];
    const auto& a = cert.parts[i];
    a.validate();
    if (a.mode_count() != sys.mode_count()) throw InputError("APBC mode count mismatch for '" + sys.id + "'");
    auto& P = parts[i];
    P.offset = offsets[i];
    P.n = sys.state_dim();
    P.m = sys.input_dim();
    P.M = a.mode_count();
    P.kd = a.k_d;
    P.s = cert.scalings[i];
    std::vector<Polynomial> B;
    for (const auto& b : a.barriers) {
      B.push_back(b.rebase(sys.state_space));
      P.B.emplace_back(B.back());
    }
    P.E.resize(static_cast<std::size_t>(P.M));
    for (int p = 1; p <= P.M; ++p)
      for (int q = 1; q <= P.M; ++q) {
        const auto e = expected_barrier(sys, p, B[static_cast<std::size_t>(q - 1)]);
        P.noise_free = e.space();
        P.E[static_cast<std::size_t>(p - 1)].emplace_back(e);
      }
    P.fac.assign(static_cast<std::size_t>(P.M), std::vector<double>(static_cast<std::size_t>(P.kd)));
    for (int p = 1; p <= P.M; ++p)
      for (int l = 0; l < P.kd; ++l) P.fac[static_cast<std::size_t>(p - 1)][static_cast<std::size_t>(l)] = a.factor(p, l);
    for (const auto& src : wiring.sources(i))
      P.sources.push_back({offsets[src.from], net.subsystems[src.from].state_dim(), src.offset, plans_of(*src.map)});
  }

  std::vector<const BoxSet*> xs, x0s;
  for (const auto& s : net.subsystems) {
    xs.push_back(&s.X);
    x0s.push_back(&s.X0);
  }
  BoxSet X1(offset);
  if (cert.semantics == UnsafeSemantics::product) {
    std::vector<const BoxSet*> x1s;
    for (const auto& s : net.subsystems) x1s.push_back(&s.X1);
    X1 = product_all(x1s);
  } else {
    for (std::size_t i = 0; i < N; ++i) {
      auto sets = xs;
      sets[i] = &net.subsystems[i].X1;
      const auto part = product_all(sets);
      for (const auto& b : part.boxes()) X1.add(b);
    }
  }

  // Per-subsystem scaled barrier values b[i][p-1][l][pt].
  auto barrier_values = [&](Cols cols, std::size_t len, Buffers& buf) {
    std::vector<std::vector<double*>> b(N);
    std::size_t slot = 0;
    for (std::size_t i = 0; i < N; ++i) {
      const auto& P = parts[i];
      for (int p = 0; p < P.M; ++p) {
        double* v = buf.get(slot++, len);
        kernels::eval_batch(P.B[p], cols.subspan(P.offset, P.n), len, v);
        for (std::size_t t = 0; t < len; ++t) v[t] /= P.s;
        b[i].push_back(v);
      }
    }
    return b;
  };

  Condition c1{"C1", "x", product_all(xs), [&](Cols cols, std::size_t len, double* out) {
                 Buffers buf;
                 const auto b = barrier_values(cols, len, buf);
                 for (std::size_t t = 0; t < len; ++t) {
                   double v = -kInf;
                   for (std::size_t i = 0; i < N; ++i) {
                     double mn = kInf;
                     for (int p = 0; p < parts[i].M; ++p)
                       for (int l = 0; l < parts[i].kd; ++l) mn = std::min(mn, parts[i].fac[p][l] * b[i][p][t]);
                     v = std::max(v, mn);
                   }
                   out[t] = v;
                 }
               }};
  Condition c2{"C2", "x", product_all(x0s), [&](Cols cols, std::size_t len, double* out) {
                 Buffers buf;
                 const auto b = barrier_values(cols, len, buf);
                 for (std::size_t t = 0; t < len; ++t) {
                   double v = -kInf;
                   for (std::size_t i = 0; i < N; ++i)
                     for (int p = 0; p < parts[i].M; ++p) v = std::max(v, parts[i].fac[p][0] * b[i][p][t]);
                   out[t] = k.gamma - v;
                 }
               }};
  Condition c3{"C3", "x", X1, [&](Cols cols, std::size_t len, double* out) {
                 Buffers buf;
                 const auto b = barrier_values(cols, len, buf);
                 for (std::size_t t = 0; t < len; ++t) {
                   double v = -kInf;
                   for (std::size_t i = 0; i < N; ++i) {
                     double mn = kInf;
                     for (int p = 0; p < parts[i].M; ++p)
                       for (int l = 0; l < parts[i].kd; ++l) mn = std::min(mn, parts[i].fac[p][l] * b[i][p][t]);
                     v = std::max(v, mn);
                   }
                   out[t] = v - k.lambda;
                 }
               }};
  Condition c4{"C4", "x", product_all(xs), [&](Cols cols, std::size_t len, double* out) {
                 Buffers buf;
                 const auto b = barrier_values(cols, len, buf);
                 std::size_t slot = 0;
                 for (const auto& P : parts) slot += static_cast<std::size_t>(P.M);
                 // e*_i(p, l) = min over admissible p' of scaled expected successor value.
                 std::vector<std::vector<std::vector<double>>> estar(N);
                 std::vector<double> bmin(N * len, kInf);
                 for (std::size_t i = 0; i < N; ++i) {
                   const auto& P = parts[i];
                   std::vector<const double*> wcols(P.m);
                   for (std::size_t d = 0; d < P.m; ++d) wcols[d] = nullptr;
                   for (const auto& src : P.sources)
                     for (std::size_t c = 0; c < src.h.size(); ++c) {
                       double* w = buf.get(slot++, len);
                       kernels::eval_batch(src.h[c], cols.subspan(src.from_offset, src.from_n), len, w);
                       wcols[src.offset + c] = w;
                     }
                   const auto ecols = map_columns(*P.noise_free, cols.subspan(P.offset, P.n), wcols);
                   std::vector<std::vector<double*>> e(static_cast<std::size_t>(P.M));
                   for (int p = 0; p < P.M; ++p)
                     for (int q = 0; q < P.M; ++q) {
                       double* v = buf.get(slot++, len);
                       kernels::eval_batch(P.E[p][q], ecols, len, v);
                       e[p].push_back(v);
                     }
                   estar[i].assign(static_cast<std::size_t>(P.M * P.kd), std::vector<double>(len));
                   for (int p = 1; p <= P.M; ++p)
                     for (int l = 0; l < P.kd; ++l) {
                       auto& es = estar[i][static_cast<std::size_t>((p - 1) * P.kd + l)];
                       for (std::size_t t = 0; t < len; ++t) {
                         double best = kInf;
                         for (int q : admissible_successors(p, l, P.kd, P.M))
                           best = std::min(best, P.fac[q - 1][successor_counter(l, p, q, P.kd)] * e[p - 1][q - 1][t] / P.s);
                         es[t] = best;
                         bmin[i * len + t] = std::min(bmin[i * len + t], P.fac[p - 1][l] * b[i][p - 1][t]);
                       }
                     }
                 }
                 for (std::size_t t = 0; t < len; ++t) {
                   // top two of bmin for max over i != j
                   double m1 = -kInf, m2 = -kInf;
                   std::size_t a1 = N;
                   for (std::size_t i = 0; i < N; ++i) {
                     const double v = bmin[i * len + t];
                     if (v > m1) {
                       m2 = m1;
                       m1 = v;
                       a1 = i;
                     } else if (v > m2) {
                       m2 = v;
                     }
                   }
                   double worst = kInf;
                   for (std::size_t j = 0; j < N; ++j) {
                     const auto& P = parts[j];
                     const double others = j == a1 ? m2 : m1;
                     for (int p = 1; p <= P.M; ++p)
                       for (int l = 0; l < P.kd; ++l) {
                         const double bj = P.fac[p - 1][l] * b[j][p - 1][t];
                         const double rhs = std::max(k.kappa * std::max(bj, others), k.psi);
                         worst = std::min(worst, rhs - estar[j][static_cast<std::size_t>((p - 1) * P.kd + l)][t]);
                       }
                   }
                   out[t] = worst;
                 }
               }};

  std::vector<CheckReport> reports;
  std::uint64_t salt = 21;
  for (const auto* c : {&c1, &c2, &c3, &c4}) {
    auto r = run_condition(*c, grid, salt++);
    if (r.condition == "C1") r.note = "non-negativity of the composed barrier";
    if (r.condition == "C3") r.note = std::string(semantics_name(cert.semantics)) + " unsafe-set semantics";
    if (r.condition == "C4") r.note = "expected value bounded below by max_i E[B_i]/s_i";
    reports.push_back(std::move(r));
  }
  return reports;
}

}  // namespace bcert
