#include "bcert/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "bcert/errors.hpp"
#include "bcert/parse.hpp"

namespace bcert {

const std::vector<Polynomial>& SubsystemSpec::dynamics(int mode) const {
  if (mode < 1 || mode > mode_count())
    throw InputError("subsystem '" + id + "' has no mode " + std::to_string(mode));
  return modes[static_cast<std::size_t>(mode - 1)];
}

std::vector<double> SubsystemSpec::point(std::span<const double> x, std::span<const double> w,
                                         std::span<const double> noise_draw) const {
  if (x.size() != state_dim() || w.size() != input_dim() || noise_draw.size() != noise_dim())
    throw InputError("subsystem '" + id + "': point dimensions (" + std::to_string(x.size()) + ", " +
                     std::to_string(w.size()) + ", " + std::to_string(noise_draw.size()) + ") do not match (" +
                     std::to_string(state_dim()) + ", " + std::to_string(input_dim()) + ", " +
                     std::to_string(noise_dim()) + ")");
  std::vector<double> pt(space->size());
  for (std::size_t v = 0; v < space->size(); ++v) {
    const auto& var = (*space)[v];
    switch (var.role) {
      case Role::state: pt[v] = x[var.index]; break;
      case Role::input: pt[v] = w[var.index]; break;
      case Role::noise: pt[v] = noise_draw[var.index]; break;
    }
  }
  return pt;
}

std::vector<double> SubsystemSpec::step(int mode, std::span<const double> x, std::span<const double> w,
                                        std::span<const double> noise_draw) const {
  const auto& f = dynamics(mode);
  const auto pt = point(x, w, noise_draw);
  std::vector<double> next(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) next[k] = f[k].eval(pt);
  return next;
}

std::vector<Polynomial> SubsystemSpec::all_outputs() const {
  std::vector<Polynomial> out = external_output;
  for (const auto& [target, h] : internal_outputs) out.insert(out.end(), h.begin(), h.end());
  return out;
}

double SubsystemSpec::output_norm(std::span<const double> x) const {
  double m = 0.0;
  for (const auto& h : external_output) m = std::max(m, std::abs(h.eval(x)));
  for (const auto& [target, hs] : internal_outputs)
    for (const auto& h : hs) m = std::max(m, std::abs(h.eval(x)));
  return m;
}

std::vector<Polynomial> identity_outputs(const SpacePtr& state_space) {
  std::vector<Polynomial> out;
  for (const auto& v : state_space->variables()) out.push_back(Polynomial::variable(state_space, v.name));
  return out;
}

SubsystemSpec SubsystemBuilder::build() const {
  SubsystemSpec s;
  s.id = id;
  s.space = make_space(VariableSpace::from_names(state, input, noise));
  s.state_space = make_space(VariableSpace::from_names(state));
  for (const auto& mode : modes) {
    std::vector<Polynomial> f;
    for (const auto& expr : mode) f.push_back(parse_polynomial(expr, s.space));
    s.modes.push_back(std::move(f));
  }
  s.noise = noise_specs.empty() ? std::vector<NoiseSpec>(noise.size(), NoiseSpec::standard_gaussian()) : noise_specs;
  auto parse_outputs = [&](const std::vector<std::string>& exprs) {
    if (exprs.empty()) return identity_outputs(s.state_space);
    std::vector<Polynomial> out;
    for (const auto& e : exprs) out.push_back(parse_polynomial(e, s.state_space));
    return out;
  };
  s.external_output = parse_outputs(external_output);
  for (const auto& [target, exprs] : internal_outputs) s.internal_outputs[target] = parse_outputs(exprs);
  s.X = X;
  s.X0 = X0.dim() == 0 && X0.empty() ? BoxSet(state.size()) : X0;
  s.X1 = X1.dim() == 0 && X1.empty() ? BoxSet(state.size()) : X1;
  s.W = W.dim() == 0 && W.empty() ? BoxSet(input.size()) : W;
  return s;
}

std::optional<std::size_t> NetworkSpec::find(const std::string& id) const {
  for (std::size_t i = 0; i < subsystems.size(); ++i)
    if (subsystems[i].id == id) return i;
  return std::nullopt;
}

std::size_t NetworkSpec::index_of(const std::string& id) const {
  if (auto i = find(id)) return *i;
  throw InputError("unknown subsystem '" + id + "'");
}

bool has_errors(const std::vector<Violation>& v) {
  return std::any_of(v.begin(), v.end(), [](const Violation& x) { return x.severity == Violation::Severity::error; });
}

namespace {

void check_subsystem(const SubsystemSpec& s, std::vector<Violation>& out) {
  auto err = [&](std::string cond, std::string msg) {
    out.push_back({Violation::Severity::error, s.id, std::nullopt, std::move(cond), std::move(msg)});
  };
  const auto n = s.state_dim();
  if (s.modes.empty()) err("modes", "subsystem has no modes");
  for (std::size_t p = 0; p < s.modes.size(); ++p) {
    if (s.modes[p].size() != n)
      err("dynamics-dimension", "mode " + std::to_string(p + 1) + " has " + std::to_string(s.modes[p].size()) +
                                    " components, state dimension is " + std::to_string(n));
    for (const auto& f : s.modes[p])
      if (!(*f.space() == *s.space)) err("dynamics-space", "mode " + std::to_string(p + 1) + " uses a foreign space");
  }
  if (s.noise.size() != s.noise_dim())
    err("noise", std::to_string(s.noise.size()) + " noise specs for " + std::to_string(s.noise_dim()) +
                     " noise variables");
  if (s.X.dim() != n || s.X.empty()) err("state-set", "X must be a non-empty box set of dimension " + std::to_string(n));
  if (s.X0.dim() != n) err("initial-set", "X0 has wrong dimension");
  if (s.X1.dim() != n) err("unsafe-set", "X1 has wrong dimension");
  if (s.X0.dim() == n && s.X.dim() == n && !s.X.contains(s.X0, 1e-12)) err("initial-set", "X0 is not contained in X");
  if (s.X1.dim() == n && s.X.dim() == n && !s.X.contains(s.X1, 1e-12)) err("unsafe-set", "X1 is not contained in X");
  if (s.W.dim() != s.input_dim()) err("input-set", "W has wrong dimension");
  if (s.input_dim() > 0 && s.W.empty()) err("input-set", "W is empty but the subsystem has internal inputs");
  for (const auto& h : s.all_outputs())
    if (!(*h.space() == *s.state_space)) err("output-space", "output map is not over the state variables");
}

}  // namespace

std::vector<Violation> validate_network(const NetworkSpec& net) {
  std::vector<Violation> out;
  std::set<std::string> ids;
  for (const auto& s : net.subsystems) {
    if (!ids.insert(s.id).second)
      out.push_back({Violation::Severity::error, s.id, std::nullopt, "duplicate-id", "subsystem id used twice"});
    check_subsystem(s, out);
  }

  // slices[i] = (offset, len, edge index)
  std::vector<std::vector<std::tuple<std::size_t, std::size_t, std::size_t>>> slices(net.size());
  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    const auto& edge = net.edges[e];
    auto err = [&](const std::string& sub, std::string cond, std::string msg) {
      out.push_back({Violation::Severity::error, sub, e, std::move(cond), std::move(msg)});
    };
    const auto from = net.find(edge.from);
    const auto to = net.find(edge.to);
    if (!from || !to) {
      err(edge.to, "edge-endpoint", "edge " + edge.from + " -> " + edge.to + " names an unknown subsystem");
      continue;
    }
    if (*from == *to) {
      err(edge.to, "self-edge", "a subsystem cannot feed its own internal input");
      continue;
    }
    const auto& src = net.subsystems[*from];
    const auto& dst = net.subsystems[*to];
    auto h = src.internal_outputs.find(edge.to);
    if (h == src.internal_outputs.end()) {
      err(edge.from, "missing-output", "no output map h_" + edge.from + "," + edge.to + " for this edge");
      continue;
    }
    const auto len = h->second.size();
    if (edge.offset + len > dst.input_dim()) {
      err(edge.to, "dimension-mismatch",
          "output y_" + edge.from + "," + edge.to + " has dimension " + std::to_string(len) +
              " but the input slice at offset " + std::to_string(edge.offset) + " only has " +
              std::to_string(dst.input_dim() > edge.offset ? dst.input_dim() - edge.offset : 0) + " entries");
      continue;
    }
    slices[*to].emplace_back(edge.offset, len, e);

    // Range containment Y_ji within W_i's slice, by interval arithmetic.
    if (!dst.W.empty() && !src.X.empty() && src.X.dim() == src.state_dim()) {
      const Box w_hull = dst.W.hull();
      for (std::size_t k = 0; k < len; ++k) {
        Interval range{0, 0};
        bool first = true;
        for (const auto& box : src.X.boxes()) {
          const auto r = range_bound(h->second[k], box.intervals());
          range = first ? r : Interval::hull(range, r);
          first = false;
        }
        if (!w_hull[edge.offset + k].contains(range, 1e-9))
          out.push_back({Violation::Severity::warning, edge.to, e, "range-containment",
                         "interval bound [" + std::to_string(range.lo) + ", " + std::to_string(range.hi) +
                             "] of output component " + std::to_string(k) + " is not inside W slice [" +
                             std::to_string(w_hull[edge.offset + k].lo) + ", " +
                             std::to_string(w_hull[edge.offset + k].hi) + "]"});
      }
    }
  }

  // Internal outputs without an edge should be absent (h_ij == 0).
  for (const auto& s : net.subsystems)
    for (const auto& [target, h] : s.internal_outputs) {
      const bool wired = std::any_of(net.edges.begin(), net.edges.end(),
                                     [&](const Edge& e) { return e.from == s.id && e.to == target; });
      if (!wired)
        out.push_back({Violation::Severity::error, s.id, std::nullopt, "dangling-output",
                       "output map towards '" + target + "' has no matching edge"});
    }

  // Slices must tile each internal-input vector exactly.
  for (std::size_t i = 0; i < net.size(); ++i) {
    auto& sl = slices[i];
    std::sort(sl.begin(), sl.end());
    std::size_t covered = 0;
    for (const auto& [off, len, e] : sl) {
      if (off < covered)
        out.push_back({Violation::Severity::error, net.subsystems[i].id, e, "input-overlap",
                       "input slice at offset " + std::to_string(off) + " overlaps a previous slice"});
      else if (off > covered)
        out.push_back({Violation::Severity::error, net.subsystems[i].id, e, "input-gap",
                       "input entries [" + std::to_string(covered) + ", " + std::to_string(off) + ") are not wired"});
      covered = std::max(covered, off + len);
    }
    if (covered < net.subsystems[i].input_dim())
      out.push_back({Violation::Severity::error, net.subsystems[i].id, std::nullopt, "input-gap",
                     "input entries [" + std::to_string(covered) + ", " +
                         std::to_string(net.subsystems[i].input_dim()) + ") are not wired"});
  }
  return out;
}

Wiring::Wiring(const NetworkSpec& net) : net_(&net), sources_(net.size()) {
  for (const auto& edge : net.edges) {
    const auto from = net.index_of(edge.from);
    const auto to = net.index_of(edge.to);
    const auto& h = net.subsystems[from].internal_outputs.at(edge.to);
    sources_[to].push_back({from, edge.offset, &h});
  }
}

std::vector<double> Wiring::inputs(std::size_t i, std::span<const std::vector<double>> states) const {
  std::vector<double> w(net_->subsystems[i].input_dim(), 0.0);
  for (const auto& src : sources_[i])
    for (std::size_t k = 0; k < src.map->size(); ++k) w[src.offset + k] = (*src.map)[k].eval(states[src.from]);
  return w;
}

// ---------------------------------------------------------------------------

std::size_t FlatSystem::state_dim() const { return space->count(Role::state); }

std::optional<std::uint64_t> FlatSystem::mode_count() const {
  std::uint64_t n = 1;
  for (int r : mode_radices) {
    if (n > UINT64_MAX / static_cast<std::uint64_t>(r)) return std::nullopt;
    n *= static_cast<std::uint64_t>(r);
  }
  return n;
}

std::vector<Polynomial> FlatSystem::dynamics_for(std::span<const int> modes) const {
  if (modes.size() != dynamics.size()) throw InputError("mode tuple length does not match the subsystem count");
  std::vector<Polynomial> out;
  for (std::size_t i = 0; i < dynamics.size(); ++i) {
    if (modes[i] < 1 || modes[i] > mode_radices[i]) throw InputError("mode tuple entry out of range");
    const auto& f = dynamics[i][static_cast<std::size_t>(modes[i] - 1)];
    out.insert(out.end(), f.begin(), f.end());
  }
  return out;
}

std::vector<double> FlatSystem::step(std::span<const double> x, std::span<const int> modes,
                                     std::span<const double> noise_draw) const {
  if (x.size() != state_dim() || noise_draw.size() != noise_dim())
    throw InputError("flat step: dimension mismatch");
  std::vector<double> pt(x.begin(), x.end());
  pt.insert(pt.end(), noise_draw.begin(), noise_draw.end());
  std::vector<double> next;
  next.reserve(x.size());
  for (std::size_t i = 0; i < dynamics.size(); ++i) {
    if (modes[i] < 1 || modes[i] > mode_radices[i]) throw InputError("mode tuple entry out of range");
    for (const auto& f : dynamics[i][static_cast<std::size_t>(modes[i] - 1)]) next.push_back(f.eval(pt));
  }
  return next;
}

SubsystemSpec FlatSystem::to_subsystem(const std::string& id, std::uint64_t max_modes) const {
  const auto count = mode_count();
  if (!count || *count > max_modes) throw CapabilityError("too many joint modes to materialize");
  SubsystemSpec s;
  s.id = id;
  s.space = space;
  std::vector<std::string> state_names;
  for (auto pos : space->positions(Role::state)) state_names.push_back((*space)[pos].name);
  s.state_space = make_space(VariableSpace::from_names(state_names));
  s.noise = noise;
  std::vector<int> tuple(mode_radices.size(), 1);
  for (std::uint64_t m = 0; m < *count; ++m) {
    std::uint64_t r = m;
    for (std::size_t i = 0; i < tuple.size(); ++i) {
      tuple[i] = static_cast<int>(r % static_cast<std::uint64_t>(mode_radices[i])) + 1;
      r /= static_cast<std::uint64_t>(mode_radices[i]);
    }
    s.modes.push_back(dynamics_for(tuple));
  }
  s.external_output = identity_outputs(s.state_space);
  s.W = BoxSet(0);
  return s;
}

FlatSystem flatten(const NetworkSpec& net) {
  const auto violations = validate_network(net);
  for (const auto& v : violations)
    if (v.severity == Violation::Severity::error)
      throw InputError("cannot flatten invalid network: [" + v.subsystem + "] " + v.condition + ": " + v.message);

  FlatSystem flat;
  std::vector<std::string> state_names, noise_names;
  for (const auto& s : net.subsystems) {
    flat.state_offset.push_back(state_names.size());
    flat.noise_offset.push_back(noise_names.size());
    for (auto pos : s.space->positions(Role::state)) state_names.push_back(s.id + "." + (*s.space)[pos].name);
    for (auto pos : s.space->positions(Role::noise)) noise_names.push_back(s.id + "." + (*s.space)[pos].name);
    flat.noise.insert(flat.noise.end(), s.noise.begin(), s.noise.end());
    flat.mode_radices.push_back(s.mode_count());
  }
  flat.space = make_space(VariableSpace::from_names(state_names, {}, noise_names));

  // Local state variable of subsystem j as a flat polynomial.
  auto local_state_images = [&](std::size_t j) {
    std::map<std::string, Polynomial> m;
    const auto& s = net.subsystems[j];
    for (auto pos : s.state_space->positions(Role::state)) {
      const auto& name = (*s.state_space)[pos].name;
      m.emplace(name, Polynomial::variable(flat.space, s.id + "." + name));
    }
    return m;
  };

  for (std::size_t i = 0; i < net.size(); ++i) {
    const auto& s = net.subsystems[i];
    std::map<std::string, Polynomial> subst;
    for (auto pos : s.space->positions(Role::state)) {
      const auto& name = (*s.space)[pos].name;
      subst.emplace(name, Polynomial::variable(flat.space, s.id + "." + name));
    }
    for (auto pos : s.space->positions(Role::noise)) {
      const auto& name = (*s.space)[pos].name;
      subst.emplace(name, Polynomial::variable(flat.space, s.id + "." + name));
    }
    std::vector<Polynomial> input_images(s.input_dim(), Polynomial(flat.space));
    for (const auto& edge : net.edges) {
      if (edge.to != s.id) continue;
      const auto j = net.index_of(edge.from);
      const auto& h = net.subsystems[j].internal_outputs.at(s.id);
      const auto images = local_state_images(j);
      for (std::size_t k = 0; k < h.size(); ++k) input_images[edge.offset + k] = h[k].compose(images);
    }
    for (auto pos : s.space->positions(Role::input))
      subst.emplace((*s.space)[pos].name, input_images[(*s.space)[pos].index]);

    std::vector<std::vector<Polynomial>> modes;
    for (const auto& f : s.modes) {
      std::vector<Polynomial> g;
      for (const auto& fk : f) g.push_back(fk.compose(subst));
      modes.push_back(std::move(g));
    }
    flat.dynamics.push_back(std::move(modes));
  }
  return flat;
}

}  // namespace bcert
