#include "bcert/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "bcert/errors.hpp"
#include "bcert/fixtures.hpp"
#include "bcert/parse.hpp"

namespace bcert {

namespace {

std::string key_path(const std::string& base, std::string_view key) { return base + "." + std::string(key); }
std::string idx_path(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

const char* type_of(const Json& j) { return j.type_name(); }

[[noreturn]] void fail(const std::string& path, const std::string& msg) { throw SchemaError(path, msg); }

// Strict view of an object: every key must be claimed before done().
class Obj {
 public:
  Obj(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) fail(path_, std::string("expected an object, got ") + type_of(j));
  }
  const Json* opt(std::string_view key) {
    seen_.insert(std::string(key));
    auto it = j_.find(std::string(key));
    return it == j_.end() ? nullptr : &*it;
  }
  const Json& req(std::string_view key) {
    if (const Json* v = opt(key)) return *v;
    fail(path_, "missing required key '" + std::string(key) + "'");
  }
  std::string at(std::string_view key) const { return key_path(path_, key); }
  const std::string& path() const { return path_; }
  void done() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) fail(key_path(path_, it.key()), "unknown key");
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

double as_double(const Json& j, const std::string& path) {
  if (!j.is_number()) fail(path, std::string("expected a number, got ") + type_of(j));
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "expected a finite number");
  return v;
}

long long as_int(const Json& j, const std::string& path) {
  if (j.is_number_integer()) return j.get<long long>();
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (std::floor(v) == v && std::abs(v) < 9e15) return static_cast<long long>(v);
  }
  fail(path, std::string("expected an integer, got ") + type_of(j));
}

std::size_t as_count(const Json& j, const std::string& path) {
  const auto v = as_int(j, path);
  if (v < 0) fail(path, "expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

std::string as_string(const Json& j, const std::string& path) {
  if (!j.is_string()) fail(path, std::string("expected a string, got ") + type_of(j));
  return j.get<std::string>();
}

bool as_bool(const Json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, std::string("expected a boolean, got ") + type_of(j));
  return j.get<bool>();
}

const Json& as_array(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, std::string("expected an array, got ") + type_of(j));
  return j;
}

std::vector<std::string> strings(const Json& j, const std::string& path) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < as_array(j, path).size(); ++i) out.push_back(as_string(j[i], idx_path(path, i)));
  return out;
}

std::vector<double> doubles(const Json& j, const std::string& path) {
  std::vector<double> out;
  for (std::size_t i = 0; i < as_array(j, path).size(); ++i) out.push_back(as_double(j[i], idx_path(path, i)));
  return out;
}

// Re-raises library errors raised while interpreting a value at `path`.
template <class F>
auto located(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const SchemaError&) {
    throw;
  } catch (const InputError& e) {
    fail(path, e.what());
  }
}

Json noise_to_json(const std::string& name, const NoiseSpec& n) {
  Json j;
  j["name"] = name;
  if (n.is_gaussian()) {
    j["dist"] = "gaussian";
    j["mean"] = n.gaussian().mean;
    j["std"] = n.gaussian().std;
  } else {
    j["dist"] = "uniform";
    j["lo"] = n.uniform().lo;
    j["hi"] = n.uniform().hi;
  }
  return j;
}

std::pair<std::string, NoiseSpec> noise_from_json(const Json& j, const std::string& path) {
  if (j.is_string()) return {j.get<std::string>(), NoiseSpec::standard_gaussian()};
  Obj o(j, path);
  const auto name = as_string(o.req("name"), o.at("name"));
  std::string dist = "gaussian";
  if (const Json* d = o.opt("dist")) dist = as_string(*d, o.at("dist"));
  NoiseSpec spec;
  if (dist == "gaussian") {
    Gaussian g;
    if (const Json* v = o.opt("mean")) g.mean = as_double(*v, o.at("mean"));
    if (const Json* v = o.opt("std")) g.std = as_double(*v, o.at("std"));
    if (!(g.std > 0.0)) fail(o.at("std"), "standard deviation must be positive");
    spec = NoiseSpec(g);
  } else if (dist == "uniform") {
    Uniform u;
    u.lo = as_double(o.req("lo"), o.at("lo"));
    u.hi = as_double(o.req("hi"), o.at("hi"));
    if (!(u.lo < u.hi)) fail(path, "uniform noise needs lo < hi");
    spec = NoiseSpec(u);
  } else {
    fail(o.at("dist"), "unknown distribution '" + dist + "' (expected gaussian or uniform)");
  }
  o.done();
  return {name, spec};
}

std::vector<std::string> names(const VariableSpace& s, Role r) {
  std::vector<std::string> out;
  for (const auto& v : s.variables())
    if (v.role == r) out.push_back(v.name);
  return out;
}

Json polys_to_json(std::span<const Polynomial> ps) {
  Json a = Json::array();
  for (const auto& p : ps) a.push_back(polynomial_to_json(p));
  return a;
}

std::vector<Polynomial> polys_from_json(const Json& j, const SpacePtr& space, const std::string& path) {
  std::vector<Polynomial> out;
  for (std::size_t i = 0; i < as_array(j, path).size(); ++i)
    out.push_back(polynomial_from_json(j[i], space, idx_path(path, i)));
  return out;
}

Json subsystem_to_json(const SubsystemSpec& s) {
  Json j;
  j["id"] = s.id;
  j["state"] = names(*s.space, Role::state);
  j["input"] = names(*s.space, Role::input);
  Json noise = Json::array();
  const auto nn = names(*s.space, Role::noise);
  for (std::size_t i = 0; i < nn.size(); ++i) noise.push_back(noise_to_json(nn[i], s.noise[i]));
  j["noise"] = noise;
  Json modes = Json::array();
  for (const auto& m : s.modes) modes.push_back(polys_to_json(m));
  j["modes"] = modes;
  Json outputs;
  outputs["external"] = polys_to_json(s.external_output);
  Json internal = Json::object();
  for (const auto& [target, h] : s.internal_outputs) internal[target] = polys_to_json(h);
  outputs["internal"] = internal;
  j["outputs"] = outputs;
  j["X"] = boxset_to_json(s.X);
  j["X0"] = boxset_to_json(s.X0);
  j["X1"] = boxset_to_json(s.X1);
  j["W"] = boxset_to_json(s.W);
  return j;
}

SubsystemSpec subsystem_from_json(const Json& j, const std::string& path) {
  Obj o(j, path);
  SubsystemSpec s;
  s.id = as_string(o.req("id"), o.at("id"));
  if (s.id.empty()) fail(o.at("id"), "subsystem id must be non-empty");
  const auto state = strings(o.req("state"), o.at("state"));
  if (state.empty()) fail(o.at("state"), "at least one state variable is required");
  std::vector<std::string> input, noise_names;
  if (const Json* v = o.opt("input")) input = strings(*v, o.at("input"));
  if (const Json* v = o.opt("noise")) {
    for (std::size_t i = 0; i < as_array(*v, o.at("noise")).size(); ++i) {
      auto [name, spec] = noise_from_json((*v)[i], idx_path(o.at("noise"), i));
      noise_names.push_back(name);
      s.noise.push_back(spec);
    }
  }
  s.space = located(path, [&] { return make_space(VariableSpace::from_names(state, input, noise_names)); });
  s.state_space = make_space(VariableSpace::from_names(state));
  const Json& modes = as_array(o.req("modes"), o.at("modes"));
  if (modes.empty()) fail(o.at("modes"), "at least one mode is required");
  for (std::size_t p = 0; p < modes.size(); ++p) {
    const auto mp = idx_path(o.at("modes"), p);
    auto f = polys_from_json(modes[p], s.space, mp);
    if (f.size() != state.size())
      fail(mp, "mode has " + std::to_string(f.size()) + " components for " + std::to_string(state.size()) +
                   " state variables");
    s.modes.push_back(std::move(f));
  }
  s.external_output = identity_outputs(s.state_space);
  if (const Json* v = o.opt("outputs")) {
    Obj out(*v, o.at("outputs"));
    if (const Json* e = out.opt("external")) s.external_output = polys_from_json(*e, s.state_space, out.at("external"));
    if (const Json* in = out.opt("internal")) {
      Obj io(*in, out.at("internal"));
      for (auto it = in->begin(); it != in->end(); ++it) {
        io.opt(it.key());
        s.internal_outputs[it.key()] =
            it->is_null() ? identity_outputs(s.state_space) : polys_from_json(*it, s.state_space, io.at(it.key()));
      }
      io.done();
    }
    out.done();
  }
  s.X = boxset_from_json(o.req("X"), state.size(), o.at("X"));
  s.X0 = boxset_from_json(o.req("X0"), state.size(), o.at("X0"));
  s.X1 = boxset_from_json(o.req("X1"), state.size(), o.at("X1"));
  s.W = input.empty() ? BoxSet(0) : boxset_from_json(o.req("W"), input.size(), o.at("W"));
  if (input.empty()) o.opt("W");
  o.done();
  return s;
}

Json point_json(std::span<const double> x) { return Json(std::vector<double>(x.begin(), x.end())); }

std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

GridConfig grid_from_json(const Json& j, const std::string& path) {
  Obj o(j, path);
  GridConfig g;
  if (const Json* v = o.opt("resolution")) g.resolution = as_double(*v, o.at("resolution"));
  if (const Json* v = o.opt("points_per_dim")) g.points_per_dim = as_count(*v, o.at("points_per_dim"));
  if (const Json* v = o.opt("max_points")) g.max_points = as_count(*v, o.at("max_points"));
  if (const Json* v = o.opt("refine_starts")) g.refine_starts = as_count(*v, o.at("refine_starts"));
  if (const Json* v = o.opt("refine_sweeps")) g.refine_sweeps = as_count(*v, o.at("refine_sweeps"));
  if (const Json* v = o.opt("max_counterexamples")) g.max_counterexamples = as_count(*v, o.at("max_counterexamples"));
  if (const Json* v = o.opt("seed")) g.seed = as_count(*v, o.at("seed"));
  if (g.resolution < 0.0) fail(o.at("resolution"), "resolution must be non-negative");
  if (g.points_per_dim < 2) fail(o.at("points_per_dim"), "at least 2 points per dimension are required");
  if (g.max_points == 0) fail(o.at("max_points"), "max_points must be positive");
  o.done();
  return g;
}

Json grid_to_json(const GridConfig& g) {
  return {{"resolution", g.resolution},       {"points_per_dim", g.points_per_dim},
          {"max_points", g.max_points},       {"refine_starts", g.refine_starts},
          {"refine_sweeps", g.refine_sweeps}, {"max_counterexamples", g.max_counterexamples},
          {"seed", g.seed}};
}

}  // namespace

// ---- polynomials, sets, networks ----

Json polynomial_to_json(const Polynomial& p) {
  Json j;
  std::vector<std::string> vars;
  for (const auto& v : p.space()->variables()) vars.push_back(v.name);
  j["vars"] = vars;
  Json terms = Json::array();
  for (const auto& [e, c] : p.terms()) terms.push_back({{"exp", e}, {"coef", c}});
  j["terms"] = terms;
  return j;
}

Polynomial polynomial_from_json(const Json& j, const SpacePtr& space, const std::string& path) {
  if (j.is_string()) return located(path, [&] { return parse_polynomial(j.get<std::string>(), space); });
  if (j.is_number()) return Polynomial::constant(space, as_double(j, path));
  Obj o(j, path);
  const auto vars = strings(o.req("vars"), o.at("vars"));
  std::vector<std::size_t> pos;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const auto p = space->find(vars[i]);
    if (!p) fail(idx_path(o.at("vars"), i), "unknown variable '" + vars[i] + "'");
    pos.push_back(*p);
  }
  Polynomial out(space);
  const Json& terms = as_array(o.req("terms"), o.at("terms"));
  for (std::size_t t = 0; t < terms.size(); ++t) {
    Obj term(terms[t], idx_path(o.at("terms"), t));
    const Json& e = as_array(term.req("exp"), term.at("exp"));
    if (e.size() != vars.size()) fail(term.at("exp"), "exponent length does not match vars");
    Exponents exps(space->size(), 0);
    for (std::size_t k = 0; k < e.size(); ++k) {
      const auto v = as_int(e[k], idx_path(term.at("exp"), k));
      if (v < 0 || v > 64) fail(idx_path(term.at("exp"), k), "exponent must lie in [0, 64]");
      exps[pos[k]] = static_cast<std::uint16_t>(exps[pos[k]] + v);
    }
    out.add_term(exps, as_double(term.req("coef"), term.at("coef")));
    term.done();
  }
  o.done();
  return out;
}

Json boxset_to_json(const BoxSet& s) {
  Json a = Json::array();
  for (const auto& b : s.boxes()) {
    Json box = Json::array();
    for (const auto& iv : b.intervals()) box.push_back({iv.lo, iv.hi});
    a.push_back(box);
  }
  return a;
}

BoxSet boxset_from_json(const Json& j, std::size_t dim, const std::string& path) {
  BoxSet out(dim);
  for (std::size_t b = 0; b < as_array(j, path).size(); ++b) {
    const auto bp = idx_path(path, b);
    const Json& box = as_array(j[b], bp);
    if (box.size() != dim)
      fail(bp, "box has " + std::to_string(box.size()) + " intervals, expected " + std::to_string(dim));
    std::vector<Interval> ivs;
    for (std::size_t d = 0; d < dim; ++d) {
      const auto ip = idx_path(bp, d);
      const Json& iv = as_array(box[d], ip);
      if (iv.size() != 2) fail(ip, "interval must be [lo, hi]");
      const double lo = as_double(iv[0], idx_path(ip, 0)), hi = as_double(iv[1], idx_path(ip, 1));
      if (!(lo <= hi)) fail(ip, "interval needs lo <= hi");
      ivs.push_back({lo, hi});
    }
    out.add(Box(std::move(ivs)));
  }
  return out;
}

Json network_to_json(const NetworkSpec& net) {
  Json subs = Json::array();
  for (const auto& s : net.subsystems) subs.push_back(subsystem_to_json(s));
  Json edges = Json::array();
  for (const auto& e : net.edges) edges.push_back({{"from", e.from}, {"to", e.to}, {"offset", e.offset}});
  return {{"subsystems", subs}, {"edges", edges}};
}

NetworkSpec network_from_json(const Json& j, const std::string& path) {
  Obj o(j, path);
  NetworkSpec net;
  const Json& subs = as_array(o.req("subsystems"), o.at("subsystems"));
  if (subs.empty()) fail(o.at("subsystems"), "at least one subsystem is required");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < subs.size(); ++i) {
    net.subsystems.push_back(subsystem_from_json(subs[i], idx_path(o.at("subsystems"), i)));
    if (!ids.insert(net.subsystems.back().id).second)
      fail(idx_path(o.at("subsystems"), i) + ".id", "duplicate subsystem id '" + net.subsystems.back().id + "'");
  }
  if (const Json* e = o.opt("edges")) {
    for (std::size_t k = 0; k < as_array(*e, o.at("edges")).size(); ++k) {
      Obj eo((*e)[k], idx_path(o.at("edges"), k));
      Edge edge;
      edge.from = as_string(eo.req("from"), eo.at("from"));
      edge.to = as_string(eo.req("to"), eo.at("to"));
      if (const Json* off = eo.opt("offset")) edge.offset = as_count(*off, eo.at("offset"));
      eo.done();
      net.edges.push_back(edge);
    }
  }
  o.done();
  // Edges imply identity internal outputs unless given explicitly.
  for (const auto& e : net.edges)
    if (auto from = net.find(e.from)) {
      auto& s = net.subsystems[*from];
      if (!s.internal_outputs.count(e.to)) s.internal_outputs[e.to] = identity_outputs(s.state_space);
    }
  return net;
}

// ---- certificates ----

Json constants_to_json(const CertConstants& k) {
  return {{"kappa", k.kappa},
          {"gamma", k.gamma},
          {"lambda", k.lambda},
          {"psi", k.psi},
          {"alpha", {{"coef", k.alpha.coef}, {"exp", k.alpha.exp}}},
          {"rho", {{"coef", k.rho.coef}, {"exp", k.rho.exp}}}};
}

CertConstants constants_from_json(const Json& j, const std::string& path) {
  Obj o(j, path);
  CertConstants k;
  k.kappa = as_double(o.req("kappa"), o.at("kappa"));
  k.gamma = as_double(o.req("gamma"), o.at("gamma"));
  k.lambda = as_double(o.req("lambda"), o.at("lambda"));
  k.psi = as_double(o.req("psi"), o.at("psi"));
  auto power = [&](std::string_view key, PowerLawFn dflt) {
    const Json* v = o.opt(key);
    if (!v) return dflt;
    Obj f(*v, o.at(key));
    PowerLawFn out{as_double(f.req("coef"), f.at("coef")), 1.0};
    if (const Json* e = f.opt("exp")) out.exp = as_double(*e, f.at("exp"));
    f.done();
    return out;
  };
  k.alpha = power("alpha", k.alpha);
  k.rho = power("rho", k.rho);
  o.done();
  located(path, [&] { k.validate(); return 0; });
  return k;
}

Json verification_to_json(const Verification& v) {
  Json j{{"status", status_name(v.status)}, {"resolution", v.resolution}};
  if (!v.counterexample.empty()) j["counterexample"] = v.counterexample;
  return j;
}

Json cbc_to_json(const CbcCertificate& c) {
  return {{"mode", c.mode},
          {"barrier", polynomial_to_json(c.barrier)},
          {"barrier_text", c.barrier.to_string()},
          {"constants", constants_to_json(c.constants)},
          {"verification", verification_to_json(c.verification)}};
}

CbcCertificate cbc_from_json(const Json& j, const SpacePtr& state_space, const std::string& path) {
  Obj o(j, path);
  CbcCertificate c;
  c.mode = static_cast<int>(as_int(o.req("mode"), o.at("mode")));
  if (c.mode < 1) fail(o.at("mode"), "modes are numbered from 1");
  c.barrier = polynomial_from_json(o.req("barrier"), state_space, o.at("barrier"));
  c.constants = constants_from_json(o.req("constants"), o.at("constants"));
  o.opt("barrier_text");
  if (const Json* v = o.opt("verification")) {
    Obj vo(*v, o.at("verification"));
    const auto s = as_string(vo.req("status"), vo.at("status"));
    if (s == "verified") {
      c.verification.status = CertStatus::verified;
    } else if (s == "refuted") {
      c.verification.status = CertStatus::refuted;
    } else if (s != "unchecked") {
      fail(vo.at("status"), "unknown status '" + s + "'");
    }
    if (const Json* r = vo.opt("resolution")) c.verification.resolution = as_double(*r, vo.at("resolution"));
    if (const Json* x = vo.opt("counterexample")) c.verification.counterexample = doubles(*x, vo.at("counterexample"));
    vo.done();
  }
  o.done();
  return c;
}

Json apbc_to_json(const ApbcCertificate& c) {
  Json barriers = Json::array();
  for (const auto& b : c.barriers) barriers.push_back({{"poly", polynomial_to_json(b)}, {"text", b.to_string()}});
  return {{"barriers", barriers},          {"mode_kappas", c.mode_kappas},
          {"epsilon", c.epsilon},          {"k_d", c.k_d},
          {"constants", constants_to_json(c.constants)}, {"verification", verification_to_json(c.verification)}};
}

Json abc_to_json(const AbcCertificate& c) {
  Json parts = Json::array();
  for (const auto& p : c.parts) parts.push_back(apbc_to_json(p));
  return {{"semantics", semantics_name(c.semantics)},
          {"scalings", c.scalings},
          {"constants", constants_to_json(c.constants)},
          {"verification", verification_to_json(c.verification)},
          {"parts", parts}};
}

Json report_to_json(const CheckReport& r) {
  Json j{{"condition", r.condition},   {"status", status_name(r.status)}, {"worst_margin", r.worst_margin},
         {"resolution", r.resolution}, {"points", r.points},               {"sampled", r.sampled},
         {"layout", r.layout}};
  if (r.mode) j["mode"] = *r.mode;
  if (r.counter) j["counter"] = *r.counter;
  if (!r.counterexample.empty()) j["counterexample"] = point_json(r.counterexample);
  if (r.counterexamples.size() > 1) {
    Json all = Json::array();
    for (const auto& x : r.counterexamples) all.push_back(point_json(x));
    j["counterexamples"] = all;
  }
  if (!r.witnesses.empty()) {
    Json w = Json::array();
    for (const auto& [p, x] : r.witnesses) w.push_back({{"mode", p}, {"w", point_json(x)}});
    j["witnesses"] = w;
  }
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

Json reports_to_json(std::span<const CheckReport> r) {
  Json a = Json::array();
  for (const auto& x : r) a.push_back(report_to_json(x));
  return a;
}

Json bound_to_json(const SafetyBound& b) {
  return {{"gamma", b.gamma}, {"lambda", b.lambda},  {"kappa", b.kappa},
          {"psi", b.psi},     {"horizon", b.horizon}, {"delta", b.delta},
          {"probability", 1.0 - b.delta}, {"branch", branch_name(b.branch)}, {"vacuous", b.vacuous}};
}

Json mu_to_json(const MuEstimate& m) {
  Json j{{"mu", m.mu},         {"inflated", m.inflated},     {"grid_max", m.grid_max}, {"p", m.p},
         {"q", m.q},           {"points", m.points},         {"skipped", m.skipped},   {"sampled", m.sampled},
         {"resolution", m.resolution}};
  if (!m.argmax.empty()) j["argmax"] = m.argmax;
  if (!m.skip_list.empty()) j["skip_list"] = m.skip_list;
  return j;
}

Json small_gain_to_json(const SmallGainResult& r, const GainDigraph& g) {
  Json edges = Json::array();
  for (const auto& e : g.edges)
    edges.push_back({{"from", g.ids[e.from]}, {"to", g.ids[e.to]}, {"coef", e.gain.coef}, {"exp", e.gain.exp}});
  Json cycle = Json::array();
  for (auto i : r.cycle) cycle.push_back(g.ids[i]);
  Json j{{"satisfied", r.satisfied}, {"edges", edges}, {"cycle", cycle}, {"reason", r.reason}};
  if (std::isfinite(r.max_cycle_mean))
    j["max_cycle_mean"] = r.max_cycle_mean;
  else
    j["max_cycle_mean"] = nullptr;
  return j;
}

Json derivation_to_json(std::span<const DerivationRow> rows) {
  Json a = Json::array();
  for (const auto& r : rows) a.push_back({{"constant", r.constant}, {"formula", r.formula}, {"value", r.value}});
  return a;
}

Json proportion_to_json(const ProportionEstimate& e) {
  Json j{{"count", e.count}};
  j["frequency"] = e.frequency ? Json(*e.frequency) : Json(nullptr);
  j["lower95"] = e.lower95 ? Json(*e.lower95) : Json(nullptr);
  j["upper95"] = e.upper95 ? Json(*e.upper95) : Json(nullptr);
  return j;
}

Json sim_report_to_json(const SimReport& r) {
  return {{"trajectories", r.trajectories},
          {"horizon", r.horizon},
          {"seed", r.seed},
          {"controller", controller_name(r.controller)},
          {"semantics", semantics_name(r.semantics)},
          {"exceedance", proportion_to_json(r.exceedance)},
          {"entered_unsafe", proportion_to_json(r.entered_unsafe)},
          {"bound", bound_to_json(r.bound)},
          {"controller_checks", r.controller_checks},
          {"controller_violations", r.controller_violations},
          {"dwell_violations", r.dwell_violations},
          {"max_barrier", r.max_barrier},
          {"warnings", r.warnings}};
}

Json violations_to_json(std::span<const Violation> v) {
  Json a = Json::array();
  for (const auto& x : v) {
    Json j{{"severity", x.severity == Violation::Severity::error ? "error" : "warning"},
           {"subsystem", x.subsystem},
           {"condition", x.condition},
           {"message", x.message}};
    if (x.edge) j["edge"] = *x.edge;
    a.push_back(j);
  }
  return a;
}

// ---- project files ----

std::vector<CbcCertificate> Project::certificates_for(const std::string& id) const {
  auto it = certificates.find(id);
  if (it == certificates.end()) it = certificates.find("*");
  if (it == certificates.end()) return {};
  auto out = it->second;
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.mode < b.mode; });
  return out;
}

Project parse_project(std::string_view text) {
  Json root;
  try {
    root = Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
    throw SchemaError("line " + std::to_string(line) + ", column " + std::to_string(col), e.what());
  }
  Obj o(root, "$");
  const auto version = as_int(o.req("schema_version"), o.at("schema_version"));
  if (version != kSchemaVersion)
    fail(o.at("schema_version"), "unsupported schema version " + std::to_string(version) + " (expected " +
                                     std::to_string(kSchemaVersion) + ")");
  Project p;
  const Json* net = o.opt("network");
  const Json* fix = o.opt("fixture");
  if ((net != nullptr) == (fix != nullptr)) fail("$", "exactly one of 'network' and 'fixture' is required");
  if (net) {
    p.net = network_from_json(*net, o.at("network"));
  } else {
    Obj f(*fix, o.at("fixture"));
    const auto name = as_string(f.req("name"), f.at("name"));
    const auto n = as_count(f.req("n"), f.at("n"));
    f.done();
    auto fx = located(o.at("fixture"), [&] { return make_fixture(name, n); });
    p.net = std::move(fx.net);
    p.fixture = name;
    p.fixture_n = n;
    p.certificates["*"] = std::move(fx.cbcs);
    p.dwell = fx.dwell;
    p.horizon = fx.horizon;
  }
  if (const Json* certs = o.opt("certificates")) {
    Obj co(*certs, o.at("certificates"));
    for (auto it = certs->begin(); it != certs->end(); ++it) {
      co.opt(it.key());
      const auto cp = co.at(it.key());
      SpacePtr ss;
      if (it.key() == "*") {
        ss = p.net.subsystems.front().state_space;
        for (const auto& s : p.net.subsystems)
          if (!(*s.state_space == *ss)) fail(cp, "'*' needs identical state variables in every subsystem");
      } else {
        const auto i = p.net.find(it.key());
        if (!i) fail(cp, "no subsystem with id '" + it.key() + "'");
        ss = p.net.subsystems[*i].state_space;
      }
      std::vector<CbcCertificate> list;
      std::set<int> modes;
      for (std::size_t k = 0; k < as_array(*it, cp).size(); ++k) {
        list.push_back(cbc_from_json((*it)[k], ss, idx_path(cp, k)));
        if (!modes.insert(list.back().mode).second) fail(idx_path(cp, k) + ".mode", "duplicate mode");
      }
      p.certificates[it.key()] = std::move(list);
    }
    co.done();
  }
  if (const Json* d = o.opt("dwell")) {
    Obj dj(*d, o.at("dwell"));
    // mu = 0 asks for an estimate, k_d = 0 for the smallest admissible value.
    DwellParams dp{2.0, 0.0, 0};
    if (const Json* v = dj.opt("epsilon")) dp.epsilon = as_double(*v, dj.at("epsilon"));
    if (const Json* v = dj.opt("mu")) {
      dp.mu = as_double(*v, dj.at("mu"));
      if (!(dp.mu == 0.0 || dp.mu >= 1.0)) fail(dj.at("mu"), "mu must be 0 (estimate) or at least 1");
    }
    if (const Json* v = dj.opt("k_d")) {
      dp.k_d = static_cast<int>(as_int(*v, dj.at("k_d")));
      if (dp.k_d < 0) fail(dj.at("k_d"), "k_d must be 0 (smallest admissible) or at least 1");
    }
    if (!(dp.epsilon > 1.0)) fail(dj.at("epsilon"), "epsilon must exceed 1");
    dj.done();
    p.dwell = dp;
  }
  if (const Json* c = o.opt("composition")) {
    Obj cj(*c, o.at("composition"));
    if (const Json* v = cj.opt("sigma")) {
      const auto s = as_string(*v, cj.at("sigma"));
      if (s == "auto") {
        p.composition.sigma = SigmaMode::automatic;
      } else if (s == "identity") {
        p.composition.sigma = SigmaMode::identity;
      } else {
        fail(cj.at("sigma"), "expected 'auto' or 'identity'");
      }
    }
    if (const Json* v = cj.opt("semantics")) {
      const auto s = as_string(*v, cj.at("semantics"));
      if (s != "auto") p.composition.semantics = located(cj.at("semantics"), [&] { return parse_semantics(s); });
    }
    cj.done();
  }
  if (const Json* b = o.opt("bound")) {
    Obj bj(*b, o.at("bound"));
    if (const Json* v = bj.opt("horizon")) p.horizon = static_cast<long>(as_int(*v, bj.at("horizon")));
    if (p.horizon < 0) fail(bj.at("horizon"), "horizon must be non-negative");
    bj.done();
  }
  if (const Json* g = o.opt("grid")) p.grid = grid_from_json(*g, o.at("grid"));
  if (const Json* s = o.opt("synthesis")) {
    Obj sj(*s, o.at("synthesis"));
    auto& S = p.synthesis;
    if (const Json* v = sj.opt("subsystem")) S.subsystem = as_string(*v, sj.at("subsystem"));
    if (const Json* v = sj.opt("mode")) S.mode = static_cast<int>(as_int(*v, sj.at("mode")));
    if (const Json* v = sj.opt("degree")) S.degree = static_cast<unsigned>(as_count(*v, sj.at("degree")));
    if (const Json* v = sj.opt("budget")) S.budget = as_count(*v, sj.at("budget"));
    if (const Json* v = sj.opt("seed")) S.seed = as_count(*v, sj.at("seed"));
    if (const Json* v = sj.opt("kappa_grid")) S.kappa_grid = doubles(*v, sj.at("kappa_grid"));
    if (const Json* v = sj.opt("lambda_grid")) S.lambda_grid = doubles(*v, sj.at("lambda_grid"));
    if (!S.subsystem.empty() && !p.net.find(S.subsystem)) fail(sj.at("subsystem"), "unknown subsystem");
    sj.done();
  }
  if (const Json* s = o.opt("simulation")) {
    Obj sj(*s, o.at("simulation"));
    auto& C = p.simulation;
    if (const Json* v = sj.opt("trajectories")) C.trajectories = as_count(*v, sj.at("trajectories"));
    if (const Json* v = sj.opt("seed")) C.seed = as_count(*v, sj.at("seed"));
    if (const Json* v = sj.opt("retain")) C.retain = as_count(*v, sj.at("retain"));
    if (const Json* v = sj.opt("allow_unverified")) C.allow_unverified = as_bool(*v, sj.at("allow_unverified"));
    if (const Json* v = sj.opt("controller"))
      C.controller = located(sj.at("controller"), [&] { return parse_controller(as_string(*v, sj.at("controller"))); });
    if (const Json* v = sj.opt("initial_modes")) {
      for (std::size_t i = 0; i < as_array(*v, sj.at("initial_modes")).size(); ++i)
        C.initial_modes.push_back(static_cast<int>(as_int((*v)[i], idx_path(sj.at("initial_modes"), i))));
    }
    sj.done();
  }
  p.simulation.horizon = p.horizon;
  o.done();
  return p;
}

Project load_project(const std::filesystem::path& path) { return parse_project(read_text(path)); }

Json project_to_json(const Project& p) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  if (p.fixture) {
    j["fixture"] = {{"name", *p.fixture}, {"n", p.fixture_n}};
  } else {
    j["network"] = network_to_json(p.net);
  }
  Json certs = Json::object();
  for (const auto& [id, list] : p.certificates) {
    if (p.fixture && id == "*") continue;
    Json a = Json::array();
    for (const auto& c : list) {
      Json cj = cbc_to_json(c);
      cj.erase("barrier_text");
      a.push_back(cj);
    }
    certs[id] = a;
  }
  if (!certs.empty()) j["certificates"] = certs;
  if (p.dwell) {
    Json d{{"epsilon", p.dwell->epsilon}};
    if (p.dwell->mu > 0.0) d["mu"] = p.dwell->mu;
    if (p.dwell->k_d > 0) d["k_d"] = p.dwell->k_d;
    j["dwell"] = d;
  }
  Json comp{{"sigma", p.composition.sigma == SigmaMode::identity ? "identity" : "auto"}};
  comp["semantics"] = p.composition.semantics ? std::string(semantics_name(*p.composition.semantics)) : "auto";
  j["composition"] = comp;
  j["bound"] = {{"horizon", p.horizon}};
  j["grid"] = grid_to_json(p.grid);
  const auto& S = p.synthesis;
  j["synthesis"] = {{"subsystem", S.subsystem}, {"mode", S.mode},           {"degree", S.degree},
                    {"budget", S.budget},       {"seed", S.seed},           {"kappa_grid", S.kappa_grid},
                    {"lambda_grid", S.lambda_grid}};
  const auto& C = p.simulation;
  j["simulation"] = {{"trajectories", C.trajectories},
                     {"seed", C.seed},
                     {"retain", C.retain},
                     {"controller", controller_name(C.controller)},
                     {"allow_unverified", C.allow_unverified},
                     {"initial_modes", C.initial_modes}};
  return j;
}

void write_json(const std::filesystem::path& path, const Json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  Json out;
  out["schema_version"] = kSchemaVersion;
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "schema_version") out[it.key()] = *it;
  std::ofstream f(path);
  if (!f) throw InputError("cannot write '" + path.string() + "'");
  f << out.dump(2) << "\n";
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace bcert
