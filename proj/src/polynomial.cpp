#include "bcert/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>

#include "bcert/errors.hpp"

namespace bcert {

std::string_view role_name(Role r) {
  switch (r) {
    case Role::state: return "state";
    case Role::input: return "input";
    case Role::noise: return "noise";
  }
  return "state";
}

Role parse_role(std::string_view s) {
  if (s == "state") return Role::state;
  if (s == "input" || s == "internal-input") return Role::input;
  if (s == "noise") return Role::noise;
  throw InputError("unknown variable role '" + std::string(s) + "'");
}

VariableSpace::VariableSpace(std::vector<Variable> vars) : vars_(std::move(vars)) {
  std::set<std::string> names;
  std::size_t next[3] = {0, 0, 0};
  for (const auto& v : vars_) {
    if (v.name.empty()) throw InputError("variable with empty name");
    if (!names.insert(v.name).second) throw InputError("duplicate variable name '" + v.name + "'");
    auto& n = next[static_cast<int>(v.role)];
    if (v.index != n)
      throw InputError("variable '" + v.name + "' has non-contiguous " + std::string(role_name(v.role)) +
                       " index " + std::to_string(v.index));
    ++n;
  }
}

VariableSpace VariableSpace::from_names(const std::vector<std::string>& state, const std::vector<std::string>& input,
                                        const std::vector<std::string>& noise) {
  std::vector<Variable> vars;
  for (std::size_t i = 0; i < state.size(); ++i) vars.push_back({state[i], Role::state, i});
  for (std::size_t i = 0; i < input.size(); ++i) vars.push_back({input[i], Role::input, i});
  for (std::size_t i = 0; i < noise.size(); ++i) vars.push_back({noise[i], Role::noise, i});
  return VariableSpace(std::move(vars));
}

std::optional<std::size_t> VariableSpace::find(std::string_view name) const {
  for (std::size_t i = 0; i < vars_.size(); ++i)
    if (vars_[i].name == name) return i;
  return std::nullopt;
}

std::size_t VariableSpace::position(std::string_view name) const {
  if (auto p = find(name)) return *p;
  throw InputError("unknown variable '" + std::string(name) + "'");
}

std::size_t VariableSpace::count(Role r) const {
  return static_cast<std::size_t>(std::count_if(vars_.begin(), vars_.end(), [r](const Variable& v) { return v.role == r; }));
}

std::vector<std::size_t> VariableSpace::positions(Role r) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < vars_.size(); ++i)
    if (vars_[i].role == r) out.push_back(i);
  return out;
}

VariableSpace VariableSpace::without(Role r) const {
  std::vector<Variable> kept;
  for (const auto& v : vars_)
    if (v.role != r) kept.push_back(v);
  return VariableSpace(std::move(kept));
}

// ---------------------------------------------------------------------------

Polynomial::Polynomial() : space_(make_space(VariableSpace{})) {}

Polynomial::Polynomial(SpacePtr space) : space_(std::move(space)) {
  if (!space_) throw InputError("polynomial requires a variable space");
}

Polynomial Polynomial::constant(SpacePtr space, double c) {
  Polynomial p(std::move(space));
  p.add_term(Exponents(p.space_->size(), 0), c);
  return p;
}

Polynomial Polynomial::variable(SpacePtr space, std::string_view name) {
  Polynomial p(std::move(space));
  Exponents e(p.space_->size(), 0);
  e[p.space_->position(name)] = 1;
  p.add_term(e, 1.0);
  return p;
}

Polynomial Polynomial::monomial(SpacePtr space, Exponents exps, double coef) {
  Polynomial p(std::move(space));
  p.add_term(exps, coef);
  return p;
}

void Polynomial::add_term(const Exponents& exps, double coef) {
  if (exps.size() != space_->size())
    throw InputError("exponent vector length " + std::to_string(exps.size()) + " does not match " +
                     std::to_string(space_->size()) + " variables");
  auto it = terms_.find(exps);
  if (it == terms_.end()) {
    if (std::abs(coef) >= kZeroTolerance) terms_.emplace(exps, coef);
    return;
  }
  it->second += coef;
  if (std::abs(it->second) < kZeroTolerance) terms_.erase(it);
}

unsigned Polynomial::degree() const {
  unsigned d = 0;
  for (const auto& [e, c] : terms_) d = std::max<unsigned>(d, std::accumulate(e.begin(), e.end(), 0u));
  return d;
}

unsigned Polynomial::degree_in(Role r) const {
  const auto pos = space_->positions(r);
  unsigned d = 0;
  for (const auto& [e, c] : terms_) {
    unsigned s = 0;
    for (auto i : pos) s += e[i];
    d = std::max(d, s);
  }
  return d;
}

double Polynomial::constant_term() const {
  auto it = terms_.find(Exponents(space_->size(), 0));
  return it == terms_.end() ? 0.0 : it->second;
}

double Polynomial::eval(std::span<const double> point) const {
  if (point.size() != space_->size())
    throw InputError("evaluation point has " + std::to_string(point.size()) + " coordinates, expected " +
                     std::to_string(space_->size()));
  // Same multiplication order as kernels::eval_batch so that single-point and
  // batched evaluation agree bit-for-bit.
  double sum = 0.0;
  for (const auto& [e, c] : terms_) {
    double acc = c;
    for (std::size_t v = 0; v < e.size(); ++v)
      for (unsigned t = 0; t < e[v]; ++t) acc *= point[v];
    sum += acc;
  }
  return sum;
}

void Polynomial::require_same_space(const Polynomial& o) const {
  if (space_ != o.space_ && !(*space_ == *o.space_))
    throw InputError("polynomial arithmetic across different variable spaces");
}

Polynomial Polynomial::operator-() const {
  Polynomial r(*this);
  for (auto& [e, c] : r.terms_) c = -c;
  return r;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  require_same_space(o);
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  require_same_space(o);
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  TermMap out;
  for (const auto& [e, c] : terms_) {
    const double v = c * s;
    if (std::abs(v) >= kZeroTolerance) out.emplace(e, v);
  }
  terms_ = std::move(out);
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  a.require_same_space(b);
  Polynomial r(a.space_);
  Exponents e(a.space_->size());
  for (const auto& [ea, ca] : a.terms_)
    for (const auto& [eb, cb] : b.terms_) {
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = static_cast<std::uint16_t>(ea[i] + eb[i]);
      auto [it, inserted] = r.terms_.try_emplace(e, ca * cb);
      if (!inserted) it->second += ca * cb;
    }
  std::erase_if(r.terms_, [](const auto& kv) { return std::abs(kv.second) < Polynomial::kZeroTolerance; });
  return r;
}

Polynomial Polynomial::pow(unsigned k) const {
  Polynomial result = constant(space_, 1.0);
  Polynomial base = *this;
  while (k > 0) {
    if (k & 1u) result = result * base;
    k >>= 1u;
    if (k > 0) base = base * base;
  }
  return result;
}

Polynomial Polynomial::compose(const std::map<std::string, Polynomial>& substitution) const {
  SpacePtr target;
  for (const auto& [name, q] : substitution) {
    if (!space_->find(name)) throw InputError("substitution names unknown variable '" + name + "'");
    if (!target) {
      target = q.space();
    } else if (!(*target == *q.space())) {
      throw InputError("substituted polynomials must share one variable space");
    }
  }
  if (!target) target = space_;

  // Image of every source variable in the target space.
  std::vector<Polynomial> image;
  image.reserve(space_->size());
  for (const auto& v : space_->variables()) {
    if (auto it = substitution.find(v.name); it != substitution.end()) {
      image.push_back(it->second);
    } else if (target->find(v.name)) {
      image.push_back(variable(target, v.name));
    } else {
      image.push_back(Polynomial(target));  // placeholder; only an error if used
    }
  }

  // Cache powers per variable; exponents are small.
  std::vector<std::vector<Polynomial>> powers(space_->size());
  auto power_of = [&](std::size_t v, unsigned k) -> const Polynomial& {
    auto& cache = powers[v];
    if (cache.empty()) cache.push_back(constant(target, 1.0));
    while (cache.size() <= k) cache.push_back(cache.back() * image[v]);
    return cache[k];
  };

  Polynomial result(target);
  for (const auto& [e, c] : terms_) {
    Polynomial term = constant(target, c);
    for (std::size_t v = 0; v < e.size(); ++v) {
      if (e[v] == 0) continue;
      const auto& var = (*space_)[v];
      if (!substitution.count(var.name) && !target->find(var.name))
        throw InputError("variable '" + var.name + "' has no image in the target space");
      term = term * power_of(v, e[v]);
    }
    result += term;
  }
  return result;
}

Polynomial Polynomial::rebase(SpacePtr target) const {
  Polynomial r(target);
  std::vector<std::optional<std::size_t>> map(space_->size());
  for (std::size_t v = 0; v < space_->size(); ++v) map[v] = target->find((*space_)[v].name);
  for (const auto& [e, c] : terms_) {
    Exponents out(target->size(), 0);
    for (std::size_t v = 0; v < e.size(); ++v) {
      if (e[v] == 0) continue;
      if (!map[v]) throw InputError("variable '" + (*space_)[v].name + "' does not exist in the target space");
      out[*map[v]] = e[v];
    }
    r.add_term(out, c);
  }
  return r;
}

bool Polynomial::approx_equal(const Polynomial& o, double tol) const {
  if (!(*space_ == *o.space_)) return false;
  auto it = terms_.begin();
  auto jt = o.terms_.begin();
  while (it != terms_.end() || jt != o.terms_.end()) {
    if (jt == o.terms_.end() || (it != terms_.end() && it->first < jt->first)) {
      if (std::abs(it->second) > tol) return false;
      ++it;
    } else if (it == terms_.end() || jt->first < it->first) {
      if (std::abs(jt->second) > tol) return false;
      ++jt;
    } else {
      if (std::abs(it->second - jt->second) > tol) return false;
      ++it;
      ++jt;
    }
  }
  return true;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os << std::setprecision(17);
  bool first = true;
  // Highest total degree first reads more naturally.
  std::vector<const TermMap::value_type*> order;
  for (const auto& kv : terms_) order.push_back(&kv);
  std::stable_sort(order.begin(), order.end(), [](auto* a, auto* b) {
    auto da = std::accumulate(a->first.begin(), a->first.end(), 0u);
    auto db = std::accumulate(b->first.begin(), b->first.end(), 0u);
    return da > db;
  });
  for (const auto* kv : order) {
    const auto& [e, c] = *kv;
    double mag = c;
    if (first) {
      if (c < 0) {
        os << "-";
        mag = -c;
      }
    } else {
      os << (c < 0 ? " - " : " + ");
      mag = std::abs(c);
    }
    first = false;
    bool has_var = std::any_of(e.begin(), e.end(), [](auto x) { return x > 0; });
    bool wrote = false;
    if (!has_var || mag != 1.0) {
      os << mag;
      wrote = true;
    }
    for (std::size_t v = 0; v < e.size(); ++v) {
      if (e[v] == 0) continue;
      if (wrote) os << "*";
      os << (*space_)[v].name;
      if (e[v] > 1) os << "^" << e[v];
      wrote = true;
    }
  }
  return os.str();
}

}  // namespace bcert
