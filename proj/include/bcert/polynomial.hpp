#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bcert {

enum class Role { state, input, noise };

std::string_view role_name(Role r);
Role parse_role(std::string_view s);

struct Variable {
  std::string name;
  Role role = Role::state;
  std::size_t index = 0;  // position among variables of the same role

  bool operator==(const Variable&) const = default;
};

// Ordered, role-tagged variable list. Names are unique and the indices of
// each role run contiguously from 0.
class VariableSpace {
 public:
  VariableSpace() = default;
  explicit VariableSpace(std::vector<Variable> vars);

  static VariableSpace from_names(const std::vector<std::string>& state,
                                  const std::vector<std::string>& input = {},
                                  const std::vector<std::string>& noise = {});

  std::size_t size() const { return vars_.size(); }
  const Variable& operator[](std::size_t i) const { return vars_[i]; }
  std::span<const Variable> variables() const { return vars_; }

  std::optional<std::size_t> find(std::string_view name) const;
  std::size_t position(std::string_view name) const;  // throws InputError
  std::size_t count(Role r) const;
  std::vector<std::size_t> positions(Role r) const;

  VariableSpace without(Role r) const;

  bool operator==(const VariableSpace& o) const { return vars_ == o.vars_; }

 private:
  std::vector<Variable> vars_;
};

using SpacePtr = std::shared_ptr<const VariableSpace>;

inline SpacePtr make_space(VariableSpace s) { return std::make_shared<const VariableSpace>(std::move(s)); }

using Exponents = std::vector<std::uint16_t>;

// Sparse multivariate polynomial with binary64 coefficients. Terms whose
// magnitude falls below kZeroTolerance are dropped on every update.
class Polynomial {
 public:
  static constexpr double kZeroTolerance = 1e-12;
  using TermMap = std::map<Exponents, double>;

  Polynomial();
  explicit Polynomial(SpacePtr space);

  static Polynomial constant(SpacePtr space, double c);
  static Polynomial variable(SpacePtr space, std::string_view name);
  static Polynomial monomial(SpacePtr space, Exponents exps, double coef);

  const SpacePtr& space() const { return space_; }
  const TermMap& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  // Accumulates into an existing term; normalizes the result.
  void add_term(const Exponents& exps, double coef);

  unsigned degree() const;
  unsigned degree_in(Role r) const;
  bool depends_on(Role r) const { return degree_in(r) > 0; }
  double constant_term() const;

  double eval(std::span<const double> point) const;

  Polynomial operator-() const;
  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(double s);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

  Polynomial pow(unsigned k) const;

  // Substitutes variables by polynomials sharing one target space. Variables
  // without a substitution are carried over by name and must exist there.
  Polynomial compose(const std::map<std::string, Polynomial>& substitution) const;

  // Re-expresses the polynomial over another space, matching variables by name.
  Polynomial rebase(SpacePtr target) const;

  // Same terms and coefficients within tol (spaces compared by content).
  bool approx_equal(const Polynomial& o, double tol = 0.0) const;

  std::string to_string() const;

 private:
  void require_same_space(const Polynomial& o) const;

  SpacePtr space_;
  TermMap terms_;
};

}  // namespace bcert
