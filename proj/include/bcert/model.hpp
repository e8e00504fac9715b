#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bcert/boxes.hpp"
#include "bcert/noise.hpp"
#include "bcert/polynomial.hpp"

namespace bcert {

// One switched subsystem. Modes are numbered 1..mode_count(); dynamics for
// mode p live at modes[p - 1] and are polynomials over `space` (state,
// internal-input and noise variables). Output maps are polynomials over
// `state_space`.
struct SubsystemSpec {
  std::string id;
  SpacePtr space;
  SpacePtr state_space;
  std::vector<std::vector<Polynomial>> modes;
  std::vector<NoiseSpec> noise;
  std::vector<Polynomial> external_output;
  std::map<std::string, std::vector<Polynomial>> internal_outputs;  // h_ij keyed by target id
  BoxSet X, X0, X1, W;

  std::size_t state_dim() const { return space->count(Role::state); }
  std::size_t input_dim() const { return space->count(Role::input); }
  std::size_t noise_dim() const { return space->count(Role::noise); }
  int mode_count() const { return static_cast<int>(modes.size()); }

  const std::vector<Polynomial>& dynamics(int mode) const;

  // x' = f_p(x, w, noise).
  std::vector<double> step(int mode, std::span<const double> x, std::span<const double> w,
                           std::span<const double> noise) const;

  // Infinity norm of the full output [h_ii; h_ij...] at x.
  double output_norm(std::span<const double> x) const;
  std::vector<Polynomial> all_outputs() const;

  // Builds the evaluation point [x; w; noise] in `space` order.
  std::vector<double> point(std::span<const double> x, std::span<const double> w,
                            std::span<const double> noise) const;
};

// Identity outputs y = x over the state space of a subsystem.
std::vector<Polynomial> identity_outputs(const SpacePtr& state_space);

// Builds a subsystem from variable names and dynamics strings; outputs
// default to the identity map. Intended for fixtures and tests.
struct SubsystemBuilder {
  std::string id;
  std::vector<std::string> state, input, noise;
  std::vector<std::vector<std::string>> modes;
  std::vector<NoiseSpec> noise_specs;  // empty = standard gaussian
  BoxSet X, X0, X1, W;
  std::map<std::string, std::vector<std::string>> internal_outputs;  // empty target list = identity
  std::vector<std::string> external_output;                          // empty = identity

  SubsystemSpec build() const;
};

// w_to[offset .. offset + dim(h_from,to)) takes the value y_{from,to}.
struct Edge {
  std::string from;
  std::string to;
  std::size_t offset = 0;
  bool operator==(const Edge&) const = default;
};

struct NetworkSpec {
  std::vector<SubsystemSpec> subsystems;
  std::vector<Edge> edges;

  std::size_t size() const { return subsystems.size(); }
  std::optional<std::size_t> find(const std::string& id) const;
  std::size_t index_of(const std::string& id) const;  // throws InputError
};

struct Violation {
  enum class Severity { error, warning };
  Severity severity = Severity::error;
  std::string subsystem;
  std::optional<std::size_t> edge;
  std::string condition;
  std::string message;
};

std::vector<Violation> validate_network(const NetworkSpec& net);
bool has_errors(const std::vector<Violation>& v);

// Precomputed routing of neighbor outputs into internal-input vectors.
class Wiring {
 public:
  explicit Wiring(const NetworkSpec& net);

  // Internal input of subsystem i from the pre-step states of all subsystems.
  std::vector<double> inputs(std::size_t i, std::span<const std::vector<double>> states) const;

  struct Source {
    std::size_t from;
    std::size_t offset;
    const std::vector<Polynomial>* map;
  };
  std::span<const Source> sources(std::size_t i) const { return sources_[i]; }

 private:
  const NetworkSpec* net_;
  std::vector<std::vector<Source>> sources_;
};

// Monolithic form of a network: no internal inputs, joint mode tuples.
// Per-subsystem dynamics are stored with inputs already substituted; joint
// modes are assembled on demand since their count grows as prod m_i.
class FlatSystem {
 public:
  SpacePtr space;  // flat state variables then flat noise variables ("<id>.<name>")
  std::vector<std::size_t> state_offset;
  std::vector<std::size_t> noise_offset;
  std::vector<int> mode_radices;
  std::vector<std::vector<std::vector<Polynomial>>> dynamics;  // [i][p-1][k]
  std::vector<NoiseSpec> noise;

  std::size_t state_dim() const;
  std::size_t noise_dim() const { return noise.size(); }
  std::optional<std::uint64_t> mode_count() const;  // nullopt on overflow

  std::vector<Polynomial> dynamics_for(std::span<const int> modes) const;
  std::vector<double> step(std::span<const double> x, std::span<const int> modes,
                           std::span<const double> noise_draw) const;

  // Materializes every joint mode (mixed radix, first subsystem fastest).
  SubsystemSpec to_subsystem(const std::string& id, std::uint64_t max_modes = 100000) const;
};

FlatSystem flatten(const NetworkSpec& net);

}  // namespace bcert
