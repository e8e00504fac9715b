#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bcert/augment.hpp"
#include "bcert/bound.hpp"
#include "bcert/certificate.hpp"
#include "bcert/model.hpp"

namespace bcert {

// Counter-based noise: every (seed, trajectory, subsystem, step, component)
// maps to its own draw, so results do not depend on the thread schedule.
double uniform_draw(std::uint64_t seed, std::uint64_t traj, std::uint64_t sub, std::uint64_t step, std::uint64_t slot);
double normal_draw(std::uint64_t seed, std::uint64_t traj, std::uint64_t sub, std::uint64_t step, std::uint64_t comp);
double noise_draw(const NoiseSpec& spec, std::uint64_t seed, std::uint64_t traj, std::uint64_t sub, std::uint64_t step,
                  std::uint64_t comp);

enum class ControllerKind {
  one_step,   // argmin_p' E[B(x', p', l')] with x' = f_p(x, w, noise)
  lookahead,  // argmin_p' E[B_p'(f_p'(x_bar, w, noise))] scaled, x_bar = E[f_p(x, w, noise)]
};
std::string_view controller_name(ControllerKind k);
ControllerKind parse_controller(std::string_view s);

struct SimConfig {
  std::size_t trajectories = 1000;
  long horizon = 10;
  std::uint64_t seed = 42;
  std::vector<int> initial_modes;  // per subsystem, default 1
  std::size_t retain = 0;          // trajectories kept for plotting
  ControllerKind controller = ControllerKind::lookahead;
  bool allow_unverified = false;
};

struct ProportionEstimate {
  std::size_t count = 0;
  std::optional<double> frequency;  // undefined when M = 0
  std::optional<double> lower95;    // Clopper-Pearson, one-sided 95%
  std::optional<double> upper95;
};

struct SimReport {
  std::size_t trajectories = 0;
  long horizon = 0;
  std::uint64_t seed = 0;
  ControllerKind controller = ControllerKind::lookahead;
  UnsafeSemantics semantics = UnsafeSemantics::union_;
  ProportionEstimate exceedance;  // sup_k B >= lambda
  ProportionEstimate entered_unsafe;
  SafetyBound bound{};
  std::size_t controller_checks = 0;
  std::size_t controller_violations = 0;  // chosen p' failed the expected-decrease inequality
  std::size_t dwell_violations = 0;
  double max_barrier = 0.0;
  std::vector<std::string> warnings;
  std::vector<std::string> subsystem_ids;
  // retained[j][k][i]: state of subsystem i at step k in trajectory j.
  std::vector<std::vector<std::vector<AugmentedState>>> retained;
};

double clopper_pearson_upper(std::size_t k, std::size_t n, double confidence = 0.95);
double clopper_pearson_lower(std::size_t k, std::size_t n, double confidence = 0.95);
ProportionEstimate estimate_proportion(std::size_t k, std::size_t n);

// Runs M trajectories of the interconnected augmented system under the
// barrier-induced switching controller. Refuses unverified certificates
// unless cfg.allow_unverified is set (then a warning is recorded).
SimReport run_monte_carlo(const NetworkSpec& net, const AbcCertificate& cert, const SimConfig& cfg);

// CSV with a column k and one column per retained realization and state
// component of the chosen subsystem.
void plot_data(std::ostream& os, const SimReport& report, const NetworkSpec& net, std::size_t subsystem = 0,
               std::size_t realizations = SIZE_MAX);

// All retained trajectories in the augment CSV format.
void write_retained_csv(std::ostream& os, const SimReport& report, const std::string& json_header);

}  // namespace bcert
