#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "bcert/model.hpp"

namespace bcert {

// (x, p, l): continuous state, active mode (1-based) and dwell counter.
struct AugmentedState {
  std::vector<double> x;
  int p = 1;
  int l = 0;
  bool operator==(const AugmentedState&) const = default;
};

void validate_augmented(const AugmentedState& s, const SubsystemSpec& sys, int k_d);

// One transition of the augmented system. The dynamics use the current mode
// p; the requested mode takes effect at the next step. Throws DwellViolation
// when a switch is requested while l < k_d - 1.
AugmentedState augmented_step(const AugmentedState& s, int requested, std::span<const double> w,
                              std::span<const double> noise_draw, const SubsystemSpec& sys, int k_d);

// Switch instants are the k with signal[k] != signal[k-1]. Valid iff the
// first instant is >= k_d and consecutive instants are >= k_d apart.
bool check_dwell_time(std::span<const int> signal, int k_d);

// Runs the plain switched system driven by `signal` and the augmented system
// driven by the corresponding requested-mode sequence, with identical inputs
// and noise, and compares external outputs bit-for-bit over T steps.
// w_seq[k] and noise_seq[k] are the draws used at step k.
bool equivalence_check(const SubsystemSpec& sys, int k_d, std::span<const int> signal,
                       std::span<const std::vector<double>> w_seq, std::span<const std::vector<double>> noise_seq,
                       std::size_t T);

// Interconnected augmented step: inputs are wired from pre-step states.
std::vector<AugmentedState> network_step(const NetworkSpec& net, const Wiring& wiring,
                                         std::span<const AugmentedState> states, std::span<const int> requested,
                                         std::span<const std::vector<double>> noise_draws, std::span<const int> k_d);

// CSV trajectory dump. The first line is "# " followed by a JSON header.
struct TrajectoryRow {
  std::size_t k;
  std::string subsystem;
  std::vector<double> x;
  int p;
  int l;
};

void write_trajectory_csv(std::ostream& os, const std::string& json_header, std::span<const TrajectoryRow> rows);

}  // namespace bcert
