#include "bcert/augment.hpp"

#include <iomanip>
#include <ostream>

#include "bcert/errors.hpp"

namespace bcert {

void validate_augmented(const AugmentedState& s, const SubsystemSpec& sys, int k_d) {
  if (k_d < 1) throw InputError("dwell time k_d must be >= 1");
  if (s.x.size() != sys.state_dim()) throw InputError("augmented state has wrong dimension");
  if (s.p < 1 || s.p > sys.mode_count()) throw InputError("mode " + std::to_string(s.p) + " out of range");
  if (s.l < 0 || s.l > k_d - 1) throw InputError("dwell counter " + std::to_string(s.l) + " outside [0, k_d-1]");
}

AugmentedState augmented_step(const AugmentedState& s, int requested, std::span<const double> w,
                              std::span<const double> noise_draw, const SubsystemSpec& sys, int k_d) {
  validate_augmented(s, sys, k_d);
  if (requested < 1 || requested > sys.mode_count())
    throw InputError("requested mode " + std::to_string(requested) + " out of range");
  AugmentedState next;
  if (s.l < k_d - 1) {
    if (requested != s.p)
      throw DwellViolation("switch from mode " + std::to_string(s.p) + " to " + std::to_string(requested) +
                           " requested with dwell counter " + std::to_string(s.l) + " < " + std::to_string(k_d - 1));
    next.l = s.l + 1;
  } else {
    next.l = requested == s.p ? k_d - 1 : 0;
  }
  next.p = requested;
  next.x = sys.step(s.p, s.x, w, noise_draw);
  return next;
}

bool check_dwell_time(std::span<const int> signal, int k_d) {
  long last = 0;  // the first instant is measured from time 0
  for (std::size_t k = 1; k < signal.size(); ++k) {
    if (signal[k] == signal[k - 1]) continue;
    if (static_cast<long>(k) - last < k_d) return false;
    last = static_cast<long>(k);
  }
  return true;
}

bool equivalence_check(const SubsystemSpec& sys, int k_d, std::span<const int> signal,
                       std::span<const std::vector<double>> w_seq, std::span<const std::vector<double>> noise_seq,
                       std::size_t T) {
  if (signal.size() < T + 1 || w_seq.size() < T || noise_seq.size() < T)
    throw InputError("equivalence_check: sequences shorter than the horizon");
  if (!check_dwell_time(signal.first(T + 1), k_d)) throw InputError("switching signal violates the dwell time");

  std::vector<double> x(sys.state_dim(), 0.0);
  for (const auto& box : sys.X0.boxes()) {
    x = box.center();
    break;
  }
  AugmentedState a{x, signal[0], 0};
  auto outputs_equal = [&](std::span<const double> u, std::span<const double> v) {
    for (const auto& h : sys.external_output)
      if (h.eval(u) != h.eval(v)) return false;
    return true;
  };
  for (std::size_t k = 0; k < T; ++k) {
    x = sys.step(signal[k], x, w_seq[k], noise_seq[k]);
    a = augmented_step(a, signal[k + 1], w_seq[k], noise_seq[k], sys, k_d);
    if (a.p != signal[k + 1] || !outputs_equal(x, a.x)) return false;
  }
  return true;
}

std::vector<AugmentedState> network_step(const NetworkSpec& net, const Wiring& wiring,
                                         std::span<const AugmentedState> states, std::span<const int> requested,
                                         std::span<const std::vector<double>> noise_draws, std::span<const int> k_d) {
  const auto n = net.size();
  if (states.size() != n || requested.size() != n || noise_draws.size() != n || k_d.size() != n)
    throw InputError("network_step: per-subsystem arguments must have one entry per subsystem");
  std::vector<std::vector<double>> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = states[i].x;
  std::vector<AugmentedState> next(n);
  for (std::size_t i = 0; i < n; ++i)
    next[i] = augmented_step(states[i], requested[i], wiring.inputs(i, xs), noise_draws[i], net.subsystems[i], k_d[i]);
  return next;
}

void write_trajectory_csv(std::ostream& os, const std::string& json_header, std::span<const TrajectoryRow> rows) {
  os << "# " << json_header << "\n";
  std::size_t width = 0;
  for (const auto& r : rows) width = std::max(width, r.x.size());
  os << "k,subsystem";
  for (std::size_t c = 0; c < width; ++c) os << ",x" << c;
  os << ",p,l\n";
  os << std::setprecision(17);
  for (const auto& r : rows) {
    os << r.k << "," << r.subsystem;
    for (std::size_t c = 0; c < width; ++c) {
      os << ",";
      if (c < r.x.size()) os << r.x[c];
    }
    os << "," << r.p << "," << r.l << "\n";
  }
}

}  // namespace bcert
