#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bcert/certificate.hpp"
#include "bcert/dwell.hpp"
#include "bcert/model.hpp"

namespace bcert {

// A case-study network together with its published per-mode certificates.
// Every subsystem is identical up to its id, so `cbcs` holds one certificate
// per mode and applies to each subsystem.
struct Fixture {
  std::string name;
  std::size_t n = 0;
  NetworkSpec net;
  std::vector<CbcCertificate> cbcs;
  bool common_barrier = false;  // one barrier shared by all modes
  std::optional<DwellParams> dwell;
  long horizon = 10;
  double claimed_probability = 0.0;  // as printed
};

// Ring of N rooms, w_i = [T_{i-1}; T_{i+1}], seven heater modes.
Fixture room_temp(std::size_t n);
// Ring of N two-dimensional subsystems, w_i = y_{i-1}, two modes.
Fixture two_mode(std::size_t n);
// "room-temp" or "two-mode".
Fixture make_fixture(std::string_view name, std::size_t n);
std::vector<std::string> fixture_names();

// Single-room subsystem and its published barrier.
SubsystemSpec room_subsystem(const std::string& id);
Polynomial room_barrier(const SpacePtr& state_space);
CertConstants room_constants();

SubsystemSpec two_mode_subsystem(const std::string& id);
std::vector<CbcCertificate> two_mode_cbcs(const SpacePtr& state_space);

// x+ = 0.5 x + 0.1 v on [-1, 1].
SubsystemSpec contraction_1d();

}  // namespace bcert
