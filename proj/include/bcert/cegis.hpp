#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bcert/certificate.hpp"
#include "bcert/grid.hpp"
#include "bcert/model.hpp"

namespace bcert {

struct CegisConfig {
  unsigned degree = 2;       // all monomials up to this degree over the state variables
  std::size_t budget = 200;  // total falsification rounds over all candidates
  std::uint64_t seed = 1;
  std::vector<double> kappa_grid{0.3, 0.5, 0.7, 0.9, 0.99};
  std::vector<double> lambda_grid;       // empty: {1}
  std::vector<double> alpha_fractions{1e-4, 1e-2};  // alpha coef = f * lambda / max ||h||^alpha_exp
  double alpha_exp = 2.0;
  double rho_exp = 2.0;
  double psi_fraction = 0.1;  // psi <= psi_fraction * kappa * lambda
  std::size_t initial_pool = 64;
  std::size_t lp_iterations = 20000;
  std::size_t lp_restarts = 10;
  GridConfig grid;  // falsification grid
};

struct CegisLogEntry {
  std::size_t candidate;
  double kappa, lambda, alpha;
  std::size_t iteration;
  std::size_t pool;
  double lp_violation;  // max normalized row violation, <= 0 when the pool is satisfied
  double worst_margin;  // from the independent check
};

struct CegisResult {
  bool success = false;
  std::optional<CbcCertificate> certificate;  // verified, or best so far on failure
  std::vector<CheckReport> reports;           // of the returned certificate
  std::size_t iterations = 0;
  std::size_t pool_size = 0;
  double best_margin = -HUGE_VAL;
  std::vector<CegisLogEntry> log;
  std::string reason;
};

// Searches a CBC for sys in mode p. Every returned success has passed
// check_cbc on cfg.grid. Throws ConfigError for unusable candidate grids.
CegisResult synthesize_cbc(const SubsystemSpec& sys, int mode, const CegisConfig& cfg);

}  // namespace bcert
