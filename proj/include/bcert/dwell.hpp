#pragma once

#include <span>
#include <string>
#include <vector>

#include "bcert/certificate.hpp"
#include "bcert/grid.hpp"

namespace bcert {

struct DwellParams {
  double epsilon = 2.0;
  double mu = 1.0;
  int k_d = 1;
};

struct MuEstimate {
  double mu = 1.0;        // max ratio over pairs and points, floored at 1
  double inflated = 1.0;  // mu * (1 + inflation), reported separately
  double grid_max = 1.0;  // before refinement
  int p = 0, q = 0;       // argmax pair B_p / B_q (0 when mu == 1 from the floor)
  std::vector<double> argmax;
  std::size_t points = 0;
  std::size_t skipped = 0;  // grid points where both barriers vanish
  std::vector<std::vector<double>> skip_list;  // first few skipped points
  bool sampled = false;
  double resolution = 0.0;
};

// max over ordered mode pairs and grid x of B_p(x) / B_q(x), refined by
// coordinate ascent from the worst grid points. Throws InputError when a
// barrier is negative at a grid point.
MuEstimate estimate_mu(std::span<const Polynomial> barriers, const BoxSet& X, const GridConfig& grid,
                       double inflation = 0.05);

// max_p (eps ln mu / ln(1/kappa_p) + 1), before rounding.
double dwell_time_bound(double epsilon, double mu, std::span<const double> kappas);
// Smallest integer k_d meeting the bound (1e-9 slack on the ceiling).
int min_dwell_time(double epsilon, double mu, std::span<const double> kappas);

// k_d as a function of eps over a small eps grid.
std::vector<std::pair<double, int>> dwell_tradeoff(double mu, std::span<const double> kappas,
                                                   std::span<const double> epsilons);

struct DerivationRow {
  std::string constant;
  std::string formula;
  double value;
};

struct LiftResult {
  ApbcCertificate apbc;
  std::vector<DerivationRow> derivation;
};

// Per-mode CBCs (one per mode, any order) to the APBC
// B(x, p, l) = kappa_p^(-l/eps) B_p(x) with the derived constants.
LiftResult lift_to_apbc(std::span<const CbcCertificate> certs, const DwellParams& params);

// A common barrier valid for every mode (mu = 1): B(x, p, l) = B(x) with
// k_d = 1 and the CBC constants unchanged.
ApbcCertificate apbc_from_common_barrier(const CbcCertificate& cert, int modes);

}  // namespace bcert
