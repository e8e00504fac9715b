#pragma once

#include <span>
#include <vector>

#include "bcert/certificate.hpp"
#include "bcert/grid.hpp"
#include "bcert/model.hpp"

namespace bcert {

// E[B(f_p(x, w, noise))] as a polynomial over the non-noise variables of sys.
// B is over the state variables of sys.
Polynomial expected_barrier(const SubsystemSpec& sys, int dyn_mode, const Polynomial& barrier);

// Conditions C1..C4 of a per-mode control barrier certificate. C4 is checked
// on a joint grid over X x W.
std::vector<CheckReport> check_cbc(const SubsystemSpec& sys, const CbcCertificate& cert, const GridConfig& grid);

// APBC conditions over X x P x {0..k_d-1}. C4 resolves the existential over
// admissible successor modes (only p itself while l < k_d - 1) against a
// sampled W grid; counterexamples list, for each admissible p', a witness w.
std::vector<CheckReport> check_apbc(const SubsystemSpec& sys, const ApbcCertificate& cert, const GridConfig& grid);

// ABC conditions on a joint grid over prod X_i (capped, then Latin-hypercube
// sampled). Worst cases over joint (p, l) are resolved exactly per point
// because every term of the max-composed barrier depends on its own
// subsystem only. C1 is non-negativity. C4 uses max_i E[B_i]/s_i, a lower
// bound on E[max_i B_i/s_i], so refutations are sound.
std::vector<CheckReport> check_abc(const NetworkSpec& net, const AbcCertificate& cert, const GridConfig& grid);

// Column pointers for a space of state/input(/noise) variables.
std::vector<const double*> map_columns(const VariableSpace& space, std::span<const double* const> x,
                                       std::span<const double* const> w, std::span<const double* const> noise = {});

}  // namespace bcert
