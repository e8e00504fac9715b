#pragma once

#include <string_view>

namespace bcert {

enum class BoundBranch { supermartingale, contraction };  // lambda >= psi/kappa, lambda < psi/kappa
std::string_view branch_name(BoundBranch b);

struct SafetyBound {
  double gamma, lambda, kappa, psi;
  long horizon;
  double delta;
  BoundBranch branch;
  bool vacuous = false;  // the formula exceeded 1 and was capped
};

// Upper bound on the probability of reaching B >= lambda within T steps:
//   1 - (1 - gamma/lambda)(1 - psi/lambda)^T                if lambda >= psi/kappa
//   (gamma/lambda)(1 - kappa)^T + psi/(kappa lambda)(1 - (1 - kappa)^T)  otherwise
SafetyBound safety_bound(double gamma, double lambda, double kappa, double psi, long horizon);

}  // namespace bcert
