#include "bcert/bound.hpp"

#include <cmath>
#include <string>

#include "bcert/errors.hpp"

namespace bcert {

std::string_view branch_name(BoundBranch b) {
  return b == BoundBranch::supermartingale ? "lambda >= psi/kappa" : "lambda < psi/kappa";
}

SafetyBound safety_bound(double gamma, double lambda, double kappa, double psi, long horizon) {
  if (!(kappa > 0.0 && kappa < 1.0)) throw InputError("kappa must lie in (0, 1)");
  if (!(lambda > 0.0)) throw InputError("lambda must be positive");
  if (!(gamma >= 0.0) || !(psi >= 0.0)) throw InputError("gamma and psi must be non-negative");
  if (!(gamma < lambda)) throw InputError("gamma must be below lambda");
  if (horizon < 0) throw InputError("horizon must be non-negative");

  SafetyBound r{gamma, lambda, kappa, psi, horizon, 0.0, BoundBranch::supermartingale};
  const double T = static_cast<double>(horizon);
  if (lambda >= psi / kappa) {
    // (1 - psi/lambda)^T via log1p keeps precision for tiny psi.
    const double stay = std::exp(T * std::log1p(-psi / lambda));
    r.delta = 1.0 - (1.0 - gamma / lambda) * stay;
  } else {
    r.branch = BoundBranch::contraction;
    const double decay = std::exp(T * std::log1p(-kappa));
    r.delta = gamma / lambda * decay + psi / (kappa * lambda) * (1.0 - decay);
  }
  if (r.delta < 0.0) {
    if (r.delta <= -1e-12) throw InputError("bound evaluates below 0: " + std::to_string(r.delta));
    r.delta = 0.0;
  }
  if (r.delta > 1.0) {
    // The second branch tends to psi/(kappa lambda) > 1; such a bound is
    // true but says nothing.
    r.vacuous = r.delta - 1.0 >= 1e-12;
    r.delta = 1.0;
  }
  return r;
}

}  // namespace bcert
