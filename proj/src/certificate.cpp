#include "bcert/certificate.hpp"

#include <algorithm>
#include <cmath>

#include "bcert/errors.hpp"

namespace bcert {

double PowerLawFn::operator()(double s) const {
  if (coef == 0.0) return 0.0;
  return coef * std::pow(s, exp);
}

double PowerLawFn::inverse(double s) const {
  if (coef == 0.0) throw InputError("the zero function has no inverse");
  return std::pow(s / coef, 1.0 / exp);
}

void CertConstants::validate(bool require_gap) const {
  if (!(kappa > 0.0 && kappa < 1.0)) throw InputError("kappa must lie in (0, 1), got " + std::to_string(kappa));
  if (!(lambda > 0.0)) throw InputError("lambda must be positive");
  if (!(gamma >= 0.0)) throw InputError("gamma must be non-negative");
  if (!(psi >= 0.0)) throw InputError("psi must be non-negative");
  if (!(alpha.coef > 0.0 && alpha.exp > 0.0)) throw InputError("alpha must be a class-K-infinity power law");
  if (!(rho.coef >= 0.0 && rho.exp > 0.0)) throw InputError("rho must be a power law or zero");
  if (require_gap && !(gamma < lambda))
    throw InputError("gamma (" + std::to_string(gamma) + ") must be below lambda (" + std::to_string(lambda) + ")");
}

std::string_view status_name(CertStatus s) {
  switch (s) {
    case CertStatus::unchecked: return "unchecked";
    case CertStatus::verified: return "verified";
    case CertStatus::refuted: return "refuted";
  }
  return "unchecked";
}

double ApbcCertificate::factor(int p, int l) const {
  return std::pow(mode_kappas.at(static_cast<std::size_t>(p - 1)), -static_cast<double>(l) / epsilon);
}

double ApbcCertificate::eval(std::span<const double> x, int p, int l) const {
  if (p < 1 || p > mode_count()) throw InputError("mode out of range");
  return factor(p, l) * barriers[static_cast<std::size_t>(p - 1)].eval(x);
}

void ApbcCertificate::validate() const {
  if (barriers.empty()) throw InputError("APBC needs at least one mode");
  if (mode_kappas.size() != barriers.size()) throw InputError("APBC needs one kappa per mode");
  for (double k : mode_kappas)
    if (!(k > 0.0 && k < 1.0)) throw InputError("per-mode kappa must lie in (0, 1)");
  if (!(epsilon > 1.0)) throw InputError("epsilon must exceed 1");
  if (k_d < 1) throw InputError("k_d must be >= 1");
  constants.validate();
}

std::string_view semantics_name(UnsafeSemantics s) { return s == UnsafeSemantics::product ? "product" : "union"; }

UnsafeSemantics parse_semantics(std::string_view s) {
  if (s == "product") return UnsafeSemantics::product;
  if (s == "union") return UnsafeSemantics::union_;
  throw InputError("unknown unsafe-set semantics '" + std::string(s) + "' (expected product or union)");
}

double AbcCertificate::eval(std::span<const std::vector<double>> xs, std::span<const int> ps,
                            std::span<const int> ls) const {
  double m = -HUGE_VAL;
  for (std::size_t i = 0; i < parts.size(); ++i) m = std::max(m, parts[i].eval(xs[i], ps[i], ls[i]) / scalings[i]);
  return m;
}

bool all_verified(std::span<const CheckReport> reports) {
  return std::all_of(reports.begin(), reports.end(), [](const CheckReport& r) { return r.status == CertStatus::verified; });
}

void record(Verification& v, std::span<const CheckReport> reports) {
  v.status = all_verified(reports) ? CertStatus::verified : CertStatus::refuted;
  v.resolution = 0.0;
  v.counterexample.clear();
  for (const auto& r : reports) {
    v.resolution = std::max(v.resolution, r.resolution);
    if (r.status == CertStatus::refuted && v.counterexample.empty()) v.counterexample = r.counterexample;
  }
}

}  // namespace bcert
