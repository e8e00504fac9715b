#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bcert/polynomial.hpp"

namespace bcert {

inline constexpr double kMarginTolerance = 1e-9;

// s -> coef * s^exp, or the zero function when coef == 0.
struct PowerLawFn {
  double coef = 0.0;
  double exp = 1.0;

  static PowerLawFn zero() { return {0.0, 1.0}; }
  bool is_zero() const { return coef == 0.0; }
  double operator()(double s) const;
  double inverse(double s) const;  // (s / coef)^(1/exp); throws for the zero function
  bool operator==(const PowerLawFn&) const = default;
};

struct CertConstants {
  double kappa = 0.5;
  double gamma = 0.0;
  double lambda = 1.0;
  double psi = 0.0;
  PowerLawFn alpha{1.0, 1.0};
  PowerLawFn rho = PowerLawFn::zero();

  // 0 < kappa < 1, lambda > 0, gamma, psi >= 0, alpha class-K-infinity;
  // require_gap additionally demands gamma < lambda.
  void validate(bool require_gap = false) const;
  bool operator==(const CertConstants&) const = default;
};

enum class CertStatus { unchecked, verified, refuted };
std::string_view status_name(CertStatus s);

struct Verification {
  CertStatus status = CertStatus::unchecked;
  double resolution = 0.0;
  std::vector<double> counterexample;
};

// Per-mode control barrier certificate over the state variables.
struct CbcCertificate {
  int mode = 1;
  Polynomial barrier;
  CertConstants constants;
  Verification verification;
};

// B(x, p, l) = kappa_p^(-l/eps) * B_p(x).
struct ApbcCertificate {
  std::vector<Polynomial> barriers;  // index p-1
  std::vector<double> mode_kappas;
  double epsilon = 2.0;
  int k_d = 1;
  CertConstants constants;
  Verification verification;

  int mode_count() const { return static_cast<int>(barriers.size()); }
  double factor(int p, int l) const;
  double eval(std::span<const double> x, int p, int l) const;
  void validate() const;
};

enum class UnsafeSemantics { product, union_ };
std::string_view semantics_name(UnsafeSemantics s);
UnsafeSemantics parse_semantics(std::string_view s);

// B(x, p, l) = max_i B_i(x_i, p_i, l_i) / s_i.
struct AbcCertificate {
  std::vector<ApbcCertificate> parts;
  std::vector<double> scalings;
  UnsafeSemantics semantics = UnsafeSemantics::union_;
  CertConstants constants;
  Verification verification;

  // Scaled component values and their maximum.
  double eval(std::span<const std::vector<double>> xs, std::span<const int> ps, std::span<const int> ls) const;
};

struct CheckReport {
  std::string condition;  // "C1".."C4"
  CertStatus status = CertStatus::unchecked;
  std::vector<double> counterexample;                // primary (worst) point, empty when verified
  std::vector<std::vector<double>> counterexamples;  // up to GridConfig::max_counterexamples
  std::string layout;                                // coordinate meaning, e.g. "x" or "x,w"
  std::optional<int> mode;
  std::optional<int> counter;
  std::vector<std::pair<int, std::vector<double>>> witnesses;  // (p', w) per admissible successor
  double resolution = 0.0;
  double worst_margin = 0.0;  // rhs - lhs; negative beyond tolerance means refuted
  bool sampled = false;
  std::size_t points = 0;
  std::string note;
};

bool all_verified(std::span<const CheckReport> reports);

// Stores the overall outcome of a report list in v.
void record(Verification& v, std::span<const CheckReport> reports);

}  // namespace bcert
