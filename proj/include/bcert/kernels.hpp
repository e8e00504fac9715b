#pragma once

// Batched numeric kernels used by the grid checkers and the simulator.
//
// Every kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant chosen at runtime. Both variants perform the same floating-point
// operations in the same order (no FMA contraction), so results are
// bit-identical; tests/unit/test_kernels.cpp enforces this.

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "bcert/polynomial.hpp"

namespace bcert::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);
bool isa_available(Isa isa);
Isa detected_isa();
// detected_isa() unless BCERT_SIMD=scalar is set in the environment.
Isa active_isa();

struct Factor {
  std::uint32_t var;
  std::uint32_t exp;
};

// Flattened term list of a polynomial, in the polynomial's term order.
class EvalPlan {
 public:
  EvalPlan() = default;
  explicit EvalPlan(const Polynomial& p);

  std::size_t variable_count() const { return nvars_; }
  std::size_t term_count() const { return coefs_.size(); }
  std::span<const double> coefficients() const { return coefs_; }
  std::span<const std::uint32_t> factor_offsets() const { return offsets_; }
  std::span<const Factor> factors() const { return factors_; }

 private:
  std::size_t nvars_ = 0;
  std::vector<double> coefs_;
  std::vector<std::uint32_t> offsets_{0};
  std::vector<Factor> factors_;
};

// out[i] = p(columns[0][i], ..., columns[n-1][i]) for i < count.
void eval_batch(const EvalPlan& plan, std::span<const double* const> columns, std::size_t count, double* out,
                Isa isa);
void eval_batch(const EvalPlan& plan, std::span<const double* const> columns, std::size_t count, double* out);

// p(point) for one contiguous point; same operation order as eval_batch.
double eval_point(const EvalPlan& plan, const double* point);

// out[i] = max_c |columns[c][i]|, 0 when there are no columns.
void abs_max_batch(std::span<const double* const> columns, std::size_t count, double* out, Isa isa);
void abs_max_batch(std::span<const double* const> columns, std::size_t count, double* out);

namespace detail {
void eval_batch_scalar(const EvalPlan& plan, const double* const* columns, std::size_t begin, std::size_t end,
                       double* out);
void abs_max_scalar(const double* const* columns, std::size_t ncols, std::size_t begin, std::size_t end,
                    double* out);
#if defined(BCERT_HAVE_AVX2)
void eval_batch_avx2(const EvalPlan& plan, const double* const* columns, std::size_t count, double* out);
void abs_max_avx2(const double* const* columns, std::size_t ncols, std::size_t count, double* out);
#endif
}  // namespace detail

}  // namespace bcert::kernels
