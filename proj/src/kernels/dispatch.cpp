#include <cstdlib>
#include <string>

#include "bcert/errors.hpp"
#include "bcert/kernels.hpp"

namespace bcert::kernels {

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool isa_available(Isa isa) {
  if (isa == Isa::scalar) return true;
#if defined(BCERT_HAVE_AVX2)
  static const bool has_avx2 = __builtin_cpu_supports("avx2");
  return has_avx2;
#else
  return false;
#endif
}

Isa detected_isa() { return isa_available(Isa::avx2) ? Isa::avx2 : Isa::scalar; }

Isa active_isa() {
  static const Isa isa = [] {
    const char* env = std::getenv("BCERT_SIMD");
    if (env && std::string(env) == "scalar") return Isa::scalar;
    return detected_isa();
  }();
  return isa;
}

void eval_batch(const EvalPlan& plan, std::span<const double* const> columns, std::size_t count, double* out,
                Isa isa) {
  if (columns.size() != plan.variable_count())
    throw InputError("eval_batch: " + std::to_string(columns.size()) + " columns for " +
                     std::to_string(plan.variable_count()) + " variables");
  if (!isa_available(isa)) throw CapabilityError("instruction set " + std::string(isa_name(isa)) + " not available");
#if defined(BCERT_HAVE_AVX2)
  if (isa == Isa::avx2) {
    detail::eval_batch_avx2(plan, columns.data(), count, out);
    return;
  }
#endif
  detail::eval_batch_scalar(plan, columns.data(), 0, count, out);
}

void eval_batch(const EvalPlan& plan, std::span<const double* const> columns, std::size_t count, double* out) {
  eval_batch(plan, columns, count, out, active_isa());
}

void abs_max_batch(std::span<const double* const> columns, std::size_t count, double* out, Isa isa) {
  if (!isa_available(isa)) throw CapabilityError("instruction set " + std::string(isa_name(isa)) + " not available");
#if defined(BCERT_HAVE_AVX2)
  if (isa == Isa::avx2) {
    detail::abs_max_avx2(columns.data(), columns.size(), count, out);
    return;
  }
#endif
  detail::abs_max_scalar(columns.data(), columns.size(), 0, count, out);
}

void abs_max_batch(std::span<const double* const> columns, std::size_t count, double* out) {
  abs_max_batch(columns, count, out, active_isa());
}

}  // namespace bcert::kernels
