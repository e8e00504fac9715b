// AVX2 variants. Compiled with -mavx2 only (no FMA) so every lane performs
// exactly the scalar reference's operation sequence.

#include <immintrin.h>

#include "bcert/kernels.hpp"

namespace bcert::kernels::detail {

void eval_batch_avx2(const EvalPlan& plan, const double* const* columns, std::size_t count, double* out) {
  const auto coefs = plan.coefficients();
  const auto offs = plan.factor_offsets();
  const auto facs = plan.factors();
  const std::size_t vec_end = count - count % 4;
  for (std::size_t i = 0; i < vec_end; i += 4) {
    __m256d sum = _mm256_setzero_pd();
    for (std::size_t t = 0; t < coefs.size(); ++t) {
      __m256d acc = _mm256_set1_pd(coefs[t]);
      for (std::uint32_t f = offs[t]; f < offs[t + 1]; ++f) {
        const __m256d x = _mm256_loadu_pd(columns[facs[f].var] + i);
        for (std::uint32_t k = 0; k < facs[f].exp; ++k) acc = _mm256_mul_pd(acc, x);
      }
      sum = _mm256_add_pd(sum, acc);
    }
    _mm256_storeu_pd(out + i, sum);
  }
  eval_batch_scalar(plan, columns, vec_end, count, out);
}

void abs_max_avx2(const double* const* columns, std::size_t ncols, std::size_t count, double* out) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  const std::size_t vec_end = count - count % 4;
  for (std::size_t i = 0; i < vec_end; i += 4) {
    __m256d m = _mm256_setzero_pd();
    for (std::size_t c = 0; c < ncols; ++c) {
      const __m256d a = _mm256_andnot_pd(sign_mask, _mm256_loadu_pd(columns[c] + i));
      // max(a, m) picks a where a > m, matching the scalar select.
      m = _mm256_blendv_pd(m, a, _mm256_cmp_pd(a, m, _CMP_GT_OQ));
    }
    _mm256_storeu_pd(out + i, m);
  }
  abs_max_scalar(columns, ncols, vec_end, count, out);
}

}  // namespace bcert::kernels::detail
