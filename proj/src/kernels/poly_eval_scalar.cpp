#include <cmath>

#include "bcert/kernels.hpp"

namespace bcert::kernels {

EvalPlan::EvalPlan(const Polynomial& p) : nvars_(p.space()->size()) {
  coefs_.reserve(p.term_count());
  for (const auto& [e, c] : p.terms()) {
    coefs_.push_back(c);
    for (std::size_t v = 0; v < e.size(); ++v)
      if (e[v] > 0) factors_.push_back({static_cast<std::uint32_t>(v), e[v]});
    offsets_.push_back(static_cast<std::uint32_t>(factors_.size()));
  }
}

double eval_point(const EvalPlan& plan, const double* point) {
  const auto coefs = plan.coefficients();
  const auto offs = plan.factor_offsets();
  const auto facs = plan.factors();
  double sum = 0.0;
  for (std::size_t t = 0; t < coefs.size(); ++t) {
    double acc = coefs[t];
    for (std::uint32_t f = offs[t]; f < offs[t + 1]; ++f)
      for (std::uint32_t k = 0; k < facs[f].exp; ++k) acc *= point[facs[f].var];
    sum += acc;
  }
  return sum;
}

namespace detail {

void eval_batch_scalar(const EvalPlan& plan, const double* const* columns, std::size_t begin, std::size_t end,
                       double* out) {
  const auto coefs = plan.coefficients();
  const auto offs = plan.factor_offsets();
  const auto facs = plan.factors();
  for (std::size_t i = begin; i < end; ++i) {
    double sum = 0.0;
    for (std::size_t t = 0; t < coefs.size(); ++t) {
      double acc = coefs[t];
      for (std::uint32_t f = offs[t]; f < offs[t + 1]; ++f) {
        const double x = columns[facs[f].var][i];
        for (std::uint32_t k = 0; k < facs[f].exp; ++k) acc *= x;
      }
      sum += acc;
    }
    out[i] = sum;
  }
}

void abs_max_scalar(const double* const* columns, std::size_t ncols, std::size_t begin, std::size_t end,
                    double* out) {
  for (std::size_t i = begin; i < end; ++i) {
    double m = 0.0;
    for (std::size_t c = 0; c < ncols; ++c) {
      const double a = std::fabs(columns[c][i]);
      m = a > m ? a : m;
    }
    out[i] = m;
  }
}

}  // namespace detail
}  // namespace bcert::kernels
