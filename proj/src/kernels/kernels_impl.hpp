#pragma once

#include "sepform/kernels.hpp"

namespace sepform::kernels::detail {

void lincomb_scalar(double* out, const double* const* src, const double* coef, std::size_t nsrc,
                    std::size_t len);
void gram_scalar(const Complex* rows, std::size_t count, std::size_t dim, Complex* acc);

#if defined(SEPFORM_HAVE_AVX2)
void lincomb_avx2(double* out, const double* const* src, const double* coef, std::size_t nsrc, std::size_t len);
void gram_avx2(const Complex* rows, std::size_t count, std::size_t dim, Complex* acc);
#endif

}  // namespace sepform::kernels::detail
