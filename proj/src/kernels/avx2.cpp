// Compiled with -mavx2 -mfma; only reached through the runtime dispatch in
// dispatch.cpp after a CPU feature check.
#include <immintrin.h>

#include "kernels_impl.hpp"

namespace sepform::kernels::detail {

void lincomb_avx2(double* out, const double* const* src, const double* coef, std::size_t nsrc,
                  std::size_t len) {
  if (nsrc == 0) {
    for (std::size_t k = 0; k < len; ++k) out[k] = 0.0;
    return;
  }
  std::size_t k = 0;
  for (; k + 4 <= len; k += 4) {
    __m256d v = _mm256_mul_pd(_mm256_set1_pd(coef[0]), _mm256_loadu_pd(src[0] + k));
    for (std::size_t t = 1; t < nsrc; ++t) v = _mm256_fmadd_pd(_mm256_set1_pd(coef[t]), _mm256_loadu_pd(src[t] + k), v);
    _mm256_storeu_pd(out + k, v);
  }
  for (; k < len; ++k) {
    double s = coef[0] * src[0][k];
    for (std::size_t t = 1; t < nsrc; ++t) s += coef[t] * src[t][k];
    out[k] = s;
  }
}

// For each output row a and each pair of columns (b, b+1), the accumulator
// stays in registers while streaming over the rows:
//   p = sum_r Re(x_a) * x_b,  q = sum_r -Im(x_a) * swap(x_b)
// and conj(x_a) x_b = addsub(p, q) lane-wise.
void gram_avx2(const Complex* rows, std::size_t count, std::size_t dim, Complex* acc) {
  const double* x = reinterpret_cast<const double*>(rows);
  double* g = reinterpret_cast<double*>(acc);
  const std::size_t stride = 2 * dim;
  for (std::size_t a = 0; a < dim; ++a) {
    std::size_t b = 0;
    for (; b + 2 <= dim; b += 2) {
      __m256d p = _mm256_setzero_pd();
      __m256d q = _mm256_setzero_pd();
      for (std::size_t r = 0; r < count; ++r) {
        const double* xr = x + r * stride;
        const __m256d xb = _mm256_loadu_pd(xr + 2 * b);
        const __m256d xs = _mm256_permute_pd(xb, 0b0101);
        p = _mm256_fmadd_pd(_mm256_set1_pd(xr[2 * a]), xb, p);
        q = _mm256_fmadd_pd(_mm256_set1_pd(-xr[2 * a + 1]), xs, q);
      }
      double* dst = g + 2 * (a * dim + b);
      _mm256_storeu_pd(dst, _mm256_add_pd(_mm256_loadu_pd(dst), _mm256_addsub_pd(p, q)));
    }
    if (b < dim) {
      __m128d p = _mm_setzero_pd();
      __m128d q = _mm_setzero_pd();
      for (std::size_t r = 0; r < count; ++r) {
        const double* xr = x + r * stride;
        const __m128d xb = _mm_loadu_pd(xr + 2 * b);
        const __m128d xs = _mm_permute_pd(xb, 0b01);
        p = _mm_fmadd_pd(_mm_set1_pd(xr[2 * a]), xb, p);
        q = _mm_fmadd_pd(_mm_set1_pd(-xr[2 * a + 1]), xs, q);
      }
      double* dst = g + 2 * (a * dim + b);
      _mm_storeu_pd(dst, _mm_add_pd(_mm_loadu_pd(dst), _mm_addsub_pd(p, q)));
    }
  }
}

}  // namespace sepform::kernels::detail
