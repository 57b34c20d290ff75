#include "kernels_impl.hpp"

namespace sepform::kernels::detail {

void lincomb_scalar(double* out, const double* const* src, const double* coef, std::size_t nsrc,
                    std::size_t len) {
  for (std::size_t k = 0; k < len; ++k) {
    double s = 0.0;
    for (std::size_t t = 0; t < nsrc; ++t) s += coef[t] * src[t][k];
    out[k] = s;
  }
}

void gram_scalar(const Complex* rows, std::size_t count, std::size_t dim, Complex* acc) {
  // Explicit real arithmetic: std::complex multiplication carries inf/nan
  // recovery branches that are irrelevant here.
  const double* x = reinterpret_cast<const double*>(rows);
  double* g = reinterpret_cast<double*>(acc);
  for (std::size_t r = 0; r < count; ++r) {
    const double* xr = x + 2 * r * dim;
    for (std::size_t a = 0; a < dim; ++a) {
      const double ar = xr[2 * a];
      const double ai = -xr[2 * a + 1];
      double* ga = g + 2 * a * dim;
      for (std::size_t b = 0; b < dim; ++b) {
        const double br = xr[2 * b];
        const double bi = xr[2 * b + 1];
        ga[2 * b] += ar * br - ai * bi;
        ga[2 * b + 1] += ar * bi + ai * br;
      }
    }
  }
}

}  // namespace sepform::kernels::detail
