#pragma once

// Data-parallel inner loops of the quadrature oracle. Each kernel has a scalar
// reference implementation and, on x86-64, an AVX2+FMA variant chosen at
// runtime. Variants agree to rounding (FMA contraction and summation order
// differ); tests/test_kernels.cpp pins the equivalence.

#include <cstddef>
#include <string_view>

#include "sepform/matrix.hpp"

namespace sepform::kernels {

enum class Isa { Scalar, Avx2 };

/// out[k] = sum_t coef[t] * src[t][k] for k < len (plain doubles; complex
/// arrays are passed as interleaved re/im).
using LincombFn = void (*)(double* out, const double* const* src, const double* coef, std::size_t nsrc,
                           std::size_t len);

/// acc[a*dim + b] += sum_r conj(rows[r*dim + a]) * rows[r*dim + b].
using GramFn = void (*)(const Complex* rows, std::size_t count, std::size_t dim, Complex* acc);

struct Table {
  Isa isa;
  std::string_view name;
  LincombFn lincomb;
  GramFn gram_accumulate;
};

const Table& scalar_table();

/// nullptr when the binary was built without AVX2 support or the CPU lacks it.
const Table* avx2_table();

/// Kernel table used by the library: AVX2 when available unless scalar was forced.
const Table& active();

/// Forces the scalar reference kernels (true) or restores automatic selection.
void force_scalar(bool on);

}  // namespace sepform::kernels
