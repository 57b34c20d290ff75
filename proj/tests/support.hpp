#pragma once

#include <algorithm>
#include <random>
#include <span>

#include "sepform/hermitian_form.hpp"

namespace sepform::test {

inline CVector random_vector(std::size_t len, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CVector v(len);
  for (auto& c : v) {
    const double re = u(rng);
    c = scale * Complex(re, u(rng));
  }
  return v;
}

inline CVector unit_vector(std::size_t len, std::mt19937_64& rng) {
  CVector v = random_vector(len, rng);
  const double s = norm2(v);
  for (auto& c : v) c /= s;
  return v;
}

inline CMatrix random_hermitian(std::size_t d, std::mt19937_64& rng) {
  CMatrix M(d, d);
  for (std::size_t a = 0; a < d; ++a) {
    const CVector row = random_vector(d, rng);
    for (std::size_t b = 0; b < d; ++b) M(a, b) = row[b];
  }
  return hermitian_part(M);
}

inline HermitianForm random_form(std::size_t m, std::size_t n, std::mt19937_64& rng) {
  return HermitianForm::hermitized(m, n, random_hermitian(m * n, rng));
}

inline bool bitwise_equal(std::span<const Complex> a, std::span<const Complex> b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end());
}

inline double max_abs_diff(const CMatrix& a, const CMatrix& b) { return (a - b).max_abs(); }

}  // namespace sepform::test
