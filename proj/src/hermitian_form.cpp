#include "sepform/hermitian_form.hpp"

#include <cmath>

namespace sepform {

namespace {

void require_shape(const HermitianForm& rho, const TensorArray& u) {
  if (u.m != rho.m() || u.n != rho.n() || u.values.size() != rho.dim())
    throw ShapeError("array shape does not match the form");
}

}  // namespace

TensorArray TensorArray::outer(std::span<const Complex> v, std::span<const Complex> w) {
  TensorArray t(v.size(), w.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < w.size(); ++j) t(i, j) = v[i] * w[j];
  return t;
}

HermitianForm hermitian_tensor_product(const TensorArray& a, const TensorArray& b) {
  if (a.m != b.m || a.n != b.n || a.values.size() != b.values.size())
    throw ShapeError("hermitian_tensor_product: shape mismatch");
  const std::size_t N = a.values.size();
  CMatrix M(N, N);
  for (std::size_t r = 0; r < N; ++r)
    for (std::size_t c = 0; c < N; ++c)
      M(r, c) = 0.5 * (std::conj(a.values[r]) * b.values[c] + std::conj(b.values[r]) * a.values[c]);
  return HermitianForm::hermitized(a.m, a.n, M);
}

Complex evaluate(const HermitianForm& rho, const TensorArray& u, const TensorArray& v) {
  require_shape(rho, u);
  require_shape(rho, v);
  const CMatrix& M = rho.matrix();
  Complex s{};
  for (std::size_t r = 0; r < rho.dim(); ++r) {
    Complex row{};
    for (std::size_t c = 0; c < rho.dim(); ++c) row += M(r, c) * v.values[c];
    s += std::conj(u.values[r]) * row;
  }
  return s;
}

double quadratic(const HermitianForm& rho, const TensorArray& v) {
  const Complex q = evaluate(rho, v, v);
  const double scale = std::max(1.0, rho.matrix().max_abs() * std::pow(norm2(v.values), 2));
  if (std::abs(q.imag()) > 1e-12 * scale) throw InputError("quadratic: imaginary residual above tolerance");
  return q.real();
}

double duality_pairing(const DualFunctional& theta, const HermitianForm& rho, double tol) {
  if (theta.m() != rho.m() || theta.n() != rho.n()) throw ShapeError("duality_pairing: shape mismatch");
  const auto t = theta.coefficients();
  const auto r = rho.coefficients();
  Complex s{};
  double scale = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    s += t[i] * r[i];
    scale += std::abs(t[i]) * std::abs(r[i]);
  }
  if (std::abs(s.imag()) > tol * std::max(1.0, scale))
    throw InputError("duality_pairing: imaginary residual above tolerance (non-Hermitian input)");
  return s.real();
}

CMatrix to_matrix(const HermitianForm& rho) { return rho.matrix(); }

HermitianForm from_matrix(const CMatrix& M, std::size_t m, std::size_t n) {
  return HermitianForm::from_matrix(m, n, M);
}

double hermiticity_defect(const HermitianForm& rho) { return hermiticity_defect(rho.matrix()); }

RVector real_coordinates(const HermitianForm& rho) {
  const std::size_t N = rho.dim();
  const CMatrix& M = rho.matrix();
  RVector x;
  x.reserve(N * N);
  for (std::size_t a = 0; a < N; ++a) x.push_back(M(a, a).real());
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t b = a + 1; b < N; ++b) {
      x.push_back(std::sqrt(2.0) * M(a, b).real());
      x.push_back(std::sqrt(2.0) * M(a, b).imag());
    }
  return x;
}

HermitianForm from_real_coordinates(std::size_t m, std::size_t n, std::span<const double> x) {
  const std::size_t N = m * n;
  if (x.size() != N * N) throw ShapeError("real coordinate vector has wrong length");
  CMatrix M(N, N);
  std::size_t p = 0;
  for (std::size_t a = 0; a < N; ++a) M(a, a) = x[p++];
  const double s = 1.0 / std::sqrt(2.0);
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t b = a + 1; b < N; ++b) {
      M(a, b) = Complex(s * x[p], s * x[p + 1]);
      M(b, a) = std::conj(M(a, b));
      p += 2;
    }
  return HermitianForm::hermitized(m, n, M);
}

}  // namespace sepform
