#pragma once

#include <cstddef>
#include <span>

#include "sepform/matrix.hpp"

namespace sepform {

inline constexpr double kConstructionHermiticityTol = 1e-12;
inline constexpr double kMatrixHermiticityTol = 1e-10;

/// Coefficient tensor t_{ijkl} of a Hermitian 2-form on C^m (x) (C^n)^*.
///
/// Index convention, used everywhere in this library: i,k run over the C^m
/// factor (amplitudes), j,l over the C^n factor (functionals). Storage is the
/// flattened (mn)x(mn) matrix M_{(ij),(kl)} = t_{ijkl} with (i,j) -> i*n + j,
/// which is also the row-major (i,j,k,l) order of the coefficient list.
///
/// Instances are immutable and always Hermitian: every constructor either
/// validates or takes the Hermitian part.
template <class Tag>
class BasicHermitianTensor {
 public:
  BasicHermitianTensor() = default;

  /// Zero tensor.
  BasicHermitianTensor(std::size_t m, std::size_t n) : m_(m), n_(n), mat_(m * n, m * n) {
    if (m == 0 || n == 0) throw ShapeError("form dimensions must be positive");
  }

  template <class OtherTag>
  explicit BasicHermitianTensor(const BasicHermitianTensor<OtherTag>& other)
      : m_(other.m()), n_(other.n()), mat_(other.matrix()) {}

  /// Validating constructor: M must be Hermitian within `tol` (absolute, scaled
  /// by max(1, max|M|)); the stored matrix is its exact Hermitian part.
  static BasicHermitianTensor from_matrix(std::size_t m, std::size_t n, const CMatrix& M,
                                          double tol = kMatrixHermiticityTol) {
    check_shape(m, n, M);
    const double scale = std::max(1.0, M.max_abs());
    if (hermiticity_defect(M) > tol * scale) throw InputError("matrix is not Hermitian within tolerance");
    return hermitized(m, n, M);
  }

  /// Stores the Hermitian part of M without validation. Used by constructors
  /// whose formulas are Hermitian analytically.
  static BasicHermitianTensor hermitized(std::size_t m, std::size_t n, const CMatrix& M) {
    check_shape(m, n, M);
    BasicHermitianTensor t;
    t.m_ = m;
    t.n_ = n;
    t.mat_ = hermitian_part(M);
    return t;
  }

  /// Coefficients in row-major (i,j,k,l) order.
  static BasicHermitianTensor from_coefficients(std::size_t m, std::size_t n, std::span<const Complex> c,
                                                double tol = kMatrixHermiticityTol) {
    if (c.size() != m * n * m * n) throw ShapeError("coefficient count does not match (mn)^2");
    return from_matrix(m, n, CMatrix(m * n, m * n, CVector(c.begin(), c.end())), tol);
  }

  std::size_t m() const noexcept { return m_; }
  std::size_t n() const noexcept { return n_; }
  std::size_t dim() const noexcept { return m_ * n_; }

  Complex operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
    return mat_(i * n_ + j, k * n_ + l);
  }

  const CMatrix& matrix() const noexcept { return mat_; }
  std::span<const Complex> coefficients() const noexcept { return mat_.data(); }

  bool same_shape(const BasicHermitianTensor& o) const noexcept { return m_ == o.m_ && n_ == o.n_; }

  double frobenius_norm() const { return mat_.frobenius_norm(); }

  BasicHermitianTensor operator+(const BasicHermitianTensor& o) const {
    require_same(o);
    return hermitized(m_, n_, mat_ + o.mat_);
  }
  BasicHermitianTensor operator-(const BasicHermitianTensor& o) const {
    require_same(o);
    return hermitized(m_, n_, mat_ - o.mat_);
  }
  BasicHermitianTensor operator*(double s) const { return hermitized(m_, n_, mat_ * Complex(s, 0.0)); }
  friend BasicHermitianTensor operator*(double s, const BasicHermitianTensor& t) { return t * s; }

  void require_same(const BasicHermitianTensor& o) const {
    if (!same_shape(o)) throw ShapeError("form shapes differ");
  }

 private:
  static void check_shape(std::size_t m, std::size_t n, const CMatrix& M) {
    if (m == 0 || n == 0) throw ShapeError("form dimensions must be positive");
    if (M.rows() != m * n || M.cols() != m * n) throw ShapeError("matrix is not (mn)x(mn)");
  }

  std::size_t m_ = 0;
  std::size_t n_ = 0;
  CMatrix mat_;
};

struct FormTag {};
struct FunctionalTag {};

/// A Hermitian 2-form (equivalently, a non-normalized density operator).
using HermitianForm = BasicHermitianTensor<FormTag>;
/// An element theta of the dual of the real space of Hermitian forms.
using DualFunctional = BasicHermitianTensor<FunctionalTag>;

/// Array in C^m (x) C^n, coefficients u_{ij} row-major.
struct TensorArray {
  std::size_t m = 0;
  std::size_t n = 0;
  CVector values;

  TensorArray() = default;
  TensorArray(std::size_t m_, std::size_t n_) : m(m_), n(n_), values(m_ * n_) {}
  TensorArray(std::size_t m_, std::size_t n_, CVector v) : m(m_), n(n_), values(std::move(v)) {
    if (values.size() != m * n) throw ShapeError("array size does not match m*n");
  }
  static TensorArray outer(std::span<const Complex> v, std::span<const Complex> w);

  Complex& operator()(std::size_t i, std::size_t j) { return values[i * n + j]; }
  Complex operator()(std::size_t i, std::size_t j) const { return values[i * n + j]; }
};

/// (a-bar (.) b)_{ijkl} = (conj(a_ij) b_kl + conj(b_ij) a_kl) / 2.
HermitianForm hermitian_tensor_product(const TensorArray& a, const TensorArray& b);

/// sum conj(u_ij) rho_ijkl v_kl
Complex evaluate(const HermitianForm& rho, const TensorArray& u, const TensorArray& v);

/// rho(v, v); the imaginary residual is checked against 1e-12 (relative) and dropped.
double quadratic(const HermitianForm& rho, const TensorArray& v);

/// <theta, rho> = sum theta_ijkl rho_ijkl. Throws InputError when the
/// imaginary residual exceeds `tol` (relative), which means one of the inputs
/// was not Hermitian.
double duality_pairing(const DualFunctional& theta, const HermitianForm& rho, double tol = 1e-12);

CMatrix to_matrix(const HermitianForm& rho);
HermitianForm from_matrix(const CMatrix& M, std::size_t m, std::size_t n);

/// Largest |rho_ijkl - conj(rho_klij)|; zero for stored forms, exposed for tests
/// on raw data.
double hermiticity_defect(const HermitianForm& rho);

/// Real coordinates of a Hermitian (mn)x(mn) matrix: the diagonal, then
/// sqrt(2)*Re and sqrt(2)*Im of the strict upper triangle. The Euclidean norm of
/// the vector equals the Frobenius norm of the matrix.
RVector real_coordinates(const HermitianForm& rho);
HermitianForm from_real_coordinates(std::size_t m, std::size_t n, std::span<const double> x);

}  // namespace sepform
