#include <doctest.h>

#include <cmath>

#include "sepform/constructors.hpp"
#include "sepform/eigen.hpp"
#include "support.hpp"

using namespace sepform;

namespace {

TensorArray unit(std::size_t m, std::size_t n, std::size_t i, std::size_t j) {
  TensorArray a(m, n);
  a(i, j) = 1.0;
  return a;
}

HermitianForm bell() {
  TensorArray w(2, 2);
  w(0, 0) = w(1, 1) = 1.0 / std::sqrt(2.0);
  return hermitian_tensor_product(w, w);
}

}  // namespace

TEST_CASE("hermitian tensor product on basis functionals") {
  const auto r = hermitian_tensor_product(unit(1, 1, 0, 0), unit(1, 1, 0, 0));
  CHECK(r(0, 0, 0, 0) == Complex(1.0, 0.0));
  CHECK(hermitian_tensor_product(unit(1, 1, 0, 0), TensorArray(1, 1)).frobenius_norm() == 0.0);

  // a = e_11, b = e_12 on C^1 (x) C^2: only the mixed slots carry 1/2.
  const auto a = unit(1, 2, 0, 0), b = unit(1, 2, 0, 1);
  const auto s = hermitian_tensor_product(a, b);
  CHECK(s(0, 0, 0, 1) == Complex(0.5, 0.0));
  CHECK(s(0, 1, 0, 0) == Complex(0.5, 0.0));
  CHECK(s(0, 0, 0, 0) == Complex(0.0, 0.0));
  CHECK(s(0, 1, 0, 1) == Complex(0.0, 0.0));
  // Brute force: (a-bar (.) b)(z, w) = (conj(a(z)) b(w) + conj(b(z)) a(w)) / 2 on basis arrays.
  for (std::size_t p = 0; p < 2; ++p)
    for (std::size_t q = 0; q < 2; ++q) {
      const auto z = unit(1, 2, 0, p), w = unit(1, 2, 0, q);
      auto f = [](const TensorArray& x, const TensorArray& y) {
        Complex t{};
        for (std::size_t k = 0; k < x.values.size(); ++k) t += x.values[k] * y.values[k];
        return t;
      };
      const Complex expect = 0.5 * (std::conj(f(a, z)) * f(b, w) + std::conj(f(b, z)) * f(a, w));
      CHECK(std::abs(evaluate(s, z, w) - expect) < 1e-15);
    }
  CHECK_THROWS_AS(hermitian_tensor_product(TensorArray(1, 2), TensorArray(2, 1)), ShapeError);
}

TEST_CASE("evaluate and quadratic") {
  const auto p = product_form(CVector{1, 0}, CVector{1, 0});
  CHECK(quadratic(p, unit(2, 2, 0, 0)) == doctest::Approx(1.0));
  CHECK(quadratic(p, TensorArray(2, 2)) == 0.0);
  TensorArray v(2, 2);
  v(0, 0) = 1.0 / std::sqrt(2.0);
  v(1, 1) = -1.0 / std::sqrt(2.0);
  CHECK(std::abs(quadratic(bell(), v)) < 1e-15);
  CHECK_THROWS_AS(quadratic(p, TensorArray(1, 2)), ShapeError);
}

TEST_CASE("duality pairing") {
  std::mt19937_64 rng(3);
  // Real unit vectors: sum theta_ijkl rho_ijkl = |sigma|^4 = 1.
  CVector phi{0.6, 0.8}, psi{0.0, 1.0};
  const auto p = product_form(phi, psi);
  CHECK(duality_pairing(DualFunctional(p), p) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(duality_pairing(DualFunctional(test::random_form(2, 3, rng)), HermitianForm(2, 3)) == 0.0);

  for (int trial = 0; trial < 20; ++trial) {
    const auto theta = DualFunctional(test::random_form(2, 2, rng));
    const auto rho = test::random_form(2, 2, rng);
    // Literal coefficient sum equals tr(M_theta^T M_rho).
    const CMatrix prod = theta.matrix().transpose() * rho.matrix();
    CHECK(std::abs(duality_pairing(theta, rho) - prod.trace().real()) < 1e-12);
    // With real coefficients this is also tr(M_theta^dagger M_rho).
    CMatrix tr = theta.matrix(), rr = rho.matrix();
    for (auto* M : {&tr, &rr})
      for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = 0; b < 4; ++b) (*M)(a, b) = Complex((*M)(a, b).real(), 0.0);
    const auto tr_h = DualFunctional::from_matrix(2, 2, hermitian_part(tr));
    const auto rr_h = HermitianForm::from_matrix(2, 2, hermitian_part(rr));
    CHECK(std::abs(duality_pairing(tr_h, rr_h) - (tr_h.matrix().adjoint() * rr_h.matrix()).trace().real()) < 1e-10);
  }
  CHECK_THROWS_AS(duality_pairing(DualFunctional(2, 2), HermitianForm(2, 3)), ShapeError);
}

TEST_CASE("matrix flattening") {
  CMatrix one(1, 1);
  one(0, 0) = 2.5;
  CHECK(to_matrix(from_matrix(one, 1, 1))(0, 0) == Complex(2.5, 0.0));

  const CMatrix M = to_matrix(product_form(CVector{1, 0}, CVector{0, 1}));
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b) CHECK(M(a, b) == Complex(a == 1 && b == 1 ? 1.0 : 0.0, 0.0));

  std::mt19937_64 rng(5);
  const auto r = test::random_form(3, 2, rng);
  CHECK(test::bitwise_equal(to_matrix(from_matrix(to_matrix(r), 3, 2)).data(), r.matrix().data()));

  CMatrix bad(4, 4);
  bad(0, 1) = 1.0;
  CHECK_THROWS_AS(from_matrix(bad, 2, 2), InputError);
  CHECK_THROWS_AS(from_matrix(CMatrix(3, 3), 2, 2), ShapeError);
}

TEST_CASE("real coordinates are an isometry") {
  std::mt19937_64 rng(8);
  const auto r = test::random_form(2, 3, rng);
  const RVector x = real_coordinates(r);
  CHECK(x.size() == 36);
  double s = 0.0;
  for (double v : x) s += v * v;
  CHECK(std::sqrt(s) == doctest::Approx(r.frobenius_norm()).epsilon(1e-13));
  CHECK((from_real_coordinates(2, 3, x) - r).frobenius_norm() < 1e-14);
}

TEST_CASE("Jacobi eigensolver") {
  const Spectrum id = eig_hermitian(CMatrix::identity(3));
  CHECK(id.rank == 3);
  for (double l : id.eigenvalues) CHECK(l == doctest::Approx(1.0));

  CMatrix d(2, 2);
  d(1, 1) = 2.0;
  const Spectrum sd = eig_hermitian(d);
  CHECK(sd.eigenvalues[0] == doctest::Approx(0.0));
  CHECK(sd.eigenvalues[1] == doctest::Approx(2.0));
  CHECK(sd.rank == 1);

  // Partially transposed Bell projector: eigenvalues (-1/2, 1/2, 1/2, 1/2).
  CMatrix pt(4, 4);
  const auto b = bell();
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t l = 0; l < 2; ++l) pt(i * 2 + j, k * 2 + l) = b(i, l, k, j);
  const Spectrum sp = eig_hermitian(pt);
  CHECK(sp.min() == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(sp.max() == doctest::Approx(0.5).epsilon(1e-12));

  CMatrix nh(2, 2);
  nh(0, 1) = 1.0;
  CHECK_THROWS_AS(eig_hermitian(nh), InputError);
}

TEST_CASE("eigensolver invariants on random matrices") {
  std::mt19937_64 rng(13);
  for (std::size_t d : {1u, 2u, 5u, 9u, 16u}) {
    const CMatrix M = test::random_hermitian(d, rng);
    const Spectrum s = eig_hermitian(M);
    const double norm = M.frobenius_norm();
    double sum = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      sum += s.eigenvalues[c];
      if (c > 0) CHECK(s.eigenvalues[c - 1] <= s.eigenvalues[c]);
      const CVector v = s.eigenvectors.column(c);
      CVector r = M * v;
      for (std::size_t a = 0; a < d; ++a) r[a] -= s.eigenvalues[c] * v[a];
      CHECK(norm2(r) <= 1e-9 * norm);
    }
    CHECK(std::abs(sum - M.trace().real()) <= 1e-9 * norm);
    const CMatrix G = s.eigenvectors.adjoint() * s.eigenvectors;
    CHECK((G - CMatrix::identity(d)).frobenius_norm() <= 1e-9);
  }
}

TEST_CASE("quadratic is nonnegative on PSD forms") {
  std::mt19937_64 rng(21);
  const auto rho = separable_mixture({{0.3, test::random_vector(2, rng), test::random_vector(3, rng)},
                                      {1.1, test::random_vector(2, rng), test::random_vector(3, rng)}});
  for (int t = 0; t < 1000; ++t) {
    const TensorArray v(2, 3, test::random_vector(6, rng));
    CHECK(quadratic(rho, v) >= -1e-10 * rho.frobenius_norm() * std::pow(norm2(v.values), 2));
  }
}

TEST_CASE("linear solver") {
  RMatrix A(3, 3);
  const double vals[9] = {2, 1, 0, 1, 3, 1, 0, 1, 4};
  for (std::size_t t = 0; t < 9; ++t) A.data()[t] = vals[t];
  const RVector x = lu_solve(A, RVector{3, 5, 5});
  CHECK(x[0] == doctest::Approx(1.0));
  CHECK(x[1] == doctest::Approx(1.0));
  CHECK(x[2] == doctest::Approx(1.0));
  CHECK_THROWS_AS(lu_solve(RMatrix(2, 2), RVector{1, 1}), ConvergenceError);
}
