#pragma once

#include "sepform/matrix.hpp"

namespace sepform {

inline constexpr double kDefaultRankTol = 1e-8;

/// Eigen-decomposition of a Hermitian matrix.
struct Spectrum {
  RVector eigenvalues;   // ascending
  CMatrix eigenvectors;  // column c pairs with eigenvalues[c]
  std::size_t rank = 0;  // #{ |lambda| > tol * max(1, max|lambda|) }
  double tolerance = kDefaultRankTol;

  double min() const { return eigenvalues.front(); }
  double max() const { return eigenvalues.back(); }
  double spectral_norm() const;
};

/// Cyclic complex Jacobi. Deterministic row-by-row sweep order; stops when the
/// off-diagonal mass falls below machine-precision relative to ||M||_F.
/// Throws InputError on non-Hermitian input (1e-10 absolute, scaled by
/// max(1, max|M|)) and ConvergenceError after the sweep cap.
Spectrum eig_hermitian(const CMatrix& M, double rank_tol = kDefaultRankTol);

/// Numerical rank of a real symmetric positive semi-definite matrix, same
/// threshold rule as Spectrum.
std::size_t symmetric_rank(const RMatrix& G, double rank_tol = kDefaultRankTol);

/// Solves A x = b by LU with partial pivoting. Throws ConvergenceError when a
/// pivot falls below `singular_tol` * max|A| (numerically singular system).
RVector lu_solve(RMatrix A, RVector b, double singular_tol = 1e-13);

}  // namespace sepform
