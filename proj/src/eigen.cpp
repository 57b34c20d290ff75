#include "sepform/eigen.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace sepform {

namespace {

constexpr int kMaxSweeps = 100;

double off_diagonal_norm(const CMatrix& A) {
  double s = 0.0;
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t j = i + 1; j < A.cols(); ++j) s += std::norm(A(i, j));
  return std::sqrt(2.0 * s);
}

// Zero A(p,q) with U = diag(1, conj(e)) * [[c, s], [-s, c]] acting on (p,q),
// where e = A(p,q)/|A(p,q)|. Updates A <- U^dagger A U and V <- V U.
void rotate(CMatrix& A, CMatrix& V, std::size_t p, std::size_t q) {
  const Complex apq = A(p, q);
  const double g = std::abs(apq);
  const Complex e = apq / g;
  const double app = A(p, p).real();
  const double aqq = A(q, q).real();
  const double theta = (aqq - app) / (2.0 * g);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  const Complex u_pp = c;
  const Complex u_pq = s;
  const Complex u_qp = -s * std::conj(e);
  const Complex u_qq = c * std::conj(e);

  const std::size_t N = A.rows();
  // A <- A U (columns p, q)
  for (std::size_t r = 0; r < N; ++r) {
    const Complex arp = A(r, p);
    const Complex arq = A(r, q);
    A(r, p) = arp * u_pp + arq * u_qp;
    A(r, q) = arp * u_pq + arq * u_qq;
  }
  // A <- U^dagger A (rows p, q)
  for (std::size_t col = 0; col < N; ++col) {
    const Complex apc = A(p, col);
    const Complex aqc = A(q, col);
    A(p, col) = std::conj(u_pp) * apc + std::conj(u_qp) * aqc;
    A(q, col) = std::conj(u_pq) * apc + std::conj(u_qq) * aqc;
  }
  A(p, q) = 0.0;
  A(q, p) = 0.0;
  A(p, p) = app - t * g;
  A(q, q) = aqq + t * g;

  for (std::size_t r = 0; r < N; ++r) {
    const Complex vrp = V(r, p);
    const Complex vrq = V(r, q);
    V(r, p) = vrp * u_pp + vrq * u_qp;
    V(r, q) = vrp * u_pq + vrq * u_qq;
  }
}

std::size_t count_rank(const RVector& lambda, double tol) {
  double top = 0.0;
  for (double l : lambda) top = std::max(top, std::abs(l));
  const double threshold = tol * std::max(1.0, top);
  return static_cast<std::size_t>(
      std::count_if(lambda.begin(), lambda.end(), [&](double l) { return std::abs(l) > threshold; }));
}

}  // namespace

double Spectrum::spectral_norm() const {
  double s = 0.0;
  for (double l : eigenvalues) s = std::max(s, std::abs(l));
  return s;
}

Spectrum eig_hermitian(const CMatrix& M, double rank_tol) {
  if (!M.square()) throw ShapeError("eig_hermitian: matrix is not square");
  const double scale = std::max(1.0, M.max_abs());
  if (hermiticity_defect(M) > 1e-10 * scale) throw InputError("eig_hermitian: matrix is not Hermitian");

  const std::size_t N = M.rows();
  CMatrix A = hermitian_part(M);
  CMatrix V = CMatrix::identity(N);
  const double total = std::max(A.frobenius_norm(), std::numeric_limits<double>::min());
  const double eps = std::numeric_limits<double>::epsilon();

  bool converged = N <= 1;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    if (off_diagonal_norm(A) <= eps * total) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p + 1 < N; ++p)
      for (std::size_t q = p + 1; q < N; ++q) {
        const double g = std::abs(A(p, q));
        if (g == 0.0) continue;
        // Entries negligible against both diagonals are dropped without rotating.
        const double dp = std::abs(A(p, p).real());
        const double dq = std::abs(A(q, q).real());
        if (sweep > 3 && dp + 100.0 * g == dp && dq + 100.0 * g == dq) {
          A(p, q) = 0.0;
          A(q, p) = 0.0;
          continue;
        }
        rotate(A, V, p, q);
      }
  }
  if (!converged && off_diagonal_norm(A) > eps * total)
    throw ConvergenceError("eig_hermitian: Jacobi sweeps did not converge");

  std::vector<std::size_t> order(N);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return A(a, a).real() < A(b, b).real(); });

  Spectrum s;
  s.eigenvalues.resize(N);
  s.eigenvectors = CMatrix(N, N);
  for (std::size_t c = 0; c < N; ++c) {
    s.eigenvalues[c] = A(order[c], order[c]).real();
    for (std::size_t r = 0; r < N; ++r) s.eigenvectors(r, c) = V(r, order[c]);
  }
  s.tolerance = rank_tol;
  s.rank = count_rank(s.eigenvalues, rank_tol);
  return s;
}

std::size_t symmetric_rank(const RMatrix& G, double rank_tol) {
  CMatrix C(G.rows(), G.cols());
  for (std::size_t r = 0; r < G.rows(); ++r)
    for (std::size_t c = 0; c < G.cols(); ++c) C(r, c) = G(r, c);
  return eig_hermitian(C, rank_tol).rank;
}

RVector lu_solve(RMatrix A, RVector b, double singular_tol) {
  const std::size_t N = A.rows();
  if (!A.square() || b.size() != N) throw ShapeError("lu_solve: shape mismatch");
  const double scale = std::max(A.max_abs(), std::numeric_limits<double>::min());
  for (std::size_t k = 0; k < N; ++k) {
    std::size_t piv = k;
    for (std::size_t r = k + 1; r < N; ++r)
      if (std::abs(A(r, k)) > std::abs(A(piv, k))) piv = r;
    if (std::abs(A(piv, k)) <= singular_tol * scale) throw ConvergenceError("lu_solve: matrix is numerically singular");
    if (piv != k) {
      for (std::size_t c = 0; c < N; ++c) std::swap(A(k, c), A(piv, c));
      std::swap(b[k], b[piv]);
    }
    for (std::size_t r = k + 1; r < N; ++r) {
      const double f = A(r, k) / A(k, k);
      if (f == 0.0) continue;
      for (std::size_t c = k; c < N; ++c) A(r, c) -= f * A(k, c);
      b[r] -= f * b[k];
    }
  }
  RVector x(N);
  for (std::size_t k = N; k-- > 0;) {
    double s = b[k];
    for (std::size_t c = k + 1; c < N; ++c) s -= A(k, c) * x[c];
    x[k] = s / A(k, k);
  }
  return x;
}

}  // namespace sepform
