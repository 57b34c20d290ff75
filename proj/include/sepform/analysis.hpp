#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sepform/eigen.hpp"
#include "sepform/hermitian_form.hpp"

namespace sepform {

inline constexpr double kPsdTol = 1e-9;

/// lambda_min(to_matrix(rho)) >= -tol * max(1, ||rho||_2).
bool is_psd(const HermitianForm& rho, double tol = kPsdTol);
std::size_t rank(const HermitianForm& rho, double tol = kDefaultRankTol);

/// (rho^{T_L})_{ijkl} = rho_{ilkj}.
HermitianForm partial_transpose(const HermitianForm& rho);
bool ppt_test(const HermitianForm& rho, double tol = kPsdTol);

/// A_ik = sum_j rho_ijkj (m x m). Throws InputError when rho is not PSD.
CMatrix partial_trace_L(const HermitianForm& rho, double psd_tol = kPsdTol);
/// B_jl = sum_i rho_ijil (n x n). Throws InputError when rho is not PSD.
CMatrix partial_trace_K(const HermitianForm& rho, double psd_tol = kPsdTol);

/// Orthonormal bases (columns) of ker_K rho in C^m and ker_L rho in C^n:
/// eigenvectors of the partial traces with eigenvalue <= tol * lambda_max.
CMatrix kernel_K(const HermitianForm& rho, double tol = kDefaultRankTol);
CMatrix kernel_L(const HermitianForm& rho, double tol = kDefaultRankTol);

/// N(w)_ik = sum_jl conj(w_j) rho_ijkl w_l and M(v)_jl = sum_ik conj(v_i) rho_ijkl v_k,
/// so that q(v (x) w) = v^dagger N(w) v = w^dagger M(v) w.
CMatrix contract_L(const HermitianForm& rho, std::span<const Complex> w);
CMatrix contract_K(const HermitianForm& rho, std::span<const Complex> v);

struct ProductMinOptions {
  std::size_t restarts = 32;
  std::size_t iters = 200;
  double tol = 1e-8;
  std::uint64_t seed = 0;
};

struct ProductMin {
  double value = 0.0;
  CVector v;
  CVector w;
  std::size_t restarts_used = 0;
};

/// Alternating minimal-eigenvector descent for min q(v (x) w) over unit v, w.
/// Random restart r uses mt19937_64(seed + r); n further starts use the
/// eigenvectors of partial_trace_K. Ties go to the earliest start.
/// If `v_basis` is given (orthonormal columns), v is restricted to its span.
ProductMin product_min(const HermitianForm& rho, const ProductMinOptions& opt = {},
                       const CMatrix* v_basis = nullptr);

/// Dense-grid reference for m, n <= 2: parametrizes one unit sphere by
/// (cos t, e^{i p} sin t) and minimizes over the other factor in closed form.
double product_min_grid(const HermitianForm& rho, std::size_t steps = 400);

struct IrcReport {
  bool satisfied = false;
  double min_product_value = 0.0;
  CVector witness_v;
  CVector witness_w;
  std::size_t ker_K_dim = 0;
  std::size_t ker_L_dim = 0;
  std::size_t restarts_used = 0;
  double threshold = 0.0;
};

/// satisfied iff min q(v (x) w) over unit v orthogonal to ker_K and unit w
/// exceeds tol * ||rho||_2. A nonzero ker_L fails directly.
/// Throws InputError for zero or non-PSD forms.
IrcReport irc_test(const HermitianForm& rho, const ProductMinOptions& opt = {});

struct SpanResult {
  std::size_t dimension = 0;
  std::size_t expected = 0;
  bool ok = false;
};

/// Real dimension spanned by the product forms built from phi in
/// {e_a + c e_b : a <= b, c in {1, i}} and psi likewise.
SpanResult spanning_test(std::size_t m, std::size_t n);

struct Commensurable {
  Complex w;
  std::vector<std::int64_t> a;
  std::vector<std::int64_t> b;
};

/// Searches psi_j = w (a_j + i b_j) with |a_j|, |b_j| <= max_int, anchored on
/// the largest coordinate; accepts max_j |psi_j - w(a_j + i b_j)| <= tol |psi|.
/// Bounded heuristic. Throws InputError for psi = 0 or max_int < 1.
std::optional<Commensurable> commensurable_check(std::span<const Complex> psi, std::int64_t max_int,
                                                 double tol = 1e-9);

struct AnalysisOptions {
  double psd_tol = kPsdTol;
  double rank_tol = kDefaultRankTol;
  ProductMinOptions irc;
};

struct AnalysisReport {
  bool psd = false;
  double min_eigenvalue = 0.0;
  std::size_t rank = 0;
  bool ppt = false;
  double pt_min_eigenvalue = 0.0;
  std::size_t ker_K_dim = 0;
  std::size_t ker_L_dim = 0;
  std::optional<IrcReport> irc;
  std::string classification;
};

/// Classification:
///   not PSD                                        -> "inconclusive"
///   PSD, PT not PSD                                -> "entangled(PPT-violated)"
///   PPT, IRC fails                                 -> "boundary-or-entangled"
///   PPT, IRC holds, and mn <= 6 or min(m, n) = 1   -> "separable-certified"
///   otherwise (including the zero form)            -> "inconclusive"
AnalysisReport analyze(const HermitianForm& rho, const AnalysisOptions& opt = {});

}  // namespace sepform
