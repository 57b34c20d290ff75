#pragma once

#include <cstdint>
#include <vector>

#include "sepform/grid.hpp"
#include "sepform/hermitian_form.hpp"

namespace sepform {

/// One weighted product term lambda * (phi (x) psi)-bar (.) (phi (x) psi).
struct ProductTerm {
  double weight = 1.0;
  CVector phi;  // C^m
  CVector psi;  // coefficients of a functional on C^n
};

struct Wavepacket {
  CVector phi;  // amplitude in C^m
  CVector psi;  // modulation w in f_w
};

/// Phi(z) = sum_p phi^p f_{psi^p}(z), f_w(z) = e^{<z,w> - <w,z>} (pi alpha)^{-n/2} e^{-|z|^2 / 2 alpha}.
struct WavepacketEnsemble {
  double alpha = 1.0;
  std::vector<Wavepacket> terms;

  std::size_t m() const { return terms.empty() ? 0 : terms.front().phi.size(); }
  std::size_t n() const { return terms.empty() ? 0 : terms.front().psi.size(); }
};

struct TorusMode {
  CVector phi;
  std::vector<std::int64_t> a;
  std::vector<std::int64_t> b;
  std::int64_t c = 1;

  /// psi = (a + i b) / c
  CVector psi() const;
};

/// Phi(z) = 2 sum_p c_p^{-1} phi^p chi_{a^p,b^p}(z),
/// chi_{a,b}(z) = (2 pi)^{-n} e^{i(<x,a> + <y,b>)}.
struct TorusEnsemble {
  std::vector<TorusMode> terms;

  std::size_t m() const { return terms.empty() ? 0 : terms.front().phi.size(); }
  std::size_t n() const { return terms.empty() ? 0 : terms.front().a.size(); }
  std::int64_t max_frequency() const;
};

inline constexpr double kDistinctPsiTol = 1e-12;

/// Throws InputError: alpha <= 0, empty ensemble, ragged shapes, or two psi
/// closer than 1e-12 (duplicates are rejected, never merged).
void validate(const WavepacketEnsemble& e);
/// Throws InputError: empty, ragged, c < 1, duplicate (a, b) pairs.
void validate(const TorusEnsemble& e);

HermitianForm product_form(std::span<const Complex> phi, std::span<const Complex> psi);

/// sum_p lambda_p product_form(phi^p, psi^p); throws InputError on negative
/// weights, empty input or ragged shapes.
HermitianForm separable_mixture(const std::vector<ProductTerm>& terms);

/// Cross-packet integral
///   (2i)^{-n} int conj(dbar_j f_v) dbar_l f_w dzbar^dz
///     = (1/4) (conj(v_j + w_j)(v_l + w_l) + delta_jl / alpha) exp(-alpha |v - w|^2),
/// returned as an n x n matrix indexed (j, l). For v = w this is
/// conj(w_j) w_l + delta_jl / (4 alpha).
CMatrix packet_kernel(std::span<const Complex> v, std::span<const Complex> w, double alpha);

/// rho_ijkl = sum_{p,q} conj(phi^p_i) phi^q_k K_jl(psi^p, psi^q), K = packet_kernel.
HermitianForm wavepacket_form(const WavepacketEnsemble& e);

/// Exact integral form of the torus field: separable mixture with unit weights
/// and psi^p = (a^p + i b^p) / c_p.
HermitianForm torus_form(const TorusEnsemble& e);

/// Form of the conjugate gradient of a Gaussian on C^n (m = n):
///   conj(psi_i psi_j) psi_k psi_l
///   + (conj(psi_i) psi_l d_jk + conj(psi_j) psi_k d_il + conj(psi_i) psi_k d_jl + conj(psi_j) psi_l d_ik) / alpha^2
///   + (d_ik d_jl + d_jk d_il) / alpha^4.
HermitianForm gradient_gaussian_form(std::span<const Complex> psi, double alpha);

/// Direct evaluation of the ensemble fields at one point.
CVector wavepacket_field(const WavepacketEnsemble& e, std::span<const Complex> z);
CVector torus_field(const TorusEnsemble& e, std::span<const Complex> z);

/// Smallest admissible box half width: 4 sqrt(alpha) (|f_w| does not depend on w).
double min_box_half_width(double alpha);

/// Grid samples of the ensemble fields; separable per-axis factor tables,
/// exact up to rounding. Box: half_width >= min_box_half_width(alpha).
/// Torus: points >= 2 * max_frequency + 3.
GridField sample_wavepacket(const WavepacketEnsemble& e, const BoxDomain& box);
GridField sample_torus(const TorusEnsemble& e, const TorusDomain& torus);

}  // namespace sepform
