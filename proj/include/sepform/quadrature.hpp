#pragma once

#include <limits>

#include "sepform/grid.hpp"
#include "sepform/hermitian_form.hpp"

namespace sepform {

struct QuadratureOptions {
  /// Worker threads; 0 picks the hardware concurrency. Results do not depend on it.
  std::size_t threads = 0;
  /// Box fields only: oracle_form throws ToleranceError when
  /// max |Phi| over boundary nodes exceeds boundary_tol * max |Phi|.
  double boundary_tol = 1e-3;
};

/// Default per-axis resolution for box integration: 129 (n = 1), 65 (n = 2).
std::size_t default_box_points(std::size_t n);

/// Conjugate Wirtinger derivative dbar_{z_j} Phi_i = (d_x + i d_y) Phi_i / 2.
/// Box: fourth-order central differences, one-sided five-point stencils at the
/// two outermost layers. Torus: exact spectral derivative; throws InputError
/// ("grid too coarse") when the spectrum reaches the outer ring of modes.
DerivativeField conjugate_derivative(const GridField& f, const QuadratureOptions& opt = {});

/// rho_ijkl = sum_nodes conj(A_ij) A_kl * cell volume, A = dbar Phi.
HermitianForm integrate_form(const DerivativeField& d, const QuadratureOptions& opt = {});

/// integrate_form(conjugate_derivative(f)); box fields are streamed without
/// materialising the derivative and give bitwise the same result.
HermitianForm oracle_form(const GridField& f, const QuadratureOptions& opt = {});

/// max |Phi| over boundary nodes divided by max |Phi| (0 for the torus or a zero field).
double boundary_ratio(const GridField& f);

}  // namespace sepform
