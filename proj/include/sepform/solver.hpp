#pragma once

#include <cstdint>
#include <vector>

#include "sepform/constructors.hpp"

namespace sepform {

/// D = (mn)^2 linearly independent separable forms together with the
/// product terms that generate each of them.
struct SeparableBasis {
  std::size_t m = 0;
  std::size_t n = 0;
  std::vector<HermitianForm> forms;
  std::vector<std::vector<ProductTerm>> generators;

  std::size_t size() const { return forms.size(); }
};

/// Throws InputError: shape mismatch, forms not matching their generators,
/// negative weights, psi repeated across generators, or real rank below D.
void validate(const SeparableBasis& basis);

/// D single product forms with unit phi and psi = psi_scale * (unit vector),
/// drawn from mt19937_64(seed); resampled until the real Gram rank is D.
/// Throws ConvergenceError after the retry cap.
SeparableBasis random_basis(std::size_t m, std::size_t n, std::uint64_t seed, double psi_scale = 1.0);

/// beta = 0: sum_d lambda_d rho_d. beta > 0: closed-form wavepacket form of
/// ensemble(lambda, beta, basis).
HermitianForm evaluate_upsilon(std::span<const double> lambda, double beta, const SeparableBasis& basis);

/// Merged ensemble with alpha = 1/beta^2 and amplitudes
/// sqrt(lambda_d * weight_{p,d}) phi^{p,d}.
WavepacketEnsemble upsilon_ensemble(std::span<const double> lambda, double beta, const SeparableBasis& basis);

struct SolverOptions {
  double tol = 1e-10;             // final Frobenius residual
  std::size_t max_iter = 50;      // Newton steps over the whole schedule
  std::size_t stages = 8;         // beta_k = beta_target * k / stages
  double fd_step = 1e-6;          // relative Jacobian step
};

struct SolverState {
  RVector lambda;
  double beta = 0.0;
  double residual_norm = 0.0;
  std::size_t iterations = 0;
  std::size_t start_stage = 0;
};

struct SolverResult {
  SolverState state;
  WavepacketEnsemble ensemble;
};

/// Continuation in beta with damped Newton on Upsilon(lambda, beta) = target.
/// The schedule starts at the stage where lambda0 fits the target best.
/// Throws InputError for bad shapes, nonpositive lambda0 or beta_target <= 0,
/// and SolverError on orthant exit, singular Jacobian, stagnation or when
/// more than max_iter steps are needed.
SolverResult solve_interior(const HermitianForm& target, const SeparableBasis& basis, std::span<const double> lambda0,
                            double beta_target, const SolverOptions& opt = {});

struct ConvergenceRow {
  double alpha = 0.0;
  double error = 0.0;
};

struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;
  double min_psi_distance = 0.0;  // d; 0 for a single packet
  double c1 = 0.0;                // error ~ c1 / alpha + c2 exp(-alpha d^2)
  double c2 = 0.0;
  double slope = 0.0;             // least-squares slope of log error vs log alpha
};

/// Frobenius distance between wavepacket_form at each alpha and the limit
/// sum_p product_form(phi^p, psi^p). The ensemble's own alpha is ignored.
ConvergenceStudy convergence_study(const WavepacketEnsemble& e, std::span<const double> alphas);

}  // namespace sepform
