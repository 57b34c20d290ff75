#include <doctest.h>

#include <cmath>

#include "sepform/analysis.hpp"
#include "sepform/solver.hpp"
#include "support.hpp"

using namespace sepform;

namespace {

RVector positive_weights(std::size_t D, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.5, 1.5);
  RVector l(D);
  for (auto& x : l) x = u(rng);
  return l;
}

}  // namespace

TEST_CASE("random bases") {
  const SeparableBasis one = random_basis(1, 1, 3);
  CHECK(one.size() == 1);
  const SeparableBasis b = random_basis(2, 2, 7);
  CHECK(b.size() == 16);
  CHECK_NOTHROW(validate(b));

  // Small psi perturbations keep the basis independent.
  SeparableBasis p = b;
  std::mt19937_64 rng(1);
  for (std::size_t d = 0; d < p.size(); ++d) {
    auto& t = p.generators[d][0];
    for (auto& c : t.psi) c += 1e-6 * test::random_vector(1, rng)[0];
    p.forms[d] = separable_mixture(p.generators[d]);
  }
  CHECK_NOTHROW(validate(p));

  SeparableBasis dup = b;
  dup.generators[1][0].psi = dup.generators[0][0].psi;
  dup.forms[1] = separable_mixture(dup.generators[1]);
  CHECK_THROWS_AS(validate(dup), InputError);
  CHECK_THROWS_AS(random_basis(0, 2, 1), InputError);
}

TEST_CASE("upsilon") {
  const SeparableBasis b = random_basis(2, 2, 11);
  std::mt19937_64 rng(2);
  const RVector lam = positive_weights(b.size(), rng);
  CMatrix sum(4, 4);
  for (std::size_t d = 0; d < b.size(); ++d) sum += b.forms[d].matrix() * Complex(lam[d], 0);
  CHECK((evaluate_upsilon(lam, 0.0, b).matrix() - sum).max_abs() < 1e-14);

  double prev = 1e300;
  for (double beta : {0.4, 0.2, 0.1, 0.05, 0.025}) {
    const double gap = (evaluate_upsilon(lam, beta, b) - evaluate_upsilon(lam, 0.0, b)).frobenius_norm();
    CHECK(gap < prev);
    prev = gap;
  }
  CHECK(prev < 1e-2);

  // One basis form reduces to the single-packet closed form.
  const SeparableBasis s = random_basis(1, 2, 4);
  SeparableBasis single{1, 2, {s.forms[0]}, {s.generators[0]}};
  const auto& t = single.generators[0][0];
  const RVector one{1.0};
  CHECK((evaluate_upsilon(one, 0.5, single) - wavepacket_form({4.0, {{t.phi, t.psi}}})).frobenius_norm() < 1e-15);

  CHECK_THROWS_AS(evaluate_upsilon(RVector(16, -1.0), 0.1, b), InputError);
  CHECK_THROWS_AS(evaluate_upsilon(RVector(3, 1.0), 0.1, b), ShapeError);
}

TEST_CASE("scalar solve") {
  const SeparableBasis b = random_basis(1, 1, 5);
  const auto target = evaluate_upsilon(RVector{2.0}, 0.0, b);
  const SolverResult r = solve_interior(target, b, RVector{1.5}, 0.3);
  CHECK(r.state.residual_norm <= 1e-10);
  CHECK(r.state.lambda[0] > 0.0);
  CHECK((wavepacket_form(r.ensemble) - target).frobenius_norm() <= 1e-10);
}

TEST_CASE("round trip recovers lambda") {
  const SeparableBasis b = random_basis(2, 2, 7, 0.6);
  std::mt19937_64 rng(3);
  const RVector star = positive_weights(b.size(), rng);
  RVector start = star;
  std::uniform_real_distribution<double> jitter(-0.1, 0.1);
  for (auto& x : start) x *= 1.0 + jitter(rng);
  const auto target = evaluate_upsilon(star, 0.2, b);
  const SolverResult r = solve_interior(target, b, start, 0.2);
  double err = 0.0;
  for (std::size_t d = 0; d < star.size(); ++d) err = std::max(err, std::abs(r.state.lambda[d] - star[d]));
  CHECK(err <= 1e-8);
  CHECK(r.state.residual_norm <= 1e-10);
  CHECK(r.state.iterations <= 50);
}

TEST_CASE("mixture target at beta 0.2") {
  const SeparableBasis b = random_basis(2, 2, 8, 1.0);
  std::mt19937_64 rng(11);
  const RVector star = positive_weights(b.size(), rng);
  const auto target = evaluate_upsilon(star, 0.0, b);
  const SolverResult r = solve_interior(target, b, star, 0.2);
  CHECK(r.state.residual_norm <= 1e-8);
  const auto form = wavepacket_form(r.ensemble);
  CHECK(hermiticity_defect(form.matrix()) <= 1e-12);
  CHECK(is_psd(form));
  CHECK(ppt_test(form));
  CHECK(r.ensemble.alpha == doctest::Approx(25.0));
}

TEST_CASE("solver failures are reported") {
  const SeparableBasis b = random_basis(2, 2, 7, 0.3);
  std::mt19937_64 rng(11);
  const RVector star = positive_weights(b.size(), rng);
  const auto target = evaluate_upsilon(star, 0.0, b);
  CHECK_THROWS_AS(solve_interior(target, b, star, 0.2), SolverError);

  SolverOptions tight;
  tight.max_iter = 1;
  const SeparableBasis wide = random_basis(2, 2, 8, 1.0);
  CHECK_THROWS_AS(solve_interior(evaluate_upsilon(star, 0.0, wide), wide, star, 0.2, tight), SolverError);
  CHECK_THROWS_AS(solve_interior(target, b, star, 0.0), InputError);
  CHECK_THROWS_AS(solve_interior(HermitianForm(1, 2), b, star, 0.2), ShapeError);
}

TEST_CASE("convergence study") {
  const CVector phi{1.0, Complex(0, 2)};
  const WavepacketEnsemble one{1.0, {{phi, {0.3, -0.4}}}};
  const RVector alphas{1, 2, 4, 8, 16};
  const ConvergenceStudy s = convergence_study(one, alphas);
  for (const auto& row : s.rows) CHECK(row.error == doctest::Approx(5.0 * std::sqrt(2.0) / (4 * row.alpha)).epsilon(1e-12));
  CHECK(s.slope == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(s.c1 == doctest::Approx(5.0 * std::sqrt(2.0) / 4).epsilon(1e-9));

  const WavepacketEnsemble two{1.0, {{{1.0, 0.0}, {0.0, 0.0}}, {{0.0, 1.0}, {1.0, 0.0}}}};
  const RVector big{1e4};
  CHECK(convergence_study(two, big).rows[0].error <= 1e-3);
  CHECK(convergence_study(two, alphas).min_psi_distance == doctest::Approx(1.0));

  CHECK_THROWS_AS(convergence_study(one, RVector{2, 1}), InputError);
  CHECK_THROWS_AS(convergence_study(one, RVector{}), InputError);
}

TEST_CASE("off-diagonal cross terms decay exactly") {
  // Cross part C(alpha) = form - single-packet forms scales as exp(-alpha d^2) with fixed prefactor structure.
  const WavepacketEnsemble e{4.0, {{{1.0}, {2.0, 1.0}}, {{1.0}, {3.0, 1.0}}}};
  auto cross = [&](double alpha) {
    WavepacketEnsemble a = e;
    a.alpha = alpha;
    HermitianForm c = wavepacket_form(a);
    for (const auto& t : a.terms) c = c - wavepacket_form({alpha, {t}});
    return c;
  };
  const auto c4 = cross(4.0), c8 = cross(8.0);
  // Off-diagonal (j != l) slots carry no 1/alpha term, so the ratio is exactly e^{-4}.
  CHECK(std::abs(c8(0, 0, 0, 1) / c4(0, 0, 0, 1) - std::exp(-4.0)) < 1e-13);
}
