#include "sepform/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "sepform/eigen.hpp"

namespace sepform {

namespace {

constexpr std::size_t kBasisRetries = 64;

CVector random_unit(std::size_t len, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  CVector x(len);
  for (auto& c : x) {
    const double re = nd(rng);
    c = Complex(re, nd(rng));
  }
  const double s = norm2(x);
  for (auto& c : x) c /= s;
  return x;
}

std::size_t real_rank(const std::vector<HermitianForm>& forms) {
  if (forms.empty()) return 0;
  std::vector<RVector> xs;
  for (const auto& f : forms) xs.push_back(real_coordinates(f));
  const std::size_t k = xs.size();
  RMatrix G(k, k);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) {
      double s = 0.0;
      for (std::size_t t = 0; t < xs[a].size(); ++t) s += xs[a][t] * xs[b][t];
      G(a, b) = s;
    }
  return symmetric_rank(G);
}

double vnorm(const RVector& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

void check_lambda(std::span<const double> lambda, std::size_t D) {
  if (lambda.size() != D) throw ShapeError("lambda length differs from the basis size");
  for (double l : lambda)
    if (!(l > 0.0) || !std::isfinite(l)) throw InputError("lambda must be componentwise positive");
}

}  // namespace

void validate(const SeparableBasis& b) {
  if (b.m == 0 || b.n == 0) throw InputError("basis: m and n must be positive");
  if (b.forms.empty() || b.forms.size() != b.generators.size())
    throw ShapeError("basis: forms and generators differ in number");
  std::vector<const CVector*> psis;
  for (std::size_t d = 0; d < b.size(); ++d) {
    if (b.forms[d].m() != b.m || b.forms[d].n() != b.n) throw ShapeError("basis: form shape mismatch");
    if (b.generators[d].empty()) throw InputError("basis: empty generator list");
    const HermitianForm g = separable_mixture(b.generators[d]);
    if (!g.same_shape(b.forms[d]) || (g - b.forms[d]).frobenius_norm() > 1e-10 * std::max(1.0, g.frobenius_norm()))
      throw InputError("basis: form does not match its generators");
    for (const auto& t : b.generators[d]) psis.push_back(&t.psi);
  }
  for (std::size_t p = 0; p < psis.size(); ++p)
    for (std::size_t q = p + 1; q < psis.size(); ++q) {
      double s = 0.0;
      for (std::size_t j = 0; j < b.n; ++j) s += std::norm((*psis[p])[j] - (*psis[q])[j]);
      if (std::sqrt(s) <= kDistinctPsiTol) throw InputError("basis: psi repeated across generators");
    }
  if (real_rank(b.forms) != b.size()) throw InputError("basis: forms are not linearly independent");
}

SeparableBasis random_basis(std::size_t m, std::size_t n, std::uint64_t seed, double psi_scale) {
  if (m == 0 || n == 0) throw InputError("random_basis: m and n must be positive");
  if (!(psi_scale > 0.0)) throw InputError("random_basis: psi_scale must be positive");
  const std::size_t D = m * n * m * n;
  std::mt19937_64 rng(seed);
  for (std::size_t attempt = 0; attempt < kBasisRetries; ++attempt) {
    SeparableBasis b{m, n, {}, {}};
    for (std::size_t d = 0; d < D; ++d) {
      CVector phi = random_unit(m, rng);
      CVector psi = random_unit(n, rng);
      for (auto& c : psi) c *= psi_scale;
      b.forms.push_back(product_form(phi, psi));
      b.generators.push_back({ProductTerm{1.0, std::move(phi), std::move(psi)}});
    }
    if (real_rank(b.forms) == D) return b;
  }
  throw ConvergenceError("random_basis: could not draw an independent basis");
}

WavepacketEnsemble upsilon_ensemble(std::span<const double> lambda, double beta, const SeparableBasis& basis) {
  check_lambda(lambda, basis.size());
  if (!(beta > 0.0)) throw InputError("wavepacket realization needs beta > 0");
  WavepacketEnsemble e;
  e.alpha = 1.0 / (beta * beta);
  for (std::size_t d = 0; d < basis.size(); ++d)
    for (const auto& t : basis.generators[d]) {
      const double amp = std::sqrt(lambda[d] * t.weight);
      CVector phi = t.phi;
      for (auto& c : phi) c *= amp;
      e.terms.push_back({std::move(phi), t.psi});
    }
  return e;
}

HermitianForm evaluate_upsilon(std::span<const double> lambda, double beta, const SeparableBasis& basis) {
  check_lambda(lambda, basis.size());
  if (!(beta >= 0.0)) throw InputError("beta must be nonnegative");
  if (beta == 0.0) {
    CMatrix M(basis.m * basis.n, basis.m * basis.n);
    for (std::size_t d = 0; d < basis.size(); ++d) M += basis.forms[d].matrix() * Complex(lambda[d], 0.0);
    return HermitianForm::hermitized(basis.m, basis.n, M);
  }
  return wavepacket_form(upsilon_ensemble(lambda, beta, basis));
}

SolverResult solve_interior(const HermitianForm& target, const SeparableBasis& basis, std::span<const double> lambda0,
                            double beta_target, const SolverOptions& opt) {
  if (target.m() != basis.m || target.n() != basis.n) throw ShapeError("target shape differs from the basis");
  const std::size_t D = basis.size();
  check_lambda(lambda0, D);
  if (!(beta_target > 0.0) || !std::isfinite(beta_target)) throw InputError("beta_target must be positive");
  if (opt.stages == 0) throw InputError("continuation needs at least one stage");

  const RVector goal = real_coordinates(target);
  auto residual = [&](std::span<const double> lam, double beta) {
    RVector F = real_coordinates(evaluate_upsilon(lam, beta, basis));
    for (std::size_t t = 0; t < F.size(); ++t) F[t] -= goal[t];
    return F;
  };
  const double scale = std::max(1.0, target.frobenius_norm());

  std::vector<double> schedule;
  for (std::size_t k = 0; k <= opt.stages; ++k)
    schedule.push_back(beta_target * static_cast<double>(k) / static_cast<double>(opt.stages));

  SolverState st;
  st.lambda.assign(lambda0.begin(), lambda0.end());
  {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k <= opt.stages; ++k) {
      const double r = vnorm(residual(st.lambda, schedule[k]));
      if (r < best) {
        best = r;
        st.start_stage = k;
      }
    }
  }

  for (std::size_t k = st.start_stage; k <= opt.stages; ++k) {
    const double beta = schedule[k];
    const bool last = k == opt.stages;
    const double stage_tol = last ? opt.tol : std::max(opt.tol, 1e-6 * scale);
    RVector F = residual(st.lambda, beta);
    double fn = vnorm(F);
    while (fn > stage_tol) {
      if (st.iterations >= opt.max_iter)
        throw SolverError(SolverError::Reason::MaxIterations,
                          "Newton iteration cap reached (residual " + std::to_string(fn) + ")");
      ++st.iterations;
      RMatrix J(D, D);
      for (std::size_t d = 0; d < D; ++d) {
        RVector lam = st.lambda;
        const double h = opt.fd_step * st.lambda[d];
        lam[d] += h;
        const RVector Fd = residual(lam, beta);
        for (std::size_t t = 0; t < D; ++t) J(t, d) = (Fd[t] - F[t]) / h;
      }
      RVector rhs(D);
      for (std::size_t t = 0; t < D; ++t) rhs[t] = -F[t];
      RVector step;
      try {
        step = lu_solve(J, rhs);
      } catch (const ConvergenceError&) {
        throw SolverError(SolverError::Reason::SingularJacobian, "Jacobian is numerically singular at beta = " +
                                                                     std::to_string(beta));
      }
      bool accepted = false, saw_exit = false;
      for (double s = 1.0; s >= 1.0 / 1024.0; s *= 0.5) {
        RVector lam(D);
        bool positive = true;
        for (std::size_t d = 0; d < D; ++d) {
          lam[d] = st.lambda[d] + s * step[d];
          positive = positive && lam[d] > 0.0;
        }
        if (!positive) {
          saw_exit = true;
          continue;
        }
        RVector Fn = residual(lam, beta);
        const double nn = vnorm(Fn);
        if (nn <= (1.0 - 1e-4 * s) * fn) {
          st.lambda = std::move(lam);
          F = std::move(Fn);
          fn = nn;
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        if (saw_exit)
          throw SolverError(SolverError::Reason::LeftPositiveOrthant,
                            "lambda left the positive orthant at beta = " + std::to_string(beta));
        throw SolverError(SolverError::Reason::Stagnated,
                          "line search failed at residual " + std::to_string(fn));
      }
    }
    st.beta = beta;
    st.residual_norm = fn;
  }
  return {st, upsilon_ensemble(st.lambda, beta_target, basis)};
}

ConvergenceStudy convergence_study(const WavepacketEnsemble& e, std::span<const double> alphas) {
  validate(e);
  if (alphas.empty()) throw InputError("convergence_study: no alphas");
  for (std::size_t t = 0; t < alphas.size(); ++t) {
    if (!(alphas[t] > 0.0)) throw InputError("convergence_study: alphas must be positive");
    if (t > 0 && !(alphas[t] > alphas[t - 1])) throw InputError("convergence_study: alphas must increase");
  }
  std::vector<ProductTerm> limit_terms;
  for (const auto& t : e.terms) limit_terms.push_back({1.0, t.phi, t.psi});
  const HermitianForm limit = separable_mixture(limit_terms);

  ConvergenceStudy out;
  for (double a : alphas) {
    WavepacketEnsemble ea = e;
    ea.alpha = a;
    out.rows.push_back({a, (wavepacket_form(ea) - limit).frobenius_norm()});
  }
  double d2 = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < e.terms.size(); ++p)
    for (std::size_t q = p + 1; q < e.terms.size(); ++q) {
      double s = 0.0;
      for (std::size_t j = 0; j < e.n(); ++j) s += std::norm(e.terms[p].psi[j] - e.terms[q].psi[j]);
      d2 = std::min(d2, s);
    }
  out.min_psi_distance = std::isfinite(d2) ? std::sqrt(d2) : 0.0;

  // Least squares for c1, c2; a single-column fit when the exponential is absent or degenerate.
  const std::size_t R = out.rows.size();
  std::vector<double> f1(R), f2(R), y(R);
  for (std::size_t r = 0; r < R; ++r) {
    f1[r] = 1.0 / out.rows[r].alpha;
    f2[r] = std::isfinite(d2) ? std::exp(-out.rows[r].alpha * d2) : 0.0;
    y[r] = out.rows[r].error;
  }
  double s11 = 0, s12 = 0, s22 = 0, b1 = 0, b2 = 0;
  for (std::size_t r = 0; r < R; ++r) {
    s11 += f1[r] * f1[r];
    s12 += f1[r] * f2[r];
    s22 += f2[r] * f2[r];
    b1 += f1[r] * y[r];
    b2 += f2[r] * y[r];
  }
  const double det = s11 * s22 - s12 * s12;
  if (R >= 2 && s22 > 0.0 && det > 1e-12 * s11 * s22) {
    out.c1 = (s22 * b1 - s12 * b2) / det;
    out.c2 = (s11 * b2 - s12 * b1) / det;
  } else {
    out.c1 = b1 / s11;
    out.c2 = 0.0;
  }
  if (R >= 2) {
    double mx = 0, my = 0;
    std::size_t cnt = 0;
    for (const auto& row : out.rows)
      if (row.error > 0.0) {
        mx += std::log(row.alpha);
        my += std::log(row.error);
        ++cnt;
      }
    if (cnt >= 2) {
      mx /= static_cast<double>(cnt);
      my /= static_cast<double>(cnt);
      double sxy = 0, sxx = 0;
      for (const auto& row : out.rows)
        if (row.error > 0.0) {
          sxy += (std::log(row.alpha) - mx) * (std::log(row.error) - my);
          sxx += (std::log(row.alpha) - mx) * (std::log(row.alpha) - mx);
        }
      out.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    }
  }
  return out;
}

}  // namespace sepform
