#include "sepform/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <tuple>

namespace sepform {

namespace {

Spectrum spectrum(const CMatrix& X) { return eig_hermitian(hermitian_part(X)); }

bool psd_spectrum(const Spectrum& s, double tol) {
  return s.min() >= -tol * std::max(1.0, s.spectral_norm());
}

void require_psd(const HermitianForm& rho, double tol, const char* what) {
  if (!is_psd(rho, tol)) throw InputError(std::string(what) + ": form is not positive semi-definite");
}

// Columns of s.eigenvectors with eigenvalue <= tol * max(lambda_max, 0);
// `keep_null` selects the null part or its complement.
CMatrix split_basis(const Spectrum& s, double tol, bool keep_null) {
  const double cut = tol * std::max(s.max(), 0.0);
  std::vector<std::size_t> cols;
  for (std::size_t c = 0; c < s.eigenvalues.size(); ++c)
    if ((s.eigenvalues[c] <= cut) == keep_null) cols.push_back(c);
  CMatrix B(s.eigenvectors.rows(), cols.size());
  for (std::size_t t = 0; t < cols.size(); ++t)
    for (std::size_t r = 0; r < B.rows(); ++r) B(r, t) = s.eigenvectors(r, cols[t]);
  return B;
}

CVector column(const CMatrix& M, std::size_t c) { return M.column(c); }

double quad(const CMatrix& X, std::span<const Complex> x) {
  Complex s{};
  for (std::size_t a = 0; a < x.size(); ++a)
    for (std::size_t b = 0; b < x.size(); ++b) s += std::conj(x[a]) * X(a, b) * x[b];
  return s.real();
}

// Smallest eigenvalue of a Hermitian matrix of order 1 or 2.
double min_eig_small(const CMatrix& X) {
  if (X.rows() == 1) return X(0, 0).real();
  const double a = X(0, 0).real();
  const double d = X(1, 1).real();
  const double h = 0.5 * (a - d);
  return 0.5 * (a + d) - std::sqrt(h * h + std::norm(X(0, 1)));
}

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

}  // namespace

bool is_psd(const HermitianForm& rho, double tol) { return psd_spectrum(eig_hermitian(rho.matrix()), tol); }

std::size_t rank(const HermitianForm& rho, double tol) { return eig_hermitian(rho.matrix(), tol).rank; }

HermitianForm partial_transpose(const HermitianForm& rho) {
  const std::size_t m = rho.m(), n = rho.n();
  CMatrix T(m * n, m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < m; ++k)
        for (std::size_t l = 0; l < n; ++l) T(i * n + j, k * n + l) = rho(i, l, k, j);
  return HermitianForm::hermitized(m, n, T);
}

bool ppt_test(const HermitianForm& rho, double tol) { return is_psd(partial_transpose(rho), tol); }

CMatrix partial_trace_L(const HermitianForm& rho, double psd_tol) {
  require_psd(rho, psd_tol, "partial_trace_L");
  const std::size_t m = rho.m(), n = rho.n();
  CMatrix A(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < m; ++k)
      for (std::size_t j = 0; j < n; ++j) A(i, k) += rho(i, j, k, j);
  return A;
}

CMatrix partial_trace_K(const HermitianForm& rho, double psd_tol) {
  require_psd(rho, psd_tol, "partial_trace_K");
  const std::size_t m = rho.m(), n = rho.n();
  CMatrix B(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t l = 0; l < n; ++l)
      for (std::size_t i = 0; i < m; ++i) B(j, l) += rho(i, j, i, l);
  return B;
}

CMatrix kernel_K(const HermitianForm& rho, double tol) { return split_basis(spectrum(partial_trace_L(rho)), tol, true); }

CMatrix kernel_L(const HermitianForm& rho, double tol) { return split_basis(spectrum(partial_trace_K(rho)), tol, true); }

CMatrix contract_L(const HermitianForm& rho, std::span<const Complex> w) {
  const std::size_t m = rho.m(), n = rho.n();
  if (w.size() != n) throw ShapeError("contract_L: w has the wrong length");
  CMatrix N(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < m; ++k) {
      Complex s{};
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t l = 0; l < n; ++l) s += std::conj(w[j]) * rho(i, j, k, l) * w[l];
      N(i, k) = s;
    }
  return hermitian_part(N);
}

CMatrix contract_K(const HermitianForm& rho, std::span<const Complex> v) {
  const std::size_t m = rho.m(), n = rho.n();
  if (v.size() != m) throw ShapeError("contract_K: v has the wrong length");
  CMatrix M(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t l = 0; l < n; ++l) {
      Complex s{};
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t k = 0; k < m; ++k) s += std::conj(v[i]) * rho(i, j, k, l) * v[k];
      M(j, l) = s;
    }
  return hermitian_part(M);
}

ProductMin product_min(const HermitianForm& rho, const ProductMinOptions& opt, const CMatrix* v_basis) {
  const std::size_t m = rho.m(), n = rho.n();
  CMatrix Q = v_basis ? *v_basis : CMatrix::identity(m);
  if (Q.rows() != m || Q.cols() == 0) throw ShapeError("product_min: v basis must have m rows and at least one column");
  const CMatrix Qh = Q.adjoint();
  const double scale = std::max(1.0, rho.frobenius_norm());

  std::vector<CVector> starts;
  for (std::size_t r = 0; r < opt.restarts; ++r) {
    std::mt19937_64 rng(opt.seed + r);
    starts.push_back(random_unit(n, rng));
  }
  {
    CMatrix B(n, n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t l = 0; l < n; ++l)
        for (std::size_t i = 0; i < m; ++i) B(j, l) += rho(i, j, i, l);
    const Spectrum sb = spectrum(B);
    for (std::size_t c = 0; c < n; ++c) starts.push_back(column(sb.eigenvectors, c));
  }

  ProductMin best;
  best.value = std::numeric_limits<double>::infinity();
  for (const auto& w0 : starts) {
    CVector w = w0;
    CVector v;
    double value = std::numeric_limits<double>::infinity();
    for (std::size_t it = 0; it < std::max<std::size_t>(opt.iters, 1); ++it) {
      const Spectrum sn = spectrum(Qh * contract_L(rho, w) * Q);
      v = Q * column(sn.eigenvectors, 0);
      const Spectrum sm = spectrum(contract_K(rho, v));
      w = column(sm.eigenvectors, 0);
      const double next = sm.min();
      const bool done = value - next <= 1e-15 * scale;
      value = std::min(value, next);
      if (done) break;
    }
    value = quad(contract_K(rho, v), w);
    if (value < best.value) {
      best.value = value;
      best.v = v;
      best.w = w;
    }
  }
  best.restarts_used = starts.size();
  return best;
}

double product_min_grid(const HermitianForm& rho, std::size_t steps) {
  if (rho.m() > 2 || rho.n() > 2) throw InputError("product_min_grid supports m, n <= 2");
  if (steps < 2) throw InputError("product_min_grid needs at least 2 steps");
  auto sweep = [&](std::size_t dim, auto&& reduce) {
    double best = std::numeric_limits<double>::infinity();
    if (dim == 1) return reduce(CVector{Complex(1.0, 0.0)});
    for (std::size_t a = 0; a <= steps; ++a) {
      const double t = 0.5 * std::numbers::pi * static_cast<double>(a) / static_cast<double>(steps);
      for (std::size_t b = 0; b < 2 * steps; ++b) {
        const double p = std::numbers::pi * static_cast<double>(b) / static_cast<double>(steps);
        best = std::min(best, reduce(CVector{Complex(std::cos(t), 0.0), std::polar(std::sin(t), p)}));
      }
    }
    return best;
  };
  const double over_v = sweep(rho.m(), [&](const CVector& v) { return min_eig_small(contract_K(rho, v)); });
  const double over_w = sweep(rho.n(), [&](const CVector& w) { return min_eig_small(contract_L(rho, w)); });
  return std::min(over_v, over_w);
}

IrcReport irc_test(const HermitianForm& rho, const ProductMinOptions& opt) {
  if (rho.frobenius_norm() == 0.0) throw InputError("irc_test: zero form");
  const Spectrum s = eig_hermitian(rho.matrix());
  if (!psd_spectrum(s, kPsdTol)) throw InputError("irc_test: form is not positive semi-definite");

  const Spectrum sa = spectrum(partial_trace_L(rho));
  const Spectrum sb = spectrum(partial_trace_K(rho));
  const CMatrix kerK = split_basis(sa, kDefaultRankTol, true);
  const CMatrix kerL = split_basis(sb, kDefaultRankTol, true);

  IrcReport r;
  r.ker_K_dim = kerK.cols();
  r.ker_L_dim = kerL.cols();
  r.threshold = opt.tol * s.spectral_norm();
  if (r.ker_L_dim > 0) {
    r.witness_v = column(sa.eigenvectors, sa.eigenvalues.size() - 1);
    r.witness_w = column(kerL, 0);
    r.min_product_value = quad(contract_K(rho, r.witness_v), r.witness_w);
    r.satisfied = false;
    return r;
  }
  const CMatrix Q = split_basis(sa, kDefaultRankTol, false);
  const ProductMin pm = product_min(rho, opt, &Q);
  r.min_product_value = pm.value;
  r.witness_v = pm.v;
  r.witness_w = pm.w;
  r.restarts_used = pm.restarts_used;
  r.satisfied = pm.value > r.threshold;
  return r;
}

SpanResult spanning_test(std::size_t m, std::size_t n) {
  if (m == 0 || n == 0) throw InputError("spanning_test: m and n must be positive");
  auto family = [](std::size_t d) {
    std::vector<CVector> out;
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = a; b < d; ++b)
        for (const Complex c : {Complex(1.0, 0.0), Complex(0.0, 1.0)}) {
          CVector x(d);
          x[a] += 1.0;
          x[b] += c;
          out.push_back(std::move(x));
        }
    return out;
  };
  const std::size_t D = m * n * m * n;
  RMatrix G(D, D);
  for (const auto& phi : family(m))
    for (const auto& psi : family(n)) {
      const TensorArray s = TensorArray::outer(phi, psi);
      const RVector x = real_coordinates(hermitian_tensor_product(s, s));
      for (std::size_t a = 0; a < D; ++a)
        for (std::size_t b = 0; b < D; ++b) G(a, b) += x[a] * x[b];
    }
  SpanResult r;
  r.dimension = symmetric_rank(G);
  r.expected = D;
  r.ok = r.dimension == D;
  return r;
}

std::optional<Commensurable> commensurable_check(std::span<const Complex> psi, std::int64_t max_int, double tol) {
  if (psi.empty()) throw InputError("commensurable_check: empty psi");
  if (max_int < 1) throw InputError("commensurable_check: max_int must be at least 1");
  const double size = norm2(psi);
  if (size == 0.0) throw InputError("commensurable_check: psi is zero");

  std::size_t anchor = 0;
  for (std::size_t j = 1; j < psi.size(); ++j)
    if (std::abs(psi[j]) > std::abs(psi[anchor])) anchor = j;

  std::vector<std::tuple<std::int64_t, std::int64_t, std::int64_t>> gs;
  for (std::int64_t a = -max_int; a <= max_int; ++a)
    for (std::int64_t b = -max_int; b <= max_int; ++b)
      if (a != 0 || b != 0) gs.emplace_back(a * a + b * b, -a, -b);
  std::sort(gs.begin(), gs.end());

  const auto k = static_cast<double>(max_int);
  for (const auto& [g2, na, nb] : gs) {
    const Complex g(static_cast<double>(-na), static_cast<double>(-nb));
    const Complex w = psi[anchor] / g;
    Commensurable c{w, std::vector<std::int64_t>(psi.size()), std::vector<std::int64_t>(psi.size())};
    bool ok = true;
    for (std::size_t j = 0; j < psi.size() && ok; ++j) {
      const Complex r = psi[j] / w;
      const double ra = std::round(r.real());
      const double rb = std::round(r.imag());
      if (std::abs(ra) > k || std::abs(rb) > k) {
        ok = false;
        break;
      }
      c.a[j] = static_cast<std::int64_t>(ra);
      c.b[j] = static_cast<std::int64_t>(rb);
      ok = std::abs(psi[j] - w * Complex(ra, rb)) <= tol * size;
    }
    if (ok) return c;
  }
  return std::nullopt;
}

AnalysisReport analyze(const HermitianForm& rho, const AnalysisOptions& opt) {
  AnalysisReport r;
  const Spectrum s = eig_hermitian(rho.matrix(), opt.rank_tol);
  r.min_eigenvalue = s.min();
  r.rank = s.rank;
  r.psd = psd_spectrum(s, opt.psd_tol);
  const Spectrum pt = eig_hermitian(partial_transpose(rho).matrix(), opt.rank_tol);
  r.pt_min_eigenvalue = pt.min();
  r.ppt = psd_spectrum(pt, opt.psd_tol);

  if (!r.psd) {
    r.classification = "inconclusive";
    return r;
  }
  r.ker_K_dim = kernel_K(rho, opt.rank_tol).cols();
  r.ker_L_dim = kernel_L(rho, opt.rank_tol).cols();
  if (!r.ppt) {
    r.classification = "entangled(PPT-violated)";
    return r;
  }
  if (rho.frobenius_norm() == 0.0) {
    r.classification = "inconclusive";
    return r;
  }
  r.irc = irc_test(rho, opt.irc);
  const std::size_t m = rho.m(), n = rho.n();
  if (!r.irc->satisfied)
    r.classification = "boundary-or-entangled";
  else if (m * n <= 6 || m == 1 || n == 1)
    r.classification = "separable-certified";
  else
    r.classification = "inconclusive";
  return r;
}

}  // namespace sepform
