#include "sepform/constructors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <utility>

namespace sepform {

namespace {

void require_nonempty_shapes(std::size_t m, std::size_t n) {
  if (m == 0 || n == 0) throw InputError("phi and psi must be nonempty");
}

double distance(std::span<const Complex> a, std::span<const Complex> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
  return std::sqrt(s);
}

// Shared sampler for fields of the form
//   Phi(z) = prod_a env[a][k_a] * sum_p amp[p] * prod_a table[p][a][k_a].
struct SeparableField {
  std::size_t m = 0;
  std::size_t axes = 0;
  std::size_t points = 0;
  std::vector<CVector> amp;                  // P x m
  std::vector<std::vector<CVector>> table;   // P x axes x points
  std::vector<RVector> env;                  // axes x points

  void fill(CVector& out) const {
    const std::size_t P = amp.size();
    std::vector<CVector> prefix(axes, CVector(P));
    RVector env_prefix(axes, 1.0);
    std::size_t node = 0;
    CVector coef(P);
    // prefix[a] holds the products over axes < a.
    std::fill(prefix[0].begin(), prefix[0].end(), Complex(1.0, 0.0));
    std::vector<std::size_t> idx(axes, 0);
    std::size_t level = 0;
    for (;;) {
      // Descend to the innermost axis, filling prefixes.
      for (; level + 1 < axes; ++level) {
        const std::size_t k = idx[level];
        for (std::size_t p = 0; p < P; ++p) prefix[level + 1][p] = prefix[level][p] * table[p][level][k];
        env_prefix[level + 1] = env_prefix[level] * env[level][k];
      }
      const std::size_t inner = axes - 1;
      for (std::size_t k = 0; k < points; ++k, ++node) {
        const double g = env_prefix[inner] * env[inner][k];
        Complex* dst = out.data() + node * m;
        for (std::size_t p = 0; p < P; ++p) {
          const Complex c = g * prefix[inner][p] * table[p][inner][k];
          for (std::size_t i = 0; i < m; ++i) dst[i] += c * amp[p][i];
        }
      }
      // Advance the odometer over the outer axes.
      if (axes == 1) return;
      std::size_t a = axes - 1;
      for (;;) {
        if (a == 0) return;
        --a;
        if (++idx[a] < points) break;
        idx[a] = 0;
      }
      level = a;
    }
  }
};

}  // namespace

CVector TorusMode::psi() const {
  CVector out(a.size());
  for (std::size_t s = 0; s < a.size(); ++s)
    out[s] = Complex(static_cast<double>(a[s]), static_cast<double>(b[s])) / static_cast<double>(c);
  return out;
}

std::int64_t TorusEnsemble::max_frequency() const {
  std::int64_t f = 0;
  for (const auto& t : terms) {
    for (auto v : t.a) f = std::max(f, v < 0 ? -v : v);
    for (auto v : t.b) f = std::max(f, v < 0 ? -v : v);
  }
  return f;
}

void validate(const WavepacketEnsemble& e) {
  if (!(e.alpha > 0.0) || !std::isfinite(e.alpha)) throw InputError("wavepacket ensemble: alpha must be positive");
  if (e.terms.empty()) throw InputError("wavepacket ensemble: no terms");
  const std::size_t m = e.m();
  const std::size_t n = e.n();
  require_nonempty_shapes(m, n);
  for (const auto& t : e.terms)
    if (t.phi.size() != m || t.psi.size() != n) throw ShapeError("wavepacket ensemble: ragged term shapes");
  for (std::size_t p = 0; p < e.terms.size(); ++p)
    for (std::size_t q = p + 1; q < e.terms.size(); ++q)
      if (distance(e.terms[p].psi, e.terms[q].psi) <= kDistinctPsiTol)
        throw InputError("wavepacket ensemble: psi vectors must be pairwise distinct");
}

void validate(const TorusEnsemble& e) {
  if (e.terms.empty()) throw InputError("torus ensemble: no terms");
  const std::size_t m = e.m();
  const std::size_t n = e.n();
  require_nonempty_shapes(m, n);
  std::set<std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>>> seen;
  for (const auto& t : e.terms) {
    if (t.phi.size() != m || t.a.size() != n || t.b.size() != n) throw ShapeError("torus ensemble: ragged term shapes");
    if (t.c < 1) throw InputError("torus ensemble: c must be a positive integer");
    if (!seen.emplace(t.a, t.b).second) throw InputError("torus ensemble: duplicate (a, b) pair");
  }
}

HermitianForm product_form(std::span<const Complex> phi, std::span<const Complex> psi) {
  require_nonempty_shapes(phi.size(), psi.size());
  const TensorArray sigma = TensorArray::outer(phi, psi);
  return hermitian_tensor_product(sigma, sigma);
}

HermitianForm separable_mixture(const std::vector<ProductTerm>& terms) {
  if (terms.empty()) throw InputError("separable_mixture: no terms");
  const std::size_t m = terms.front().phi.size();
  const std::size_t n = terms.front().psi.size();
  require_nonempty_shapes(m, n);
  CMatrix M(m * n, m * n);
  for (const auto& t : terms) {
    if (!(t.weight >= 0.0) || !std::isfinite(t.weight)) throw InputError("separable_mixture: negative weight");
    if (t.phi.size() != m || t.psi.size() != n) throw ShapeError("separable_mixture: ragged term shapes");
    const TensorArray sigma = TensorArray::outer(t.phi, t.psi);
    for (std::size_t r = 0; r < m * n; ++r)
      for (std::size_t c = 0; c < m * n; ++c)
        M(r, c) += t.weight * std::conj(sigma.values[r]) * sigma.values[c];
  }
  return HermitianForm::hermitized(m, n, M);
}

CMatrix packet_kernel(std::span<const Complex> v, std::span<const Complex> w, double alpha) {
  if (v.size() != w.size()) throw ShapeError("packet_kernel: length mismatch");
  if (!(alpha > 0.0)) throw InputError("packet_kernel: alpha must be positive");
  const std::size_t n = v.size();
  const double decay = std::exp(-alpha * std::pow(distance(v, w), 2));
  CMatrix K(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t l = 0; l < n; ++l) {
      Complex s = std::conj(v[j] + w[j]) * (v[l] + w[l]);
      if (j == l) s += 1.0 / alpha;
      K(j, l) = 0.25 * s * decay;
    }
  return K;
}

HermitianForm wavepacket_form(const WavepacketEnsemble& e) {
  validate(e);
  const std::size_t m = e.m();
  const std::size_t n = e.n();
  CMatrix M(m * n, m * n);
  for (const auto& tp : e.terms)
    for (const auto& tq : e.terms) {
      const CMatrix K = packet_kernel(tp.psi, tq.psi, e.alpha);
      for (std::size_t i = 0; i < m; ++i) {
        const Complex pi = std::conj(tp.phi[i]);
        for (std::size_t k = 0; k < m; ++k) {
          const Complex amp = pi * tq.phi[k];
          if (amp == Complex{}) continue;
          for (std::size_t j = 0; j < n; ++j)
            for (std::size_t l = 0; l < n; ++l) M(i * n + j, k * n + l) += amp * K(j, l);
        }
      }
    }
  return HermitianForm::hermitized(m, n, M);
}

HermitianForm torus_form(const TorusEnsemble& e) {
  validate(e);
  std::vector<ProductTerm> terms;
  terms.reserve(e.terms.size());
  for (const auto& t : e.terms) terms.push_back({1.0, t.phi, t.psi()});
  return separable_mixture(terms);
}

HermitianForm gradient_gaussian_form(std::span<const Complex> psi, double alpha) {
  const std::size_t n = psi.size();
  if (n == 0) throw InputError("gradient_gaussian_form: psi must be nonempty");
  if (!(alpha > 0.0)) throw InputError("gradient_gaussian_form: alpha must be positive");
  const double a2 = 1.0 / (alpha * alpha);
  const double a4 = a2 * a2;
  auto d = [](std::size_t x, std::size_t y) { return x == y ? 1.0 : 0.0; };
  CMatrix M(n * n, n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
          const Complex ci = std::conj(psi[i]);
          const Complex cj = std::conj(psi[j]);
          Complex v = ci * cj * psi[k] * psi[l];
          v += a2 * (ci * psi[l] * d(j, k) + cj * psi[k] * d(i, l) + ci * psi[k] * d(j, l) + cj * psi[l] * d(i, k));
          v += a4 * (d(i, k) * d(j, l) + d(j, k) * d(i, l));
          M(i * n + j, k * n + l) = v;
        }
  return HermitianForm::hermitized(n, n, M);
}

CVector wavepacket_field(const WavepacketEnsemble& e, std::span<const Complex> z) {
  validate(e);
  const std::size_t n = e.n();
  if (z.size() != n) throw ShapeError("wavepacket_field: point dimension mismatch");
  double zz = 0.0;
  for (const auto& zs : z) zz += std::norm(zs);
  const double norm = std::pow(std::numbers::pi * e.alpha, -0.5 * static_cast<double>(n));
  CVector out(e.m());
  for (const auto& t : e.terms) {
    // <z,w> - <w,z> with <z,w> = sum conj(z_j) w_j
    const Complex zw = inner(z, t.psi);
    const Complex f = norm * std::exp(zw - std::conj(zw) - zz / (2.0 * e.alpha));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += t.phi[i] * f;
  }
  return out;
}

CVector torus_field(const TorusEnsemble& e, std::span<const Complex> z) {
  validate(e);
  const std::size_t n = e.n();
  if (z.size() != n) throw ShapeError("torus_field: point dimension mismatch");
  const double norm = std::pow(2.0 * std::numbers::pi, -static_cast<double>(n));
  CVector out(e.m());
  for (const auto& t : e.terms) {
    double phase = 0.0;
    for (std::size_t s = 0; s < n; ++s)
      phase += z[s].real() * static_cast<double>(t.a[s]) + z[s].imag() * static_cast<double>(t.b[s]);
    const Complex chi = norm * std::exp(Complex(0.0, phase));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += 2.0 / static_cast<double>(t.c) * t.phi[i] * chi;
  }
  return out;
}

double min_box_half_width(double alpha) { return 4.0 * std::sqrt(alpha); }

GridField sample_wavepacket(const WavepacketEnsemble& e, const BoxDomain& box) {
  validate(e);
  if (box.n != e.n()) throw ShapeError("sample_wavepacket: domain dimension differs from ensemble");
  validate_domain(box, e.m());
  if (box.half_width < min_box_half_width(e.alpha) * (1.0 - 1e-12))
    throw InputError("sample_wavepacket: box half width below 4 sqrt(alpha)");
  const GridGeometry g = geometry(box);
  const std::size_t P = e.terms.size();

  SeparableField sf;
  sf.m = e.m();
  sf.axes = g.axes();
  sf.points = g.points;
  const double norm = std::pow(std::numbers::pi * e.alpha, -0.5 * static_cast<double>(g.n));
  sf.env.assign(sf.axes, RVector(g.points));
  for (std::size_t a = 0; a < sf.axes; ++a)
    for (std::size_t k = 0; k < g.points; ++k) {
      const double x = g.coordinate(k);
      sf.env[a][k] = std::exp(-x * x / (2.0 * e.alpha));
    }
  for (std::size_t k = 0; k < g.points; ++k) sf.env[0][k] *= norm;
  // e^{<z,w> - <w,z>} = prod_s e^{2i x_s Im w_s} e^{-2i y_s Re w_s}
  sf.amp.resize(P);
  sf.table.assign(P, std::vector<CVector>(sf.axes, CVector(g.points)));
  for (std::size_t p = 0; p < P; ++p) {
    sf.amp[p] = e.terms[p].phi;
    for (std::size_t s = 0; s < g.n; ++s)
      for (std::size_t k = 0; k < g.points; ++k) {
        const double c = g.coordinate(k);
        sf.table[p][2 * s][k] = std::exp(Complex(0.0, 2.0 * c * e.terms[p].psi[s].imag()));
        sf.table[p][2 * s + 1][k] = std::exp(Complex(0.0, -2.0 * c * e.terms[p].psi[s].real()));
      }
  }
  GridField f{box, e.m(), CVector(g.node_count() * e.m())};
  sf.fill(f.samples);
  return f;
}

GridField sample_torus(const TorusEnsemble& e, const TorusDomain& torus) {
  validate(e);
  if (torus.n != e.n()) throw ShapeError("sample_torus: domain dimension differs from ensemble");
  validate_domain(torus, e.m());
  if (static_cast<std::int64_t>(torus.points) < 2 * e.max_frequency() + 3)
    throw InputError("sample_torus: grid too coarse for the ensemble frequencies");
  const GridGeometry g = geometry(torus);
  const std::size_t P = e.terms.size();

  SeparableField sf;
  sf.m = e.m();
  sf.axes = g.axes();
  sf.points = g.points;
  sf.env.assign(sf.axes, RVector(g.points, 1.0));
  sf.amp.resize(P);
  sf.table.assign(P, std::vector<CVector>(sf.axes, CVector(g.points)));
  const double norm = std::pow(2.0 * std::numbers::pi, -static_cast<double>(g.n));
  for (std::size_t p = 0; p < P; ++p) {
    const auto& t = e.terms[p];
    sf.amp[p].resize(e.m());
    for (std::size_t i = 0; i < e.m(); ++i) sf.amp[p][i] = 2.0 * norm / static_cast<double>(t.c) * t.phi[i];
    for (std::size_t s = 0; s < g.n; ++s)
      for (std::size_t k = 0; k < g.points; ++k) {
        const double c = g.coordinate(k);
        sf.table[p][2 * s][k] = std::exp(Complex(0.0, c * static_cast<double>(t.a[s])));
        sf.table[p][2 * s + 1][k] = std::exp(Complex(0.0, c * static_cast<double>(t.b[s])));
      }
  }
  GridField f{torus, e.m(), CVector(g.node_count() * e.m())};
  sf.fill(f.samples);
  return f;
}

}  // namespace sepform
