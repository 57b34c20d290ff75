#include "sepform/quadrature.hpp"

#include <fftw3.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

#include "sepform/kernels.hpp"

namespace sepform {

namespace {

struct Stencil {
  int offsets[5];
  double coef[5];
  int size;
};

// Fourth-order first-derivative weights (times 12h).
Stencil stencil_at(std::size_t k, std::size_t N) {
  if (k == 0) return {{0, 1, 2, 3, 4}, {-25, 48, -36, 16, -3}, 5};
  if (k == 1) return {{-1, 0, 1, 2, 3}, {-3, -10, 18, -6, 1}, 5};
  if (k == N - 2) return {{-3, -2, -1, 0, 1}, {-1, 6, -18, 10, 3}, 5};
  if (k == N - 1) return {{-4, -3, -2, -1, 0}, {3, -16, 36, -48, 25}, 5};
  return {{-2, -1, 1, 2, 0}, {1, -8, 8, -1, 0}, 4};
}

std::size_t pow_size(std::size_t b, std::size_t e) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < e; ++i) r *= b;
  return r;
}

std::size_t resolve_threads(std::size_t requested, std::size_t work) {
  std::size_t t = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(t, work));
}

// Runs fn(block, worker) for block in [0, nblocks) on a small pool.
template <class Fn>
void for_blocks(std::size_t nblocks, std::size_t threads, Fn&& fn) {
  const std::size_t workers = resolve_threads(threads, nblocks);
  if (workers == 1) {
    for (std::size_t b = 0; b < nblocks; ++b) fn(b, std::size_t{0});
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t b; (b = next.fetch_add(1)) < nblocks;) fn(b, w);
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (!err) err = std::current_exception();
        next.store(nblocks);
      }
    });
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

HermitianForm reduce_blocks(const std::vector<CVector>& acc, std::size_t m, std::size_t n, double volume) {
  const std::size_t d = m * n;
  CMatrix M(d, d);
  for (const auto& a : acc)
    for (std::size_t e = 0; e < d * d; ++e) M.data()[e] += a[e];
  M *= Complex(volume, 0.0);
  return HermitianForm::hermitized(m, n, M);
}

// Builds the N x (m n) line A(z) = dbar Phi(z) along one innermost-axis pencil
// of a box field.
class BoxPencil {
 public:
  BoxPencil(const GridField& f, const GridGeometry& g)
      : f_(f), g_(g), N_(g.points), A_(g.axes()), m_(f.m), n_(g.n),
        deriv_(A_, CVector(N_ * f.m)), scale_(1.0 / (12.0 * g.step)) {
    strides_.resize(A_);
    for (std::size_t a = 0; a < A_; ++a) strides_[a] = pow_size(N_, A_ - 1 - a);
  }

  void compute(std::size_t pencil, Complex* line) {
    const std::size_t node0 = pencil * N_;
    const auto& table = kernels::active();
    const std::size_t len = 2 * N_ * m_;
    const double* base = reinterpret_cast<const double*>(f_.samples.data());
    for (std::size_t a = 0; a + 1 < A_; ++a) {
      const std::size_t k = (node0 / strides_[a]) % N_;
      const Stencil s = stencil_at(k, N_);
      const double* src[5];
      double coef[5];
      for (int t = 0; t < s.size; ++t) {
        const auto node = static_cast<std::ptrdiff_t>(node0) + s.offsets[t] * static_cast<std::ptrdiff_t>(strides_[a]);
        src[t] = base + 2 * static_cast<std::size_t>(node) * m_;
        coef[t] = s.coef[t] * scale_;
      }
      table.lincomb(reinterpret_cast<double*>(deriv_[a].data()), src, coef, static_cast<std::size_t>(s.size), len);
    }
    // Innermost axis: stencil along the pencil itself.
    {
      const Complex* p = f_.samples.data() + node0 * m_;
      CVector& out = deriv_[A_ - 1];
      for (std::size_t k = 0; k < N_; ++k) {
        const Stencil s = stencil_at(k, N_);
        for (std::size_t i = 0; i < m_; ++i) {
          double re = 0.0, im = 0.0;
          for (int t = 0; t < s.size; ++t) {
            const Complex v = p[(k + s.offsets[t]) * m_ + i];
            re += s.coef[t] * scale_ * v.real();
            im += s.coef[t] * scale_ * v.imag();
          }
          out[k * m_ + i] = Complex(re, im);
        }
      }
    }
    const std::size_t d = m_ * n_;
    for (std::size_t k = 0; k < N_; ++k)
      for (std::size_t i = 0; i < m_; ++i)
        for (std::size_t j = 0; j < n_; ++j) {
          const Complex dx = deriv_[2 * j][k * m_ + i];
          const Complex dy = deriv_[2 * j + 1][k * m_ + i];
          line[k * d + i * n_ + j] = Complex(0.5 * (dx.real() - dy.imag()), 0.5 * (dx.imag() + dy.real()));
        }
  }

 private:
  const GridField& f_;
  const GridGeometry& g_;
  std::size_t N_, A_, m_, n_;
  std::vector<CVector> deriv_;
  std::vector<std::size_t> strides_;
  double scale_;
};

void check_field(const GridField& f) {
  validate_domain(f.domain, f.m);
  if (f.samples.size() != f.geometry().node_count() * f.m) throw ShapeError("field sample count does not match domain");
  for (const auto& v : f.samples)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw InputError("field has non-finite samples");
}

DerivativeField box_derivative(const GridField& f, const QuadratureOptions& opt) {
  const GridGeometry g = f.geometry();
  const std::size_t N = g.points;
  const std::size_t d = f.m * g.n;
  DerivativeField out{f.domain, f.m, g.n, CVector(g.node_count() * d)};
  const std::size_t per_block = pow_size(N, g.axes() - 2);
  const std::size_t workers = resolve_threads(opt.threads, N);
  std::vector<std::unique_ptr<BoxPencil>> pencils;
  for (std::size_t w = 0; w < workers; ++w) pencils.push_back(std::make_unique<BoxPencil>(f, g));
  for_blocks(N, workers, [&](std::size_t b, std::size_t w) {
    for (std::size_t o = b * per_block; o < (b + 1) * per_block; ++o)
      pencils[w]->compute(o, out.samples.data() + o * N * d);
  });
  return out;
}

struct FftwPlan {
  fftw_plan p = nullptr;
  ~FftwPlan() {
    if (p) fftw_destroy_plan(p);
  }
};

std::mutex g_fftw_mu;

DerivativeField torus_derivative(const GridField& f) {
  const GridGeometry g = f.geometry();
  const std::size_t N = g.points;
  const std::size_t A = g.axes();
  const std::size_t m = f.m;
  const std::size_t n = g.n;
  const std::size_t nodes = g.node_count();

  auto* spec = reinterpret_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * nodes * m));
  auto* work = reinterpret_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * nodes * m));
  if (!spec || !work) {
    fftw_free(spec);
    fftw_free(work);
    throw Error("torus derivative: allocation failed");
  }
  std::unique_ptr<fftw_complex, decltype(&fftw_free)> spec_guard(spec, fftw_free), work_guard(work, fftw_free);

  std::vector<int> dims(A, static_cast<int>(N));
  FftwPlan fwd, bwd;
  {
    std::lock_guard lock(g_fftw_mu);
    fwd.p = fftw_plan_many_dft(static_cast<int>(A), dims.data(), static_cast<int>(m), spec, nullptr,
                               static_cast<int>(m), 1, spec, nullptr, static_cast<int>(m), 1, FFTW_FORWARD,
                               FFTW_ESTIMATE);
    bwd.p = fftw_plan_many_dft(static_cast<int>(A), dims.data(), static_cast<int>(m), work, nullptr,
                               static_cast<int>(m), 1, work, nullptr, static_cast<int>(m), 1, FFTW_BACKWARD,
                               FFTW_ESTIMATE);
  }
  if (!fwd.p || !bwd.p) throw Error("torus derivative: FFT planning failed");

  std::copy(f.samples.begin(), f.samples.end(), reinterpret_cast<Complex*>(spec));
  fftw_execute(fwd.p);
  const Complex* S = reinterpret_cast<const Complex*>(spec);

  // Signed frequency of every node along every axis.
  auto freq = [N](std::size_t k) {
    return k <= N / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(N);
  };
  const double limit = static_cast<double>((N - 3) / 2);
  std::vector<std::size_t> idx(A, 0);
  double total = 0.0, ring = 0.0;
  for (std::size_t node = 0; node < nodes; ++node) {
    bool outer = false;
    for (std::size_t a = 0; a < A; ++a) outer = outer || std::abs(freq(idx[a])) > limit;
    for (std::size_t i = 0; i < m; ++i) {
      const double e = std::norm(S[node * m + i]);
      total += e;
      if (outer) ring += e;
    }
    for (std::size_t a = A; a-- > 0;) {
      if (++idx[a] < N) break;
      idx[a] = 0;
    }
  }
  if (ring > 1e-20 * total) throw InputError("grid too coarse: field spectrum reaches the outer ring of modes");

  DerivativeField out{f.domain, m, n, CVector(nodes * m * n)};
  Complex* W = reinterpret_cast<Complex*>(work);
  const double inv = 1.0 / static_cast<double>(nodes);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(idx.begin(), idx.end(), 0);
    for (std::size_t node = 0; node < nodes; ++node) {
      const double al = freq(idx[2 * j]);
      const double be = freq(idx[2 * j + 1]);
      // dbar chi = i (alpha + i beta) chi / 2
      const Complex mult = Complex(-0.5 * be, 0.5 * al) * inv;
      for (std::size_t i = 0; i < m; ++i) W[node * m + i] = S[node * m + i] * mult;
      for (std::size_t a = A; a-- > 0;) {
        if (++idx[a] < N) break;
        idx[a] = 0;
      }
    }
    fftw_execute(bwd.p);
    for (std::size_t node = 0; node < nodes; ++node)
      for (std::size_t i = 0; i < m; ++i) out.samples[node * m * n + i * n + j] = W[node * m + i];
  }
  return out;
}

}  // namespace

std::size_t default_box_points(std::size_t n) { return n <= 1 ? 129 : 65; }

double boundary_ratio(const GridField& f) {
  const GridGeometry g = f.geometry();
  if (g.periodic) return 0.0;
  const std::size_t A = g.axes();
  const std::size_t N = g.points;
  std::vector<std::size_t> idx(A, 0);
  double all = 0.0, edge = 0.0;
  for (std::size_t node = 0; node < g.node_count(); ++node) {
    bool boundary = false;
    for (std::size_t a = 0; a < A; ++a) boundary = boundary || idx[a] == 0 || idx[a] == N - 1;
    for (std::size_t i = 0; i < f.m; ++i) {
      const double v = std::abs(f.samples[node * f.m + i]);
      all = std::max(all, v);
      if (boundary) edge = std::max(edge, v);
    }
    for (std::size_t a = A; a-- > 0;) {
      if (++idx[a] < N) break;
      idx[a] = 0;
    }
  }
  return all > 0.0 ? edge / all : 0.0;
}

DerivativeField conjugate_derivative(const GridField& f, const QuadratureOptions& opt) {
  check_field(f);
  if (f.geometry().periodic) return torus_derivative(f);
  return box_derivative(f, opt);
}

HermitianForm integrate_form(const DerivativeField& d, const QuadratureOptions& opt) {
  const GridGeometry g = d.geometry();
  validate_domain(d.domain, d.m);
  if (d.n != g.n) throw ShapeError("derivative field dimension does not match its domain");
  const std::size_t dim = d.m * d.n;
  if (d.samples.size() != g.node_count() * dim) throw ShapeError("derivative sample count does not match domain");
  const std::size_t N = g.points;
  const std::size_t per_block = pow_size(N, g.axes() - 1);
  std::vector<CVector> acc(N, CVector(dim * dim));
  const auto& table = kernels::active();
  for_blocks(N, opt.threads, [&](std::size_t b, std::size_t) {
    for (std::size_t o = 0; o < per_block / N; ++o) {
      const std::size_t node0 = b * per_block + o * N;
      table.gram_accumulate(d.samples.data() + node0 * dim, N, dim, acc[b].data());
    }
  });
  return reduce_blocks(acc, d.m, d.n, g.cell_volume());
}

HermitianForm oracle_form(const GridField& f, const QuadratureOptions& opt) {
  check_field(f);
  const GridGeometry g = f.geometry();
  if (g.periodic) return integrate_form(torus_derivative(f), opt);

  const double ratio = boundary_ratio(f);
  if (ratio > opt.boundary_tol)
    throw ToleranceError("field does not decay at the box boundary (ratio " + std::to_string(ratio) + ")");

  const std::size_t N = g.points;
  const std::size_t dim = f.m * g.n;
  const std::size_t per_block = pow_size(N, g.axes() - 2);
  const std::size_t workers = resolve_threads(opt.threads, N);
  std::vector<std::unique_ptr<BoxPencil>> pencils;
  std::vector<CVector> lines(workers, CVector(N * dim));
  for (std::size_t w = 0; w < workers; ++w) pencils.push_back(std::make_unique<BoxPencil>(f, g));
  std::vector<CVector> acc(N, CVector(dim * dim));
  const auto& table = kernels::active();
  for_blocks(N, workers, [&](std::size_t b, std::size_t w) {
    for (std::size_t o = b * per_block; o < (b + 1) * per_block; ++o) {
      pencils[w]->compute(o, lines[w].data());
      table.gram_accumulate(lines[w].data(), N, dim, acc[b].data());
    }
  });
  return reduce_blocks(acc, f.m, g.n, g.cell_volume());
}

}  // namespace sepform
