#include <doctest.h>

#include <cmath>
#include <vector>

#include "sepform/constructors.hpp"
#include "sepform/kernels.hpp"
#include "sepform/quadrature.hpp"
#include "support.hpp"

using namespace sepform;

namespace {

struct ScalarGuard {
  explicit ScalarGuard(bool on) { kernels::force_scalar(on); }
  ~ScalarGuard() { kernels::force_scalar(false); }
};

}  // namespace

TEST_CASE("dispatch") {
  CHECK(kernels::scalar_table().isa == kernels::Isa::Scalar);
  {
    ScalarGuard g(true);
    CHECK(kernels::active().isa == kernels::Isa::Scalar);
  }
  if (const auto* t = kernels::avx2_table()) CHECK(kernels::active().isa == t->isa);
  MESSAGE("active kernels: " << kernels::active().name);
}

TEST_CASE("lincomb variants agree") {
  const auto* simd = kernels::avx2_table();
  if (!simd) return;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (std::size_t len : {1u, 3u, 4u, 7u, 8u, 33u, 258u}) {
    for (std::size_t nsrc = 1; nsrc <= 5; ++nsrc) {
      std::vector<std::vector<double>> src(nsrc, std::vector<double>(len));
      std::vector<const double*> ptr;
      std::vector<double> coef(nsrc);
      for (std::size_t t = 0; t < nsrc; ++t) {
        for (auto& x : src[t]) x = u(rng);
        ptr.push_back(src[t].data());
        coef[t] = u(rng) * 10;
      }
      std::vector<double> a(len), b(len);
      kernels::scalar_table().lincomb(a.data(), ptr.data(), coef.data(), nsrc, len);
      simd->lincomb(b.data(), ptr.data(), coef.data(), nsrc, len);
      for (std::size_t k = 0; k < len; ++k) CHECK(std::abs(a[k] - b[k]) <= 1e-14 * (1 + std::abs(a[k])));
    }
  }
}

TEST_CASE("gram variants agree") {
  const auto* simd = kernels::avx2_table();
  if (!simd) return;
  std::mt19937_64 rng(2);
  for (std::size_t dim : {1u, 2u, 3u, 4u, 5u, 6u, 9u}) {
    for (std::size_t count : {1u, 2u, 17u}) {
      const CVector rows = test::random_vector(dim * count, rng);
      CVector a(dim * dim), b(dim * dim);
      const CVector seed = test::random_vector(dim * dim, rng);
      a = seed;
      b = seed;
      kernels::scalar_table().gram_accumulate(rows.data(), count, dim, a.data());
      simd->gram_accumulate(rows.data(), count, dim, b.data());
      for (std::size_t e = 0; e < dim * dim; ++e) CHECK(std::abs(a[e] - b[e]) <= 1e-13 * (1 + std::abs(a[e])));
      // Reference: explicit complex arithmetic.
      CVector ref = seed;
      for (std::size_t r = 0; r < count; ++r)
        for (std::size_t x = 0; x < dim; ++x)
          for (std::size_t y = 0; y < dim; ++y) ref[x * dim + y] += std::conj(rows[r * dim + x]) * rows[r * dim + y];
      for (std::size_t e = 0; e < dim * dim; ++e) CHECK(std::abs(a[e] - ref[e]) <= 1e-13 * (1 + std::abs(ref[e])));
    }
  }
}

TEST_CASE("oracle agrees across kernel variants") {
  std::mt19937_64 rng(3);
  const WavepacketEnsemble e{1.0, {{test::random_vector(2, rng), test::random_vector(2, rng, 0.5)},
                                   {test::random_vector(2, rng), test::random_vector(2, rng, 0.5)}}};
  const GridField f = sample_wavepacket(e, BoxDomain{2, 4.0, 20});
  HermitianForm scalar;
  {
    ScalarGuard g(true);
    scalar = oracle_form(f);
  }
  const HermitianForm active = oracle_form(f);
  CHECK((scalar - active).frobenius_norm() <= 1e-13 * scalar.frobenius_norm());
}
