#include <atomic>

#include "kernels_impl.hpp"

namespace sepform::kernels {

namespace {

std::atomic<bool> g_force_scalar{false};

const Table kScalar{Isa::Scalar, "scalar", &detail::lincomb_scalar, &detail::gram_scalar};

#if defined(SEPFORM_HAVE_AVX2)
const Table kAvx2{Isa::Avx2, "avx2", &detail::lincomb_avx2, &detail::gram_avx2};

bool cpu_has_avx2() {
  static const bool ok = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  return ok;
}
#endif

}  // namespace

const Table& scalar_table() { return kScalar; }

const Table* avx2_table() {
#if defined(SEPFORM_HAVE_AVX2)
  return cpu_has_avx2() ? &kAvx2 : nullptr;
#else
  return nullptr;
#endif
}

const Table& active() {
  if (!g_force_scalar.load(std::memory_order_relaxed)) {
    if (const Table* t = avx2_table()) return *t;
  }
  return kScalar;
}

void force_scalar(bool on) { g_force_scalar.store(on, std::memory_order_relaxed); }

}  // namespace sepform::kernels
