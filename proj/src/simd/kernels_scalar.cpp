#include <algorithm>

#include "toric_bayes/simd/kernels.hpp"

namespace toric_bayes::simd {

namespace {

bool conformal(const std::int32_t* g, const std::int32_t* t, std::size_t len) {
  bool nonzero = false;
  for (std::size_t i = 0; i < len; ++i) {
    const std::int32_t lo = std::min(t[i], 0);
    const std::int32_t hi = std::max(t[i], 0);
    if (g[i] < lo || g[i] > hi) return false;
    nonzero |= g[i] != 0;
  }
  return nonzero;
}

std::ptrdiff_t find_reducer(const std::int32_t* pool, std::size_t count, std::size_t stride,
                            const std::int32_t* target) {
  for (std::size_t r = 0; r < count; ++r) {
    if (conformal(pool + r * stride, target, stride)) return static_cast<std::ptrdiff_t>(r);
  }
  return -1;
}

bool sign_compatible(const std::int32_t* a, const std::int32_t* b, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) {
    if ((a[i] > 0 && b[i] < 0) || (a[i] < 0 && b[i] > 0)) return false;
  }
  return true;
}

void masked_supports(const std::uint64_t* low, std::size_t count, std::uint64_t high,
                     std::uint64_t all, std::uint64_t* out) {
  for (std::size_t i = 0; i < count; ++i) out[i] = all & ~(low[i] | high);
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::kScalar, &find_reducer, &sign_compatible,
                                 &masked_supports};
  return table;
}

}  // namespace toric_bayes::simd
