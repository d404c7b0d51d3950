// Compiled with -mavx2 on x86-64 only; dispatch guarantees the CPU supports it.
#include <immintrin.h>

#include "toric_bayes/simd/kernels.hpp"

namespace toric_bayes::simd {

namespace {

std::ptrdiff_t find_reducer(const std::int32_t* pool, std::size_t count, std::size_t stride,
                            const std::int32_t* target) {
  const __m256i zero = _mm256_setzero_si256();
  for (std::size_t r = 0; r < count; ++r) {
    const std::int32_t* g = pool + r * stride;
    __m256i bad = zero;
    __m256i is_zero = _mm256_set1_epi32(-1);
    for (std::size_t i = 0; i < stride; i += kLaneWidth) {
      const __m256i t = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(target + i));
      const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(g + i));
      const __m256i lo = _mm256_min_epi32(t, zero);
      const __m256i hi = _mm256_max_epi32(t, zero);
      bad = _mm256_or_si256(bad, _mm256_or_si256(_mm256_cmpgt_epi32(lo, v),
                                                 _mm256_cmpgt_epi32(v, hi)));
      is_zero = _mm256_and_si256(is_zero, _mm256_cmpeq_epi32(v, zero));
      if (!_mm256_testz_si256(bad, bad)) break;
    }
    if (_mm256_testz_si256(bad, bad) && _mm256_movemask_epi8(is_zero) != -1) {
      return static_cast<std::ptrdiff_t>(r);
    }
  }
  return -1;
}

bool sign_compatible(const std::int32_t* a, const std::int32_t* b, std::size_t len) {
  const __m256i zero = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + kLaneWidth <= len; i += kLaneWidth) {
    const __m256i x = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    const __m256i y = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    const __m256i pos_neg =
        _mm256_and_si256(_mm256_cmpgt_epi32(x, zero), _mm256_cmpgt_epi32(zero, y));
    const __m256i neg_pos =
        _mm256_and_si256(_mm256_cmpgt_epi32(zero, x), _mm256_cmpgt_epi32(y, zero));
    const __m256i opposite = _mm256_or_si256(pos_neg, neg_pos);
    if (!_mm256_testz_si256(opposite, opposite)) return false;
  }
  for (; i < len; ++i) {
    if ((a[i] > 0 && b[i] < 0) || (a[i] < 0 && b[i] > 0)) return false;
  }
  return true;
}

void masked_supports(const std::uint64_t* low, std::size_t count, std::uint64_t high,
                     std::uint64_t all, std::uint64_t* out) {
  const __m256i h = _mm256_set1_epi64x(static_cast<long long>(high));
  const __m256i a = _mm256_set1_epi64x(static_cast<long long>(all));
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    const __m256i l = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(low + i));
    const __m256i zeroed = _mm256_or_si256(l, h);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), _mm256_andnot_si256(zeroed, a));
  }
  for (; i < count; ++i) out[i] = all & ~(low[i] | high);
}

}  // namespace

const KernelTable* avx2_kernels() {
  static const KernelTable table{Isa::kAvx2, &find_reducer, &sign_compatible,
                                 &masked_supports};
  return &table;
}

}  // namespace toric_bayes::simd
