#pragma once

// Integer inner loops of the Hilbert completion and instance enumeration.
//
// Every kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant. The active table is picked once at first use from CPUID; setting
// TORIC_BAYES_ISA=scalar forces the reference path. Both paths must return
// identical results; the equivalence tests enforce that.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace toric_bayes::simd {

/// Lattice vectors are stored in rows padded to a multiple of this many lanes
/// (zero padding). 8 x int32 = one AVX2 register.
inline constexpr std::size_t kLaneWidth = 8;

constexpr std::size_t padded_width(std::size_t n) {
  return (n + kLaneWidth - 1) / kLaneWidth * kLaneWidth;
}

enum class Isa { kScalar, kAvx2 };

struct KernelTable {
  Isa isa;

  /// Index of the first nonzero row g of `pool` (count rows, `stride` lanes
  /// each) with g conformal to `target`: min(t_i,0) <= g_i <= max(t_i,0) for
  /// every lane. Returns -1 if none.
  std::ptrdiff_t (*find_reducer)(const std::int32_t* pool, std::size_t count,
                                 std::size_t stride, const std::int32_t* target);

  /// True iff a_i * b_i >= 0 for every lane (no opposite signs).
  bool (*sign_compatible)(const std::int32_t* a, const std::int32_t* b, std::size_t len);

  /// out[i] = all & ~(low[i] | high) for i < count.
  void (*masked_supports)(const std::uint64_t* low, std::size_t count, std::uint64_t high,
                          std::uint64_t all, std::uint64_t* out);
};

const KernelTable& scalar_kernels();
/// Nullptr when AVX2 was not compiled in.
const KernelTable* avx2_kernels();

bool cpu_has_avx2();

/// The table in use. Chosen once; see set_active_isa.
const KernelTable& active_kernels();

/// Overrides the dispatch (tests, benchmarking). Returns false if the
/// requested ISA is unavailable on this machine or build.
bool set_active_isa(Isa isa);

std::string_view isa_name(Isa isa);

}  // namespace toric_bayes::simd
