#include <atomic>
#include <cstdlib>
#include <string>

#include "toric_bayes/simd/kernels.hpp"

namespace toric_bayes::simd {

#if !defined(TORIC_BAYES_HAVE_AVX2)
const KernelTable* avx2_kernels() { return nullptr; }
#endif

bool cpu_has_avx2() {
#if defined(TORIC_BAYES_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

namespace {

const KernelTable* initial_table() {
  if (const char* forced = std::getenv("TORIC_BAYES_ISA")) {
    if (std::string(forced) == "scalar") return &scalar_kernels();
  }
  if (cpu_has_avx2() && avx2_kernels()) return avx2_kernels();
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{initial_table()};
  return slot;
}

}  // namespace

const KernelTable& active_kernels() { return *active_slot().load(std::memory_order_acquire); }

bool set_active_isa(Isa isa) {
  const KernelTable* table = nullptr;
  switch (isa) {
    case Isa::kScalar:
      table = &scalar_kernels();
      break;
    case Isa::kAvx2:
      if (cpu_has_avx2()) table = avx2_kernels();
      break;
  }
  if (!table) return false;
  active_slot().store(table, std::memory_order_release);
  return true;
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

}  // namespace toric_bayes::simd
