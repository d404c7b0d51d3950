#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "toric_bayes/lattice.hpp"

namespace toric_bayes {

/// Minimal generators of the monoid {t in N^cells : t . k = 0 for all k}.
struct HilbertBasis {
  std::vector<CellIndex> cells;
  /// Sorted lexicographically (cell order), ascending.
  std::vector<std::vector<std::int64_t>> generators;

  std::size_t size() const noexcept { return generators.size(); }
  bool operator==(const HilbertBasis&) const = default;
};

struct HilbertOptions {
  /// Cap on the working set of the completion (all lifted vectors, not only
  /// the final generators).
  std::size_t max_elements = 200'000;
  /// Cap on critical pairs examined.
  std::uint64_t max_pairs = 50'000'000;
};

/// Pottier completion over the lifted lattice {(x, K^T x)}: start from the
/// lifted unit vectors, add normal forms of critical sums until closed under
/// conformal reduction, keep the lifted elements with K^T x = 0.
/// Throws CapacityError when a budget in `options` is exceeded.
HilbertBasis hilbert_basis(const KernelBasis& kernel, const HilbertOptions& options = {});

struct CheckResult {
  bool passed = true;
  std::string detail;                        // empty on pass
  std::vector<std::int64_t> witness;         // offending vector on failure
};

struct HilbertVerification {
  CheckResult orthogonality;
  CheckResult minimality;
  CheckResult completeness;

  bool passed() const {
    return orthogonality.passed && minimality.passed && completeness.passed;
  }
};

/// Exhaustive check of orthogonality, pairwise irreducibility, and
/// decomposability of every t >= 0, t . K = 0 with sum(t) <= bound.
HilbertVerification verify_hilbert(const HilbertBasis& basis, const KernelBasis& kernel,
                                   int bound);

/// Design whose columns are the generators, named zeta_1..zeta_u.
DesignMatrix maximal_design(const HilbertBasis& basis);

}  // namespace toric_bayes
