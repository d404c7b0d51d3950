#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "toric_bayes/tables.hpp"

namespace toric_bayes {

/// Nonnegative integer design: one row per cell, one column per parameter.
/// Entry (x, j) is the exponent T_j(x) of parameter j in the monomial for x.
class DesignMatrix {
 public:
  DesignMatrix() = default;
  /// `entries` is row-major, |cells| x |param_names|. Throws InvalidArgument
  /// on a shape mismatch or a negative entry.
  DesignMatrix(std::vector<CellIndex> cells, std::vector<std::string> param_names,
               std::vector<std::int64_t> entries);

  std::size_t rows() const noexcept { return cells_.size(); }
  std::size_t cols() const noexcept { return param_names_.size(); }
  const std::vector<CellIndex>& cells() const noexcept { return cells_; }
  const std::vector<std::string>& param_names() const noexcept { return param_names_; }

  std::int64_t at(std::size_t row, std::size_t col) const {
    return entries_[row * cols() + col];
  }
  std::vector<std::int64_t> column(std::size_t col) const;
  std::span<const std::int64_t> row(std::size_t r) const {
    return {entries_.data() + r * cols(), cols()};
  }

  bool operator==(const DesignMatrix&) const = default;

 private:
  std::vector<CellIndex> cells_;
  std::vector<std::string> param_names_;
  std::vector<std::int64_t> entries_;
};

/// Integer basis of the saturated lattice {k in Z^cells : M^T k = 0}. Each
/// vector's first nonzero entry is positive.
struct KernelBasis {
  std::vector<CellIndex> cells;
  std::vector<std::vector<std::int64_t>> vectors;

  std::size_t rank() const noexcept { return vectors.size(); }
  /// True iff every basis vector has zero coordinate sum, which holds exactly
  /// when the all-ones vector lies in the column span of the design.
  bool homogeneous() const;

  bool operator==(const KernelBasis&) const = default;
};

/// prod q^plus - prod q^minus = 0, exponents keyed by position in `cells`.
struct BinomialEquation {
  struct Term {
    CellIndex cell;
    std::int64_t exponent = 0;
    bool operator==(const Term&) const = default;
  };
  std::vector<Term> plus;
  std::vector<Term> minus;

  std::int64_t degree_plus() const;
  std::int64_t degree_minus() const;
  /// "q_11*q_22 - q_21*q_12"; exponents above one print as "q_11^2".
  std::string to_string() const;

  bool operator==(const BinomialEquation&) const = default;
};

/// Human-readable diagnostics collected while building models.
using Diagnostics = std::vector<std::string>;

/// Quasi-independence design: one indicator column per row level and per
/// column level touching a free cell (alpha_i, beta_j). A row or column made
/// entirely of structural zeros is reported in `notes` and its column dropped.
DesignMatrix build_qi_design(const ContingencyTable& table, Diagnostics* notes = nullptr);

/// Saturated design on the free cells (identity; one parameter per cell).
DesignMatrix build_saturated_design(const ContingencyTable& table);

/// Rank over Q, exact.
std::size_t exact_rank(const DesignMatrix& m);

/// Saturated integer kernel lattice of M^T. Exact (GMP); deterministic.
///
/// When the design is small enough to enumerate its circuits (kernel vectors
/// of minimal support), the basis is made of circuits picked greedily in
/// increasing lexicographic order, listed in decreasing order; these are the
/// familiar 2x2-minor binomials for independence-type designs. Otherwise, or
/// if those circuits do not generate the whole lattice, the Hermite normal
/// form rows are returned. Compare lattices with canonical_kernel().
/// Throws CapacityError if an entry does not fit in 64 bits.
KernelBasis integer_kernel(const DesignMatrix& m);

/// Canonical Hermite normal form of the lattice spanned by the given integer
/// row vectors (zero rows dropped). Exposed for lattice comparisons.
std::vector<std::vector<mpz_class>> hermite_normal_form(
    std::vector<std::vector<mpz_class>> rows);

/// Canonical form of the lattice spanned by `vectors`: Hermite normal form
/// rows (echelon order, positive pivots, entries above each pivot reduced into
/// [0, pivot)). Two bases span the same lattice iff these are equal.
KernelBasis canonical_kernel(std::vector<CellIndex> cells,
                             const std::vector<std::vector<std::int64_t>>& vectors);

/// One lattice-basis binomial per kernel vector. Terms follow cell order.
std::vector<BinomialEquation> kernel_binomials(const KernelBasis& basis);

/// |prod q^plus - prod q^minus| <= tol for every equation. `q` is indexed by
/// position in `cells`.
bool satisfies_binomials(std::span<const double> q, const std::vector<CellIndex>& cells,
                         const std::vector<BinomialEquation>& equations, double tol);

/// Exact variant for rational points.
bool satisfies_binomials_exact(std::span<const mpq_class> q,
                               const std::vector<CellIndex>& cells,
                               const std::vector<BinomialEquation>& equations);

}  // namespace toric_bayes
