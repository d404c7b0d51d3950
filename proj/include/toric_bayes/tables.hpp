#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace toric_bayes {

/// A cell of a two-way table, 1-based as in every external format.
struct CellIndex {
  int row = 0;
  int col = 0;

  auto operator<=>(const CellIndex&) const = default;
};

/// "q_11" for single-digit indices, "q_{12,3}" otherwise.
std::string cell_symbol(const CellIndex& cell);

/// Two-way contingency table with structural zeros.
///
/// Counts are stored densely in row-major order; a structural zero is an
/// empty optional. A literal 0 is an observed sampling zero. Instances are
/// immutable once constructed.
class ContingencyTable {
 public:
  /// Validates shape and invariants; throws ParseError on violation.
  ContingencyTable(std::vector<std::string> row_labels,
                   std::vector<std::string> col_labels,
                   std::vector<std::optional<std::int64_t>> counts);

  int rows() const noexcept { return static_cast<int>(row_labels_.size()); }
  int cols() const noexcept { return static_cast<int>(col_labels_.size()); }
  const std::vector<std::string>& row_labels() const noexcept { return row_labels_; }
  const std::vector<std::string>& col_labels() const noexcept { return col_labels_; }

  bool is_structural_zero(const CellIndex& cell) const;
  /// Count at a free cell; throws InvalidArgument for a structural zero.
  std::int64_t count(const CellIndex& cell) const;
  const std::set<CellIndex>& structural_zeros() const noexcept { return structural_zeros_; }
  std::int64_t total() const noexcept { return total_; }

  bool operator==(const ContingencyTable&) const = default;

 private:
  std::size_t offset(const CellIndex& cell) const;

  std::vector<std::string> row_labels_;
  std::vector<std::string> col_labels_;
  std::vector<std::optional<std::int64_t>> counts_;
  std::set<CellIndex> structural_zeros_;
  std::int64_t total_ = 0;
};

/// Parses the JSON table document:
/// {"rows": [...], "cols": [...], "counts": [[int|null]], "structural_zeros": [[r,c], ...]}
ContingencyTable load_table(std::istream& source);
ContingencyTable load_table(std::string_view json_text);

/// CSV with a header row of column labels (first field ignored) and one line
/// per row: label, then counts. "*" marks a structural zero.
ContingencyTable load_table_csv(std::istream& source);

/// Reads a file, choosing CSV for a ".csv" extension and JSON otherwise.
ContingencyTable load_table_file(const std::string& path);

/// Serializes to the JSON table document (compact, stable key order).
std::string serialize_table(const ContingencyTable& table);

/// Free cells A in row-major order. This order is canonical for every
/// downstream matrix, bitmask, and report.
std::vector<CellIndex> free_cells(const ContingencyTable& table);

/// {x in A : n_x > 0}
std::set<CellIndex> positive_cells(const ContingencyTable& table);

/// Permutation p with cells[p[0]], cells[p[1]], ... listed column-major.
/// Used to line row-major matrices up against column-major presentations.
std::vector<std::size_t> column_major_order(const std::vector<CellIndex>& cells);

/// Same layout with every free cell set to `value`.
ContingencyTable with_uniform_counts(const ContingencyTable& shape, std::int64_t value);

}  // namespace toric_bayes
