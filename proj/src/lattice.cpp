#include "toric_bayes/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>

#include "toric_bayes/errors.hpp"

namespace toric_bayes {

namespace {

using BigRow = std::vector<mpz_class>;

mpz_class floor_div(const mpz_class& a, const mpz_class& b) {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

void axpy(BigRow& target, const mpz_class& factor, const BigRow& source) {
  for (std::size_t i = 0; i < target.size(); ++i) target[i] -= factor * source[i];
}

// Unimodular row reduction of the first `width` columns to echelon form.
// Returns the number of pivot rows; `pivots` receives their columns.
std::size_t integer_echelon(std::vector<BigRow>& rows, std::size_t width,
                            std::vector<std::size_t>* pivots = nullptr) {
  std::size_t pivot_row = 0;
  for (std::size_t col = 0; col < width && pivot_row < rows.size(); ++col) {
    while (true) {
      // Row with smallest nonzero |entry| in this column becomes the pivot.
      std::size_t best = rows.size();
      for (std::size_t r = pivot_row; r < rows.size(); ++r) {
        if (sgn(rows[r][col]) == 0) continue;
        if (best == rows.size() || abs(rows[r][col]) < abs(rows[best][col])) best = r;
      }
      if (best == rows.size()) break;
      std::swap(rows[pivot_row], rows[best]);
      bool cleared = true;
      for (std::size_t r = pivot_row + 1; r < rows.size(); ++r) {
        if (sgn(rows[r][col]) == 0) continue;
        axpy(rows[r], floor_div(rows[r][col], rows[pivot_row][col]), rows[pivot_row]);
        if (sgn(rows[r][col]) != 0) cleared = false;
      }
      if (cleared) {
        if (pivots) pivots->push_back(col);
        ++pivot_row;
        break;
      }
    }
  }
  return pivot_row;
}

std::int64_t to_int64(const mpz_class& v) {
  if (!v.fits_slong_p()) {
    throw CapacityError("kernel entry " + v.get_str() + " exceeds 64-bit range");
  }
  return v.get_si();
}

std::map<CellIndex, std::size_t> positions(const std::vector<CellIndex>& cells) {
  std::map<CellIndex, std::size_t> out;
  for (std::size_t i = 0; i < cells.size(); ++i) out.emplace(cells[i], i);
  return out;
}

std::int64_t degree(const std::vector<BinomialEquation::Term>& terms) {
  std::int64_t d = 0;
  for (const auto& t : terms) d += t.exponent;
  return d;
}

std::string monomial(const std::vector<BinomialEquation::Term>& terms) {
  if (terms.empty()) return "1";
  std::string out;
  for (const auto& t : terms) {
    if (!out.empty()) out += "*";
    out += cell_symbol(t.cell);
    if (t.exponent != 1) out += "^" + std::to_string(t.exponent);
  }
  return out;
}

}  // namespace

DesignMatrix::DesignMatrix(std::vector<CellIndex> cells, std::vector<std::string> param_names,
                           std::vector<std::int64_t> entries)
    : cells_(std::move(cells)),
      param_names_(std::move(param_names)),
      entries_(std::move(entries)) {
  if (entries_.size() != cells_.size() * param_names_.size()) {
    throw InvalidArgument("design entries do not match its dimensions");
  }
  if (std::any_of(entries_.begin(), entries_.end(), [](std::int64_t v) { return v < 0; })) {
    throw InvalidArgument("design matrix entries must be nonnegative");
  }
}

std::vector<std::int64_t> DesignMatrix::column(std::size_t col) const {
  std::vector<std::int64_t> out(rows());
  for (std::size_t r = 0; r < rows(); ++r) out[r] = at(r, col);
  return out;
}

bool KernelBasis::homogeneous() const {
  return std::all_of(vectors.begin(), vectors.end(), [](const auto& v) {
    return std::accumulate(v.begin(), v.end(), std::int64_t{0}) == 0;
  });
}

std::int64_t BinomialEquation::degree_plus() const { return degree(plus); }
std::int64_t BinomialEquation::degree_minus() const { return degree(minus); }

std::string BinomialEquation::to_string() const {
  return monomial(plus) + " - " + monomial(minus);
}

DesignMatrix build_qi_design(const ContingencyTable& table, Diagnostics* notes) {
  const auto cells = free_cells(table);
  std::vector<bool> row_used(table.rows() + 1, false), col_used(table.cols() + 1, false);
  for (const auto& c : cells) {
    row_used[c.row] = true;
    col_used[c.col] = true;
  }

  // (is_row, level) per retained parameter.
  std::vector<std::pair<bool, int>> params;
  std::vector<std::string> names;
  for (int i = 1; i <= table.rows(); ++i) {
    if (row_used[i]) {
      params.emplace_back(true, i);
      names.push_back("alpha_" + std::to_string(i));
    } else if (notes) {
      notes->push_back("row " + std::to_string(i) + " (" + table.row_labels()[i - 1] +
                       ") is entirely structural zeros; parameter alpha_" +
                       std::to_string(i) + " dropped");
    }
  }
  for (int j = 1; j <= table.cols(); ++j) {
    if (col_used[j]) {
      params.emplace_back(false, j);
      names.push_back("beta_" + std::to_string(j));
    } else if (notes) {
      notes->push_back("column " + std::to_string(j) + " (" + table.col_labels()[j - 1] +
                       ") is entirely structural zeros; parameter beta_" +
                       std::to_string(j) + " dropped");
    }
  }

  std::vector<std::int64_t> entries;
  entries.reserve(cells.size() * params.size());
  for (const auto& cell : cells) {
    for (const auto& [is_row, level] : params) {
      entries.push_back((is_row ? cell.row : cell.col) == level ? 1 : 0);
    }
  }
  return DesignMatrix(cells, std::move(names), std::move(entries));
}

DesignMatrix build_saturated_design(const ContingencyTable& table) {
  const auto cells = free_cells(table);
  const std::size_t n = cells.size();
  std::vector<std::string> names;
  std::vector<std::int64_t> entries(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    names.push_back("theta_" + std::to_string(cells[i].row) + "_" +
                    std::to_string(cells[i].col));
    entries[i * n + i] = 1;
  }
  return DesignMatrix(cells, std::move(names), std::move(entries));
}

std::size_t exact_rank(const DesignMatrix& m) {
  std::vector<BigRow> rows(m.rows(), BigRow(m.cols()));
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) rows[r][c] = m.at(r, c);
  }
  return integer_echelon(rows, m.cols());
}

std::vector<std::vector<mpz_class>> hermite_normal_form(std::vector<std::vector<mpz_class>> rows) {
  if (rows.empty()) return rows;
  const std::size_t width = rows.front().size();
  std::vector<std::size_t> pivots;
  const std::size_t rank = integer_echelon(rows, width, &pivots);
  rows.resize(rank);
  for (std::size_t r = 0; r < rank; ++r) {
    const std::size_t col = pivots[r];
    if (sgn(rows[r][col]) < 0) {
      for (auto& v : rows[r]) v = -v;
    }
    for (std::size_t above = 0; above < r; ++above) {
      axpy(rows[above], floor_div(rows[above][col], rows[r][col]), rows[r]);
    }
  }
  return rows;
}

KernelBasis canonical_kernel(std::vector<CellIndex> cells,
                             const std::vector<std::vector<std::int64_t>>& vectors) {
  std::vector<BigRow> rows;
  for (const auto& v : vectors) {
    if (v.size() != cells.size()) throw InvalidArgument("kernel vector length mismatch");
    BigRow row;
    for (auto x : v) row.emplace_back(static_cast<long>(x));
    rows.push_back(std::move(row));
  }
  KernelBasis out{std::move(cells), {}};
  for (const auto& row : hermite_normal_form(std::move(rows))) {
    std::vector<std::int64_t> v;
    for (const auto& x : row) v.push_back(to_int64(x));
    out.vectors.push_back(std::move(v));
  }
  return out;
}

namespace {

// Saturated kernel of M^T via unimodular row reduction of [M | I]: rows whose
// M-part vanishes carry u with u^T M = 0, and the transform is unimodular, so
// those u generate the whole integer kernel lattice. Returned in HNF.
std::vector<BigRow> hnf_kernel(const DesignMatrix& m, const std::vector<std::size_t>& rows_used) {
  const std::size_t n = rows_used.size();
  const std::size_t p = m.cols();
  std::vector<BigRow> rows(n, BigRow(p + n));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < p; ++c) rows[r][c] = m.at(rows_used[r], c);
    rows[r][p + r] = 1;
  }
  const std::size_t rank = integer_echelon(rows, p);
  std::vector<BigRow> kernel;
  for (std::size_t r = rank; r < n; ++r) {
    kernel.emplace_back(rows[r].begin() + static_cast<std::ptrdiff_t>(p), rows[r].end());
  }
  return hermite_normal_form(std::move(kernel));
}

// Circuits: primitive kernel vectors with inclusion-minimal support.
// Exhaustive over supports of size <= rank(M) + 1, so only for small designs.
constexpr std::size_t kCircuitSubsetBudget = 200'000;

std::optional<std::vector<BigRow>> circuits(const DesignMatrix& m, std::size_t design_rank) {
  const std::size_t n = m.rows();
  const std::size_t max_size = std::min(n, design_rank + 1);
  if (n > 30) return std::nullopt;
  mpz_class subsets = 0;
  for (std::size_t k = 1; k <= max_size; ++k) {
    mpz_class c;
    mpz_bin_uiui(c.get_mpz_t(), n, k);
    subsets += c;
  }
  if (subsets > kCircuitSubsetBudget) return std::nullopt;

  std::vector<std::uint32_t> supports;
  std::vector<BigRow> found;
  for (std::size_t k = 1; k <= max_size; ++k) {
    std::vector<bool> pick(n, false);
    std::fill(pick.end() - static_cast<std::ptrdiff_t>(k), pick.end(), true);
    do {
      std::uint32_t mask = 0;
      std::vector<std::size_t> rows;
      for (std::size_t i = 0; i < n; ++i) {
        if (pick[i]) {
          mask |= std::uint32_t{1} << i;
          rows.push_back(i);
        }
      }
      if (std::any_of(supports.begin(), supports.end(),
                      [&](std::uint32_t s) { return (s & mask) == s; })) {
        continue;
      }
      const auto local = hnf_kernel(m, rows);
      if (local.size() != 1) continue;
      if (std::any_of(local[0].begin(), local[0].end(), [](const mpz_class& v) { return sgn(v) == 0; })) {
        continue;
      }
      BigRow full(n, 0);
      for (std::size_t i = 0; i < rows.size(); ++i) full[rows[i]] = local[0][i];
      supports.push_back(mask);
      found.push_back(std::move(full));
    } while (std::next_permutation(pick.begin(), pick.end()));
  }
  return found;
}

bool lex_less(const BigRow& a, const BigRow& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

std::vector<std::int64_t> narrow(const BigRow& row) {
  std::vector<std::int64_t> v;
  for (const auto& x : row) v.push_back(to_int64(x));
  return v;
}

}  // namespace

KernelBasis integer_kernel(const DesignMatrix& m) {
  std::vector<std::size_t> all(m.rows());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const auto hnf = hnf_kernel(m, all);
  KernelBasis out{m.cells(), {}};
  if (hnf.empty()) return out;

  // Prefer a basis of circuits (binomials of minimal support): take them in
  // increasing lexicographic order while they raise the rank, and keep the
  // result only if it generates the full saturated lattice.
  if (const auto candidates = circuits(m, m.rows() - hnf.size())) {
    auto sorted = *candidates;
    std::sort(sorted.begin(), sorted.end(), lex_less);
    std::vector<BigRow> chosen;
    for (const auto& c : sorted) {
      auto trial = chosen;
      trial.push_back(c);
      auto work = trial;
      if (integer_echelon(work, m.rows()) == trial.size()) chosen = std::move(trial);
      if (chosen.size() == hnf.size()) break;
    }
    if (chosen.size() == hnf.size() && hermite_normal_form(chosen) == hnf) {
      std::sort(chosen.begin(), chosen.end(), [](const BigRow& a, const BigRow& b) { return lex_less(b, a); });
      for (const auto& row : chosen) out.vectors.push_back(narrow(row));
      return out;
    }
  }
  for (const auto& row : hnf) out.vectors.push_back(narrow(row));
  return out;
}

std::vector<BinomialEquation> kernel_binomials(const KernelBasis& basis) {
  std::vector<BinomialEquation> out;
  for (const auto& k : basis.vectors) {
    BinomialEquation eq;
    for (std::size_t i = 0; i < k.size(); ++i) {
      if (k[i] > 0) eq.plus.push_back({basis.cells[i], k[i]});
      if (k[i] < 0) eq.minus.push_back({basis.cells[i], -k[i]});
    }
    out.push_back(std::move(eq));
  }
  return out;
}

bool satisfies_binomials(std::span<const double> q, const std::vector<CellIndex>& cells,
                         const std::vector<BinomialEquation>& equations, double tol) {
  if (q.size() != cells.size()) throw InvalidArgument("point has wrong dimension");
  const auto index = positions(cells);
  auto evaluate = [&](const std::vector<BinomialEquation::Term>& terms) {
    double prod = 1.0;
    for (const auto& t : terms) {
      prod *= std::pow(q[index.at(t.cell)], static_cast<double>(t.exponent));
    }
    return prod;
  };
  return std::all_of(equations.begin(), equations.end(), [&](const BinomialEquation& eq) {
    return std::abs(evaluate(eq.plus) - evaluate(eq.minus)) <= tol;
  });
}

bool satisfies_binomials_exact(std::span<const mpq_class> q,
                               const std::vector<CellIndex>& cells,
                               const std::vector<BinomialEquation>& equations) {
  if (q.size() != cells.size()) throw InvalidArgument("point has wrong dimension");
  const auto index = positions(cells);
  std::vector<mpq_class> point(q.begin(), q.end());
  for (auto& v : point) v.canonicalize();
  auto evaluate = [&](const std::vector<BinomialEquation::Term>& terms) {
    mpq_class prod = 1;
    for (const auto& t : terms) {
      for (std::int64_t e = 0; e < t.exponent; ++e) prod *= point[index.at(t.cell)];
    }
    return prod;
  };
  return std::all_of(equations.begin(), equations.end(), [&](const BinomialEquation& eq) {
    return evaluate(eq.plus) == evaluate(eq.minus);
  });
}

}  // namespace toric_bayes
