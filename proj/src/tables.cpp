#include "toric_bayes/tables.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "toric_bayes/errors.hpp"

namespace toric_bayes {

namespace {

std::string describe(const CellIndex& cell) {
  return "(" + std::to_string(cell.row) + "," + std::to_string(cell.col) + ")";
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

std::string cell_symbol(const CellIndex& cell) {
  if (cell.row < 10 && cell.col < 10) {
    return "q_" + std::to_string(cell.row) + std::to_string(cell.col);
  }
  return "q_{" + std::to_string(cell.row) + "," + std::to_string(cell.col) + "}";
}

ContingencyTable::ContingencyTable(std::vector<std::string> row_labels,
                                   std::vector<std::string> col_labels,
                                   std::vector<std::optional<std::int64_t>> counts)
    : row_labels_(std::move(row_labels)),
      col_labels_(std::move(col_labels)),
      counts_(std::move(counts)) {
  if (row_labels_.empty() || col_labels_.empty()) {
    throw ParseError("table must have at least one row and one column");
  }
  if (counts_.size() != row_labels_.size() * col_labels_.size()) {
    throw ParseError("counts grid does not match " + std::to_string(rows()) + "x" +
                     std::to_string(cols()) + " labels");
  }
  for (int r = 1; r <= rows(); ++r) {
    for (int c = 1; c <= cols(); ++c) {
      const CellIndex cell{r, c};
      const auto& value = counts_[offset(cell)];
      if (!value) {
        structural_zeros_.insert(cell);
        continue;
      }
      if (*value < 0) throw ParseError("negative count at " + describe(cell));
      total_ += *value;
    }
  }
  if (structural_zeros_.size() == counts_.size()) {
    throw ParseError("every cell is a structural zero; free cell set is empty");
  }
}

std::size_t ContingencyTable::offset(const CellIndex& cell) const {
  if (cell.row < 1 || cell.row > rows() || cell.col < 1 || cell.col > cols()) {
    throw InvalidArgument("cell " + describe(cell) + " outside the table");
  }
  return static_cast<std::size_t>(cell.row - 1) * col_labels_.size() +
         static_cast<std::size_t>(cell.col - 1);
}

bool ContingencyTable::is_structural_zero(const CellIndex& cell) const {
  return !counts_[offset(cell)].has_value();
}

std::int64_t ContingencyTable::count(const CellIndex& cell) const {
  const auto& value = counts_[offset(cell)];
  if (!value) throw InvalidArgument("cell " + describe(cell) + " is a structural zero");
  return *value;
}

ContingencyTable load_table(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed table document: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("table document must be a JSON object");
  for (const char* key : {"rows", "cols", "counts", "structural_zeros"}) {
    if (!doc.contains(key) || !doc[key].is_array()) {
      throw ParseError(std::string("missing or non-array field \"") + key + "\"");
    }
  }

  std::vector<std::string> rows, cols;
  for (const auto& label : doc["rows"]) {
    if (!label.is_string()) throw ParseError("row labels must be strings");
    rows.push_back(label.get<std::string>());
  }
  for (const auto& label : doc["cols"]) {
    if (!label.is_string()) throw ParseError("column labels must be strings");
    cols.push_back(label.get<std::string>());
  }

  const auto& grid = doc["counts"];
  if (grid.size() != rows.size()) throw ParseError("counts must have one array per row");
  std::vector<std::optional<std::int64_t>> counts;
  counts.reserve(rows.size() * cols.size());
  for (std::size_t r = 0; r < grid.size(); ++r) {
    if (!grid[r].is_array() || grid[r].size() != cols.size()) {
      throw ParseError("counts row " + std::to_string(r + 1) + " must have " +
                       std::to_string(cols.size()) + " entries");
    }
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const auto& v = grid[r][c];
      const CellIndex cell{static_cast<int>(r + 1), static_cast<int>(c + 1)};
      if (v.is_null()) {
        counts.emplace_back(std::nullopt);
      } else if (v.is_number_integer()) {
        const auto n = v.get<std::int64_t>();
        if (n < 0) throw ParseError("negative count at " + describe(cell));
        counts.emplace_back(n);
      } else {
        throw ParseError("count at " + describe(cell) + " must be an integer or null");
      }
    }
  }

  std::set<CellIndex> declared;
  for (const auto& entry : doc["structural_zeros"]) {
    if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number_integer() ||
        !entry[1].is_number_integer()) {
      throw ParseError("structural_zeros entries must be [row, col] integer pairs");
    }
    const CellIndex cell{entry[0].get<int>(), entry[1].get<int>()};
    if (cell.row < 1 || cell.row > static_cast<int>(rows.size()) || cell.col < 1 ||
        cell.col > static_cast<int>(cols.size())) {
      throw ParseError("structural zero " + describe(cell) + " outside the table");
    }
    if (!declared.insert(cell).second) {
      throw ParseError("duplicate structural zero " + describe(cell));
    }
    const auto& v = counts[static_cast<std::size_t>(cell.row - 1) * cols.size() +
                           static_cast<std::size_t>(cell.col - 1)];
    if (v) throw ParseError("count present at structural zero " + describe(cell));
  }
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const CellIndex cell{static_cast<int>(i / cols.size() + 1),
                         static_cast<int>(i % cols.size() + 1)};
    if (!counts[i] && !declared.contains(cell)) {
      throw ParseError("null count at " + describe(cell) +
                       " is not declared in structural_zeros");
    }
  }
  return ContingencyTable(std::move(rows), std::move(cols), std::move(counts));
}

ContingencyTable load_table(std::istream& source) {
  std::ostringstream buffer;
  buffer << source.rdbuf();
  return load_table(std::string_view(buffer.str()));
}

ContingencyTable load_table_csv(std::istream& source) {
  std::string line;
  std::vector<std::string> header;
  while (std::getline(source, line)) {
    if (!trim(line).empty()) {
      header = split_csv_line(line);
      break;
    }
  }
  if (header.size() < 2) throw ParseError("CSV header must name at least one column");
  std::vector<std::string> cols(header.begin() + 1, header.end());

  std::vector<std::string> rows;
  std::vector<std::optional<std::int64_t>> counts;
  while (std::getline(source, line)) {
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != cols.size() + 1) {
      throw ParseError("CSV row \"" + fields.front() + "\" has " +
                       std::to_string(fields.size() - 1) + " counts, expected " +
                       std::to_string(cols.size()));
    }
    rows.push_back(fields.front());
    for (std::size_t c = 1; c < fields.size(); ++c) {
      const auto& f = fields[c];
      const CellIndex cell{static_cast<int>(rows.size()), static_cast<int>(c)};
      if (f == "*") {
        counts.emplace_back(std::nullopt);
        continue;
      }
      std::size_t used = 0;
      long long n = 0;
      try {
        n = std::stoll(f, &used);
      } catch (const std::exception&) {
        throw ParseError("bad count \"" + f + "\" at " + describe(cell));
      }
      if (used != f.size()) throw ParseError("bad count \"" + f + "\" at " + describe(cell));
      if (n < 0) throw ParseError("negative count at " + describe(cell));
      counts.emplace_back(n);
    }
  }
  return ContingencyTable(std::move(rows), std::move(cols), std::move(counts));
}

ContingencyTable load_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open table file " + path);
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0) {
    return load_table_csv(in);
  }
  return load_table(in);
}

std::string serialize_table(const ContingencyTable& table) {
  nlohmann::ordered_json doc;
  doc["rows"] = table.row_labels();
  doc["cols"] = table.col_labels();
  auto grid = nlohmann::ordered_json::array();
  for (int r = 1; r <= table.rows(); ++r) {
    auto row = nlohmann::ordered_json::array();
    for (int c = 1; c <= table.cols(); ++c) {
      const CellIndex cell{r, c};
      if (table.is_structural_zero(cell)) {
        row.push_back(nullptr);
      } else {
        row.push_back(table.count(cell));
      }
    }
    grid.push_back(std::move(row));
  }
  doc["counts"] = std::move(grid);
  auto zeros = nlohmann::ordered_json::array();
  for (const auto& z : table.structural_zeros()) zeros.push_back({z.row, z.col});
  doc["structural_zeros"] = std::move(zeros);
  return doc.dump();
}

std::vector<CellIndex> free_cells(const ContingencyTable& table) {
  std::vector<CellIndex> cells;
  for (int r = 1; r <= table.rows(); ++r) {
    for (int c = 1; c <= table.cols(); ++c) {
      if (!table.is_structural_zero({r, c})) cells.push_back({r, c});
    }
  }
  return cells;
}

std::set<CellIndex> positive_cells(const ContingencyTable& table) {
  std::set<CellIndex> out;
  for (const auto& cell : free_cells(table)) {
    if (table.count(cell) > 0) out.insert(cell);
  }
  return out;
}

std::vector<std::size_t> column_major_order(const std::vector<CellIndex>& cells) {
  std::vector<std::size_t> order(cells.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::pair(cells[a].col, cells[a].row) < std::pair(cells[b].col, cells[b].row);
  });
  return order;
}

ContingencyTable with_uniform_counts(const ContingencyTable& shape, std::int64_t value) {
  std::vector<std::optional<std::int64_t>> counts;
  for (int r = 1; r <= shape.rows(); ++r) {
    for (int c = 1; c <= shape.cols(); ++c) {
      if (shape.is_structural_zero({r, c})) {
        counts.emplace_back(std::nullopt);
      } else {
        counts.emplace_back(value);
      }
    }
  }
  return ContingencyTable(shape.row_labels(), shape.col_labels(), std::move(counts));
}

}  // namespace toric_bayes
