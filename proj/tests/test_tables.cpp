#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "toric_bayes/errors.hpp"
#include "toric_bayes/tables.hpp"

using namespace toric_bayes;

namespace {

std::string data_path(const char* name) { return std::string(TORIC_BAYES_DATA_DIR) + "/" + name; }

ContingencyTable cancer() { return load_table_file(data_path("cancer.json")); }

}  // namespace

TEST_CASE("cancer table loads with its expected total") {
  const auto t = cancer();
  CHECK(t.rows() == 5);
  CHECK(t.cols() == 2);
  CHECK(t.total() == 292);
  CHECK(free_cells(t).size() == 8);
  CHECK(t.structural_zeros() == std::set<CellIndex>{{3, 2}, {4, 1}});
  CHECK(t.count({5, 1}) == 0);
  CHECK(t.count({4, 2}) == 111);
  CHECK_THROWS_AS(t.count({3, 2}), InvalidArgument);
}

TEST_CASE("degenerate and small tables") {
  const auto one = load_table(R"({"rows":["a"],"cols":["x"],"counts":[[0]],"structural_zeros":[]})");
  CHECK(one.total() == 0);
  CHECK(free_cells(one).size() == 1);

  const auto small = load_table_file(data_path("small_2x2.json"));
  CHECK(small.total() == 10);
  CHECK(free_cells(small).size() == 4);
}

TEST_CASE("malformed documents are parse errors") {
  const char* bad[] = {
      "not json",
      R"({"rows":["a"],"cols":["x"]})",
      R"({"rows":["a"],"cols":["x"],"counts":[[-1]],"structural_zeros":[]})",
      R"({"rows":["a","b"],"cols":["x"],"counts":[[1]],"structural_zeros":[]})",
      R"({"rows":["a"],"cols":["x","y"],"counts":[[1,null]],"structural_zeros":[]})",
      R"({"rows":["a"],"cols":["x","y"],"counts":[[1,3]],"structural_zeros":[[1,2]]})",
      R"({"rows":["a"],"cols":["x","y"],"counts":[[1,null]],"structural_zeros":[[1,2],[1,2]]})",
      R"({"rows":["a"],"cols":["x","y"],"counts":[[1,null]],"structural_zeros":[[1,3]]})",
      R"({"rows":["a"],"cols":["x"],"counts":[[1.5]],"structural_zeros":[]})",
  };
  for (const char* doc : bad) {
    CAPTURE(doc);
    CHECK_THROWS_AS(load_table(std::string_view(doc)), ParseError);
  }
}

TEST_CASE("csv and json describe the same cancer table") {
  CHECK(load_table_file(data_path("cancer.csv")) == cancer());
  std::istringstream in("h,x,y\na,1,*\nb,2,3\n");
  const auto t = load_table_csv(in);
  CHECK(t.is_structural_zero({1, 2}));
  CHECK(t.total() == 6);
  std::istringstream bad("h,x\na,q\n");
  CHECK_THROWS_AS(load_table_csv(bad), ParseError);
}

TEST_CASE("serialize then load is the identity") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int r = 1 + static_cast<int>(rng() % 5), c = 1 + static_cast<int>(rng() % 5);
    std::vector<std::string> rl, cl;
    for (int i = 0; i < r; ++i) rl.push_back("r" + std::to_string(i));
    for (int j = 0; j < c; ++j) cl.push_back("c" + std::to_string(j));
    std::vector<std::optional<std::int64_t>> counts;
    for (int k = 0; k < r * c; ++k) {
      if (rng() % 5 == 0) counts.emplace_back(std::nullopt);
      else counts.emplace_back(static_cast<std::int64_t>(rng() % 1000));
    }
    const ContingencyTable t(rl, cl, counts);
    const auto text = serialize_table(t);
    CHECK(load_table(text) == t);
    CHECK(serialize_table(load_table(text)) == text);

    const auto cells = free_cells(t);
    CHECK(cells.size() == static_cast<std::size_t>(r * c) - t.structural_zeros().size());
    for (const auto& x : cells) CHECK_FALSE(t.is_structural_zero(x));

    std::int64_t positive_sum = 0;
    for (const auto& x : positive_cells(t)) positive_sum += t.count(x);
    const bool any_zero = std::any_of(cells.begin(), cells.end(), [&](const CellIndex& x) {
      return t.count(x) == 0;
    });
    CHECK(positive_sum == t.total());
    CHECK((positive_cells(t).size() == cells.size()) == !any_zero);
  }
}

TEST_CASE("whitespace does not change the parsed table") {
  const std::string spaced = "{ \"rows\" : [ \"a\" , \"b\" ] ,\n \"cols\": [\"x\"],\n"
                             "  \"counts\" : [ [ 4 ] , [ 5 ] ], \"structural_zeros\" : [ ] }";
  const auto t = load_table(spaced);
  CHECK(load_table(serialize_table(t)) == t);
}

TEST_CASE("free cells are row-major with zeros skipped") {
  CHECK(free_cells(cancer()) ==
        std::vector<CellIndex>{{1, 1}, {1, 2}, {2, 1}, {2, 2}, {3, 1}, {4, 2}, {5, 1}, {5, 2}});
  const ContingencyTable z({"a", "b"}, {"x", "y"}, {std::nullopt, 1, 2, 3});
  CHECK(free_cells(z) == std::vector<CellIndex>{{1, 2}, {2, 1}, {2, 2}});
  const ContingencyTable full({"a", "b"}, {"x", "y"}, {1, 1, 1, 1});
  CHECK(free_cells(full).size() == 4);
}

TEST_CASE("positive cells") {
  const auto t = cancer();
  const auto cells = free_cells(t);
  auto expected = std::set<CellIndex>(cells.begin(), cells.end());
  expected.erase({5, 1});
  CHECK(positive_cells(t) == expected);
  const ContingencyTable zeros({"a", "b"}, {"x"}, {0, 0});
  CHECK(positive_cells(zeros).empty());
  const ContingencyTable pos({"a", "b"}, {"x"}, {1, 2});
  CHECK(positive_cells(pos).size() == 2);
}

TEST_CASE("column-major permutation and symbols") {
  const auto cells = free_cells(cancer());
  const auto p = column_major_order(cells);
  std::vector<std::string> names;
  for (auto i : p) names.push_back(cell_symbol(cells[i]));
  CHECK(names == std::vector<std::string>{"q_11", "q_21", "q_31", "q_51", "q_12", "q_22", "q_42", "q_52"});
  CHECK(cell_symbol({12, 3}) == "q_{12,3}");
}

TEST_CASE("uniform counts keep the zero layout") {
  const auto ones = with_uniform_counts(cancer(), 1);
  CHECK(ones.total() == 8);
  CHECK(ones.structural_zeros() == cancer().structural_zeros());
  CHECK(ones.row_labels() == cancer().row_labels());
}
