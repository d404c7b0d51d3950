#include <doctest.h>

#include <numeric>
#include <random>
#include <set>

#include "toric_bayes/errors.hpp"
#include "toric_bayes/hilbert.hpp"

using namespace toric_bayes;

namespace {

using Vec = std::vector<std::int64_t>;

ContingencyTable load(const char* name) {
  return load_table_file(std::string(TORIC_BAYES_DATA_DIR) + "/" + name);
}

Vec indicator(const std::vector<CellIndex>& cells, std::initializer_list<CellIndex> on) {
  Vec v(cells.size(), 0);
  for (const auto& c : on) v[static_cast<std::size_t>(std::find(cells.begin(), cells.end(), c) - cells.begin())] = 1;
  return v;
}

std::set<Vec> as_set(const HilbertBasis& h) { return {h.generators.begin(), h.generators.end()}; }

KernelBasis cancer_kernel() { return integer_kernel(build_qi_design(load("cancer.json"))); }

// Irreducible nonzero t >= 0 with t . k = 0 and sum(t) <= bound.
std::set<Vec> brute_force_irreducibles(const KernelBasis& k, int bound) {
  const std::size_t n = k.cells.size();
  std::vector<Vec> members;
  Vec t(n, 0);
  for (;;) {
    const auto total = std::accumulate(t.begin(), t.end(), std::int64_t{0});
    if (total > 0 && total <= bound) {
      bool ok = true;
      for (const auto& v : k.vectors) ok = ok && std::inner_product(t.begin(), t.end(), v.begin(), std::int64_t{0}) == 0;
      if (ok) members.push_back(t);
    }
    std::size_t i = 0;
    while (i < n && t[i] == bound) t[i++] = 0;
    if (i == n) break;
    ++t[i];
  }
  std::set<Vec> all(members.begin(), members.end()), irreducible;
  for (const auto& m : members) {
    bool reducible = false;
    for (const auto& a : members) {
      if (a == m) continue;
      Vec b(n);
      bool nonneg = true;
      for (std::size_t i = 0; i < n; ++i) nonneg = nonneg && (b[i] = m[i] - a[i]) >= 0;
      if (nonneg && all.count(b)) {
        reducible = true;
        break;
      }
    }
    if (!reducible) irreducible.insert(m);
  }
  return irreducible;
}

}  // namespace

TEST_CASE("cancer Hilbert basis matches the reference maximal design") {
  const auto k = cancer_kernel();
  const auto h = hilbert_basis(k);
  const auto& c = k.cells;
  const std::set<Vec> expected = {
      indicator(c, {{3, 1}}),
      indicator(c, {{4, 2}}),
      indicator(c, {{2, 1}, {2, 2}}),
      indicator(c, {{5, 1}, {5, 2}}),
      indicator(c, {{1, 1}, {1, 2}}),
      indicator(c, {{1, 2}, {2, 2}, {5, 2}}),
      indicator(c, {{1, 1}, {2, 1}, {5, 1}}),
  };
  CHECK(h.size() == 7);
  CHECK(as_set(h) == expected);
  CHECK(std::is_sorted(h.generators.begin(), h.generators.end()));

  const auto m = maximal_design(h);
  CHECK(m.cols() == 7);
  CHECK(m.param_names().front() == "zeta_1");
  for (std::size_t j = 0; j < m.cols(); ++j) {
    for (const auto& v : k.vectors) {
      const auto col = m.column(j);
      CHECK(std::inner_product(col.begin(), col.end(), v.begin(), std::int64_t{0}) == 0);
    }
  }
}

TEST_CASE("empty kernel gives unit vectors and the identity design") {
  const auto t = load("cancer.json");
  const auto k = integer_kernel(build_saturated_design(t));
  const auto h = hilbert_basis(k);
  REQUIRE(h.size() == 8);
  const auto m = maximal_design(h);
  for (std::size_t i = 0; i < 8; ++i) {
    for (std::size_t j = 0; j < 8; ++j) CHECK(m.at(i, m.cols() - 1 - j) == (i == j ? 1 : 0));
  }
  CHECK(exact_rank(m) == 8);
}

TEST_CASE("2x2 independence basis agrees with brute force") {
  const ContingencyTable full({"a", "b"}, {"x", "y"}, {1, 1, 1, 1});
  const auto k = integer_kernel(build_qi_design(full));
  const auto h = hilbert_basis(k);
  const auto expected = brute_force_irreducibles(k, 4);
  CHECK(expected.size() == 4);
  CHECK(as_set(h) == expected);
  CHECK(as_set(h) == std::set<Vec>{{1, 1, 0, 0}, {0, 0, 1, 1}, {1, 0, 1, 0}, {0, 1, 0, 1}});
  CHECK(verify_hilbert(h, k, 6).passed());
}

TEST_CASE("brute force agrees on small random kernels") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 3 + rng() % 2;
    std::vector<CellIndex> cells;
    for (std::size_t i = 0; i < n; ++i) cells.push_back({1, static_cast<int>(i + 1)});
    Vec v(n);
    for (auto& x : v) x = static_cast<std::int64_t>(rng() % 5) - 2;
    if (std::all_of(v.begin(), v.end(), [](auto x) { return x == 0; })) continue;
    const KernelBasis k{cells, {v}};
    const auto h = hilbert_basis(k);
    std::int64_t largest = 0;
    for (const auto& g : h.generators) largest = std::max(largest, std::accumulate(g.begin(), g.end(), std::int64_t{0}));
    if (largest > 5) continue;
    CAPTURE(v);
    CHECK(as_set(h) == brute_force_irreducibles(k, 5));
  }
}

TEST_CASE("verification detects missing and redundant generators") {
  const auto k = cancer_kernel();
  const auto h = hilbert_basis(k);
  const auto ok = verify_hilbert(h, k, 4);
  CHECK(ok.orthogonality.passed);
  CHECK(ok.minimality.passed);
  CHECK(ok.completeness.passed);

  auto missing = h;
  const auto removed = missing.generators[3];
  missing.generators.erase(missing.generators.begin() + 3);
  const auto r1 = verify_hilbert(missing, k, 4);
  CHECK_FALSE(r1.completeness.passed);
  CHECK(r1.completeness.witness == removed);

  auto redundant = h;
  Vec sum(h.generators[0].size());
  for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = h.generators[0][i] + h.generators[1][i];
  redundant.generators.push_back(sum);
  const auto r2 = verify_hilbert(redundant, k, 4);
  CHECK_FALSE(r2.minimality.passed);
  CHECK_FALSE(r2.minimality.detail.empty());

  auto skew = h;
  skew.generators.push_back(Vec(sum.size(), 0));
  skew.generators.back()[0] = 1;
  CHECK_FALSE(verify_hilbert(skew, k, 4).orthogonality.passed);
}

TEST_CASE("basis is independent of the kernel presentation") {
  const auto k = cancer_kernel();
  const auto h = hilbert_basis(k);

  auto swapped = k;
  std::swap(swapped.vectors[0], swapped.vectors[1]);
  CHECK(hilbert_basis(swapped) == h);

  auto negated = k;
  for (auto& x : negated.vectors[0]) x = -x;
  CHECK(hilbert_basis(negated) == h);

  CHECK(hilbert_basis(canonical_kernel(k.cells, k.vectors)) == h);

  auto mixed = k;
  for (std::size_t i = 0; i < mixed.vectors[0].size(); ++i) mixed.vectors[0][i] += 2 * k.vectors[1][i];
  CHECK(hilbert_basis(mixed) == h);
}

TEST_CASE("idempotence through the maximal design") {
  for (const char* name : {"cancer.json", "small_2x2.json"}) {
    const auto k = integer_kernel(build_qi_design(load(name)));
    const auto h = hilbert_basis(k);
    const auto again = integer_kernel(maximal_design(h));
    CHECK(canonical_kernel(again.cells, again.vectors) == canonical_kernel(k.cells, k.vectors));
    CHECK(hilbert_basis(again) == h);
  }
}

TEST_CASE("every generator subset gives a point on the binomial variety") {
  const auto k = cancer_kernel();
  const auto h = hilbert_basis(k);
  const auto eqs = kernel_binomials(k);
  std::mt19937_64 rng(2);
  for (std::uint32_t mask = 0; mask < (1u << h.size()); ++mask) {
    std::vector<mpq_class> zeta(h.size());
    for (std::size_t j = 0; j < h.size(); ++j) {
      zeta[j] = (mask >> j & 1) ? mpq_class(0) : mpq_class(static_cast<long>(1 + rng() % 9), static_cast<long>(1 + rng() % 7));
      zeta[j].canonicalize();
    }
    std::vector<mpq_class> q(k.cells.size(), 1);
    for (std::size_t x = 0; x < q.size(); ++x) {
      for (std::size_t j = 0; j < h.size(); ++j) {
        for (std::int64_t e = 0; e < h.generators[j][x]; ++e) q[x] *= zeta[j];
      }
    }
    CHECK(satisfies_binomials_exact(q, k.cells, eqs));
  }
}

TEST_CASE("budgets raise capacity errors") {
  const auto k = cancer_kernel();
  HilbertOptions tiny;
  tiny.max_elements = 5;
  CHECK_THROWS_AS(hilbert_basis(k, tiny), CapacityError);
  HilbertOptions few_pairs;
  few_pairs.max_pairs = 3;
  CHECK_THROWS_AS(hilbert_basis(k, few_pairs), CapacityError);
}

TEST_CASE("shipped tables pass verification") {
  for (const char* name : {"cancer.json", "small_2x2.json", "ones_2x2.json"}) {
    const auto t = load(name);
    for (const auto& design : {build_qi_design(t), build_saturated_design(t)}) {
      const auto k = integer_kernel(design);
      CHECK(verify_hilbert(hilbert_basis(k), k, 4).passed());
    }
  }
}
