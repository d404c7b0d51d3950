#include "toric_bayes/hilbert.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <numeric>

#include "toric_bayes/errors.hpp"
#include "toric_bayes/simd/kernels.hpp"

namespace toric_bayes {

namespace {

// Lifted entries stay well inside int32 so a single add cannot overflow.
constexpr std::int64_t kEntryLimit = std::int64_t{1} << 30;

// Working set of lifted vectors (x | K^T x), stored in zero-padded rows.
class LiftedPool {
 public:
  LiftedPool(std::size_t cells, std::size_t constraints)
      : cells_(cells), width_(cells + constraints), stride_(simd::padded_width(width_)) {}

  std::size_t size() const noexcept { return count_; }
  std::size_t stride() const noexcept { return stride_; }
  const std::int32_t* data() const noexcept { return data_.data(); }
  const std::int32_t* row(std::size_t i) const { return data_.data() + i * stride_; }
  const std::int32_t* lift(std::size_t i) const { return row(i) + cells_; }
  std::size_t constraints() const noexcept { return width_ - cells_; }

  void push(const std::vector<std::int32_t>& v) {
    data_.insert(data_.end(), v.begin(), v.end());
    ++count_;
  }

  std::vector<std::int32_t> blank() const { return std::vector<std::int32_t>(stride_, 0); }

 private:
  std::size_t cells_;
  std::size_t width_;
  std::size_t stride_;
  std::size_t count_ = 0;
  std::vector<std::int32_t> data_;
};

bool all_zero(const std::vector<std::int32_t>& v) {
  return std::all_of(v.begin(), v.end(), [](std::int32_t x) { return x == 0; });
}

bool dominates(const std::vector<std::int64_t>& big, const std::vector<std::int64_t>& small) {
  for (std::size_t i = 0; i < big.size(); ++i) {
    if (big[i] < small[i]) return false;
  }
  return true;
}

std::int64_t dot(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), std::int64_t{0});
}

std::string render(const std::vector<std::int64_t>& v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out + ")";
}

}  // namespace

HilbertBasis hilbert_basis(const KernelBasis& kernel, const HilbertOptions& options) {
  const std::size_t n = kernel.cells.size();
  const std::size_t r = kernel.rank();
  const auto& kernels = simd::active_kernels();
  LiftedPool pool(n, r);

  for (std::size_t i = 0; i < n; ++i) {
    auto v = pool.blank();
    v[i] = 1;
    for (std::size_t j = 0; j < r; ++j) {
      const std::int64_t k = kernel.vectors[j][i];
      if (k <= -kEntryLimit || k >= kEntryLimit) {
        throw CapacityError("kernel entry too large for the Hilbert completion");
      }
      v[n + j] = static_cast<std::int32_t>(k);
    }
    pool.push(v);
  }

  std::deque<std::pair<std::size_t, std::size_t>> pending;
  for (std::size_t b = 1; b < n; ++b) {
    for (std::size_t a = 0; a < b; ++a) pending.emplace_back(a, b);
  }

  std::uint64_t examined = 0;
  while (!pending.empty()) {
    const auto [a, b] = pending.front();
    pending.pop_front();
    if (++examined > options.max_pairs) {
      throw CapacityError("Hilbert completion exceeded its budget of " +
                          std::to_string(options.max_pairs) + " critical pairs");
    }
    // A sum of sign-compatible elements reduces to zero by either summand.
    if (kernels.sign_compatible(pool.lift(a), pool.lift(b), r)) continue;

    auto s = pool.blank();
    const std::int32_t* ra = pool.row(a);
    const std::int32_t* rb = pool.row(b);
    for (std::size_t i = 0; i < s.size(); ++i) {
      const std::int64_t sum = std::int64_t{ra[i]} + rb[i];
      if (sum <= -kEntryLimit || sum >= kEntryLimit) {
        throw CapacityError("Hilbert completion entry exceeded the 2^30 range");
      }
      s[i] = static_cast<std::int32_t>(sum);
    }
    while (true) {
      const auto hit = kernels.find_reducer(pool.data(), pool.size(), pool.stride(), s.data());
      if (hit < 0) break;
      const std::int32_t* g = pool.row(static_cast<std::size_t>(hit));
      for (std::size_t i = 0; i < s.size(); ++i) s[i] -= g[i];
    }
    if (all_zero(s)) continue;

    if (pool.size() >= options.max_elements) {
      throw CapacityError("Hilbert completion exceeded its budget of " +
                          std::to_string(options.max_elements) + " working elements");
    }
    const std::size_t added = pool.size();
    pool.push(s);
    for (std::size_t i = 0; i < added; ++i) pending.emplace_back(i, added);
  }

  std::vector<std::vector<std::int64_t>> solutions;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const std::int32_t* lift = pool.lift(i);
    if (!std::all_of(lift, lift + r, [](std::int32_t v) { return v == 0; })) continue;
    solutions.emplace_back(pool.row(i), pool.row(i) + n);
  }
  std::sort(solutions.begin(), solutions.end());
  solutions.erase(std::unique(solutions.begin(), solutions.end()), solutions.end());

  HilbertBasis out{kernel.cells, {}};
  for (std::size_t i = 0; i < solutions.size(); ++i) {
    const bool reducible = std::any_of(solutions.begin(), solutions.end(), [&](const auto& o) {
      return &o != &solutions[i] && dominates(solutions[i], o);
    });
    if (!reducible) out.generators.push_back(solutions[i]);
  }
  return out;
}

HilbertVerification verify_hilbert(const HilbertBasis& basis, const KernelBasis& kernel,
                                   int bound) {
  HilbertVerification report;
  const auto& gens = basis.generators;
  const std::size_t n = basis.cells.size();

  for (std::size_t g = 0; g < gens.size() && report.orthogonality.passed; ++g) {
    const bool nonneg = std::all_of(gens[g].begin(), gens[g].end(),
                                    [](std::int64_t v) { return v >= 0; });
    const bool nonzero = std::any_of(gens[g].begin(), gens[g].end(),
                                     [](std::int64_t v) { return v != 0; });
    if (gens[g].size() != n || !nonneg || !nonzero) {
      report.orthogonality = {false, "generator " + std::to_string(g + 1) +
                                         " is not a nonzero nonnegative vector",
                              gens[g]};
      break;
    }
    for (std::size_t k = 0; k < kernel.rank(); ++k) {
      if (dot(gens[g], kernel.vectors[k]) != 0) {
        report.orthogonality = {false, "generator " + std::to_string(g + 1) +
                                           " is not orthogonal to kernel vector " +
                                           std::to_string(k + 1),
                                gens[g]};
        break;
      }
    }
  }

  for (std::size_t g = 0; g < gens.size() && report.minimality.passed; ++g) {
    for (std::size_t a = 0; a < gens.size(); ++a) {
      if (a == g || !dominates(gens[g], gens[a])) continue;
      report.minimality = {false, "generator " + std::to_string(g + 1) + " " +
                                      render(gens[g]) + " is reducible by generator " +
                                      std::to_string(a + 1) + " " + render(gens[a]),
                           gens[g]};
      break;
    }
  }

  std::map<std::vector<std::int64_t>, bool> memo;
  std::function<bool(const std::vector<std::int64_t>&)> decomposable =
      [&](const std::vector<std::int64_t>& t) -> bool {
    if (std::all_of(t.begin(), t.end(), [](std::int64_t v) { return v == 0; })) return true;
    if (auto it = memo.find(t); it != memo.end()) return it->second;
    bool ok = false;
    for (const auto& g : gens) {
      if (!dominates(t, g)) continue;
      std::vector<std::int64_t> rest(t.size());
      for (std::size_t i = 0; i < t.size(); ++i) rest[i] = t[i] - g[i];
      if (decomposable(rest)) {
        ok = true;
        break;
      }
    }
    memo.emplace(t, ok);
    return ok;
  };

  // Enumerate by increasing total so the first witness is of minimal degree.
  std::vector<std::int64_t> t(n, 0);
  std::function<bool(std::size_t, int)> visit = [&](std::size_t pos, int remaining) -> bool {
    if (pos + 1 == n) {
      t[pos] = remaining;
      bool orthogonal = true;
      for (const auto& k : kernel.vectors) orthogonal = orthogonal && dot(t, k) == 0;
      if (orthogonal && !decomposable(t)) {
        report.completeness = {false, "vector " + render(t) +
                                          " is not a nonnegative combination of generators",
                               t};
        return false;
      }
      return true;
    }
    for (int v = remaining; v >= 0; --v) {
      t[pos] = v;
      if (!visit(pos + 1, remaining - v)) return false;
    }
    return true;
  };
  if (n > 0) {
    for (int total = 1; total <= bound; ++total) {
      if (!visit(0, total)) break;
    }
  }
  return report;
}

DesignMatrix maximal_design(const HilbertBasis& basis) {
  const std::size_t u = basis.size();
  std::vector<std::string> names;
  for (std::size_t j = 0; j < u; ++j) names.push_back("zeta_" + std::to_string(j + 1));
  std::vector<std::int64_t> entries(basis.cells.size() * u);
  for (std::size_t x = 0; x < basis.cells.size(); ++x) {
    for (std::size_t j = 0; j < u; ++j) entries[x * u + j] = basis.generators[j][x];
  }
  return DesignMatrix(basis.cells, std::move(names), std::move(entries));
}

}  // namespace toric_bayes
