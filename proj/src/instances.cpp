#include "toric_bayes/instances.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <unordered_set>

#include "toric_bayes/errors.hpp"
#include "toric_bayes/simd/kernels.hpp"

namespace toric_bayes {

namespace {

constexpr std::size_t kLowBits = 12;

// Equal popcounts: the support containing the earliest differing cell first.
bool instance_order(SupportMask a, SupportMask b) {
  const int pa = std::popcount(a), pb = std::popcount(b);
  if (pa != pb) return pa > pb;
  const SupportMask diff = a ^ b;
  if (diff == 0) return false;
  return (a & (diff & (~diff + 1))) != 0;
}

std::vector<SupportMask> subset_unions(const std::vector<SupportMask>& masks) {
  std::vector<SupportMask> out(std::size_t{1} << masks.size(), 0);
  for (std::size_t s = 1; s < out.size(); ++s) {
    const auto low = static_cast<std::size_t>(std::countr_zero(s));
    out[s] = out[s & (s - 1)] | masks[low];
  }
  return out;
}

std::string strip_class_index(const std::string& label) {
  const auto pos = label.rfind('_');
  return pos == std::string::npos ? label : label.substr(0, pos);
}

SupportMask full_mask(std::size_t n) {
  return n == 64 ? ~SupportMask{0} : (SupportMask{1} << n) - 1;
}

}  // namespace

std::vector<CellIndex> cells_in(SupportMask mask, const std::vector<CellIndex>& cells) {
  std::vector<CellIndex> out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (mask >> i & 1U) out.push_back(cells[i]);
  }
  return out;
}

SupportMask mask_of(const std::vector<CellIndex>& subset, const std::vector<CellIndex>& cells) {
  SupportMask mask = 0;
  for (const auto& c : subset) {
    const auto it = std::find(cells.begin(), cells.end(), c);
    if (it == cells.end()) throw InvalidArgument("cell is not among the free cells");
    mask |= SupportMask{1} << static_cast<std::size_t>(it - cells.begin());
  }
  return mask;
}

std::vector<ModelInstance> enumerate_instances(const DesignMatrix& maximal,
                                               const std::string& model_name,
                                               const EnumerationOptions& options) {
  const std::size_t n = maximal.rows();
  const std::size_t u = maximal.cols();
  if (n > kMaxCells) {
    throw CapacityError("instance enumeration supports at most 64 free cells, got " +
                        std::to_string(n));
  }
  if (u > options.max_generators) {
    throw CapacityError("instance enumeration over 2^" + std::to_string(u) +
                        " generator subsets exceeds the cap of 2^" +
                        std::to_string(options.max_generators));
  }

  std::vector<SupportMask> generator_masks(u, 0);
  for (std::size_t j = 0; j < u; ++j) {
    for (std::size_t x = 0; x < n; ++x) {
      if (maximal.at(x, j) > 0) generator_masks[j] |= SupportMask{1} << x;
    }
  }
  const SupportMask all = full_mask(n);
  SupportMask covered = 0;
  for (auto m : generator_masks) covered |= m;
  if (covered != all) {
    throw InvalidArgument("some free cell is not touched by any generator");
  }

  // Union of zeroed generator masks = low-half union | high-half union.
  const std::size_t low_bits = std::min(u, kLowBits);
  const auto low = subset_unions({generator_masks.begin(),
                                  generator_masks.begin() + static_cast<std::ptrdiff_t>(low_bits)});
  const auto high = subset_unions({generator_masks.begin() + static_cast<std::ptrdiff_t>(low_bits),
                                   generator_masks.end()});

  const auto& kernels = simd::active_kernels();
  std::vector<SupportMask> chunk(low.size());
  std::unordered_set<SupportMask> seen;
  for (const SupportMask h : high) {
    kernels.masked_supports(low.data(), low.size(), h, all, chunk.data());
    std::sort(chunk.begin(), chunk.end());
    const auto end = std::unique(chunk.begin(), chunk.end());
    seen.insert(chunk.begin(), end);
  }
  seen.erase(0);

  std::vector<SupportMask> supports(seen.begin(), seen.end());
  std::sort(supports.begin(), supports.end(), instance_order);

  std::vector<ModelInstance> out;
  out.reserve(supports.size());
  std::vector<std::size_t> per_class(n + 1, 0);
  for (const SupportMask s : supports) {
    ModelInstance inst;
    inst.support = s;
    inst.zero_cell_count = static_cast<int>(n) - std::popcount(s);

    std::vector<std::size_t> cols;
    for (std::size_t j = 0; j < u; ++j) {
      if (generator_masks[j] & s) cols.push_back(j);
    }
    std::vector<std::string> names;
    for (auto j : cols) names.push_back(maximal.param_names()[j]);
    std::vector<std::int64_t> entries;
    for (std::size_t x = 0; x < n; ++x) {
      if (!(s >> x & 1U)) continue;
      for (auto j : cols) entries.push_back(maximal.at(x, j));
    }
    inst.restricted_design =
        DesignMatrix(cells_in(s, maximal.cells()), std::move(names), std::move(entries));

    const auto z = static_cast<std::size_t>(inst.zero_cell_count);
    inst.label = z == 0 ? model_name + "_0"
                        : model_name + "_" + std::to_string(z) + "_" +
                              std::to_string(++per_class[z]);
    out.push_back(std::move(inst));
  }
  return out;
}

std::vector<ModelInstance> consistent_instances(const std::vector<ModelInstance>& instances,
                                                const ContingencyTable& table) {
  const auto cells = free_cells(table);
  const auto pos = positive_cells(table);
  const SupportMask required = mask_of({pos.begin(), pos.end()}, cells);

  std::vector<ModelInstance> out;
  for (const auto& inst : instances) {
    if (inst.free_cell_count() != cells.size()) {
      throw InvalidArgument("instance " + inst.label + " does not match the table's cells");
    }
    if ((inst.support & required) == required) out.push_back(inst);
  }
  const auto classes = count_by_zero_cells(out);
  for (auto& inst : out) {
    if (inst.zero_cell_count > 0 && classes.at(inst.zero_cell_count) == 1) {
      inst.label = strip_class_index(inst.label);
    }
  }
  return out;
}

double InstanceFamily::weight(const std::string& label) const {
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (instances[i].label == label) return weights[i];
  }
  throw InvalidArgument("no instance labelled " + label + " in family " + model_name);
}

double InstanceFamily::total_weight() const {
  double sum = 0.0;
  for (double w : weights) sum += w;
  return sum;
}

InstanceFamily instance_prior_weights(const std::vector<ModelInstance>& instances, double xi,
                                      const std::string& model_name) {
  if (!(xi > 0.0 && xi < 1.0)) {
    throw InvalidArgument("xi must lie in (0,1), got " + std::to_string(xi));
  }
  if (instances.empty()) throw InvalidArgument("cannot weight an empty instance family");
  const std::size_t m = instances.front().free_cell_count();

  std::vector<double> log_w;
  log_w.reserve(instances.size());
  for (const auto& inst : instances) {
    if (inst.free_cell_count() != m) {
      throw InvalidArgument("instances of one family must share the free cell set");
    }
    const double z = inst.zero_cell_count;
    log_w.push_back(z * std::log(xi) + (static_cast<double>(m) - z) * std::log1p(-xi));
  }
  const double peak = *std::max_element(log_w.begin(), log_w.end());
  double scaled = 0.0;
  for (double v : log_w) scaled += std::exp(v - peak);
  const double log_c = peak + std::log(scaled);

  InstanceFamily family;
  family.model_name = model_name;
  family.instances = instances;
  family.xi = xi;
  family.normalizer = std::exp(log_c);
  family.total_instances = instances.size();
  for (double v : log_w) family.weights.push_back(std::exp(v - log_c));
  return family;
}

InstanceFamily consistent_family(const InstanceFamily& family, const ContingencyTable& table) {
  const auto kept = consistent_instances(family.instances, table);
  InstanceFamily out = family;
  out.instances.clear();
  out.weights.clear();
  std::size_t next = 0;
  for (const auto& inst : kept) {
    while (family.instances[next].support != inst.support) ++next;
    out.instances.push_back(inst);
    out.weights.push_back(family.weights[next]);
  }
  return out;
}

std::map<int, std::size_t> count_by_zero_cells(const std::vector<ModelInstance>& instances) {
  std::map<int, std::size_t> out;
  for (const auto& inst : instances) ++out[inst.zero_cell_count];
  return out;
}

namespace {

ToricModel complete_model(std::string name, DesignMatrix design, const ModelBudget& budget,
                          Diagnostics notes) {
  ToricModel model;
  model.name = std::move(name);
  model.design = std::move(design);
  model.notes = std::move(notes);
  model.kernel = integer_kernel(model.design);
  if (!model.kernel.homogeneous()) {
    model.notes.push_back("all-ones vector is not in the column span of the " + model.name +
                          " design; binomials are not homogeneous");
  }
  model.hilbert = hilbert_basis(model.kernel, budget.hilbert);
  model.maximal = maximal_design(model.hilbert);
  model.instances = enumerate_instances(model.maximal, model.name, budget.enumeration);
  return model;
}

}  // namespace

ToricModel build_qi_model(const ContingencyTable& table, const ModelBudget& budget) {
  Diagnostics notes;
  auto design = build_qi_design(table, &notes);
  return complete_model("QI", std::move(design), budget, std::move(notes));
}

ToricModel build_sz_model(const ContingencyTable& table, const ModelBudget& budget) {
  return complete_model("SZ", build_saturated_design(table), budget, {});
}

}  // namespace toric_bayes
