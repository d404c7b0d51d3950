#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "toric_bayes/hilbert.hpp"
#include "toric_bayes/lattice.hpp"
#include "toric_bayes/tables.hpp"

namespace toric_bayes {

/// Bit i set <=> cell i (canonical free-cell order) has positive probability.
using SupportMask = std::uint64_t;

inline constexpr std::size_t kMaxCells = 64;

/// An exponential model on a restricted support of the free cells.
struct ModelInstance {
  SupportMask support = 0;
  /// Number of free cells outside the support.
  int zero_cell_count = 0;
  /// Rows are the support cells; columns the generators positive on them.
  DesignMatrix restricted_design;
  std::string label;

  std::vector<CellIndex> support_cells() const { return restricted_design.cells(); }
  std::size_t free_cell_count() const {
    return restricted_design.rows() + static_cast<std::size_t>(zero_cell_count);
  }
};

struct EnumerationOptions {
  /// Exhaustive over 2^u generator subsets; u above this is a CapacityError.
  std::size_t max_generators = 24;
};

/// Every support obtainable by zeroing a subset of the generator columns of
/// `maximal`, deduplicated, empty support dropped. Ordered by descending
/// support size, then by the support's 0/1 pattern over cell order,
/// descending (earlier cells first).
///
/// Labels: "<model>_0" for the full support, "<model>_<z>_<k>" otherwise with
/// k the 1-based position within its zero-count class.
std::vector<ModelInstance> enumerate_instances(const DesignMatrix& maximal,
                                               const std::string& model_name,
                                               const EnumerationOptions& options = {});

/// Instances whose support contains every positive-count cell. When a
/// zero-count class holds exactly one surviving instance it is relabelled
/// "<model>_<z>" (so the consistent cancer SZ instances read SZ_0 and SZ_1).
std::vector<ModelInstance> consistent_instances(const std::vector<ModelInstance>& instances,
                                                const ContingencyTable& table);

/// Instances with prior weights xi^z (1-xi)^(m-z) / C(xi). Weights and the
/// normalizer always refer to the complete enumeration, so a filtered family
/// keeps the prior mass its members had before filtering.
struct InstanceFamily {
  std::string model_name;
  std::vector<ModelInstance> instances;
  std::vector<double> weights;  // parallel to instances
  double xi = 0.0;
  double normalizer = 0.0;      // C(xi) over the complete enumeration
  std::size_t total_instances = 0;

  double weight(const std::string& label) const;
  double total_weight() const;
};

/// Throws InvalidArgument unless 0 < xi < 1.
InstanceFamily instance_prior_weights(const std::vector<ModelInstance>& instances, double xi,
                                      const std::string& model_name = "");

/// Family restricted to its data-consistent members (relabelled as in
/// consistent_instances), weights unchanged.
InstanceFamily consistent_family(const InstanceFamily& family, const ContingencyTable& table);

std::map<int, std::size_t> count_by_zero_cells(const std::vector<ModelInstance>& instances);

/// Cells of `cells` selected by `mask`.
std::vector<CellIndex> cells_in(SupportMask mask, const std::vector<CellIndex>& cells);

/// Mask over `cells` of the members of `subset`.
SupportMask mask_of(const std::vector<CellIndex>& subset, const std::vector<CellIndex>& cells);

/// Full model pipeline for a table: design -> kernel -> Hilbert basis ->
/// maximal design -> instances.
struct ToricModel {
  std::string name;
  DesignMatrix design;
  KernelBasis kernel;
  HilbertBasis hilbert;
  DesignMatrix maximal;
  std::vector<ModelInstance> instances;
  Diagnostics notes;
};

struct ModelBudget {
  HilbertOptions hilbert;
  EnumerationOptions enumeration;
};

ToricModel build_qi_model(const ContingencyTable& table, const ModelBudget& budget = {});
ToricModel build_sz_model(const ContingencyTable& table, const ModelBudget& budget = {});

}  // namespace toric_bayes
