#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "toric_bayes/bayes.hpp"
#include "toric_bayes/instances.hpp"
#include "toric_bayes/tables.hpp"

namespace toric_bayes {

inline constexpr const char* kVersion = "1.0.0";

using Json = nlohmann::ordered_json;

/// Budgets, optionally overridden by TORIC_BAYES_BUDGET, a comma-separated
/// list of key=value with keys hilbert_elements, hilbert_pairs,
/// instance_generators. Throws ParseError on a malformed value.
ModelBudget budget_from_env();
ModelBudget parse_budget(const std::string& spec, ModelBudget base = {});

struct AnalyzeOptions {
  std::string input;
  double xi = 0.1;
  double alpha = 1.0;
  /// Optional per-cell alpha file: {"alpha": [[number|null]]}, null exactly
  /// at structural zeros.
  std::optional<std::string> alpha_file;
  double model_prior = 0.5;
  BfMode mode = BfMode::kMixture;
  ModelBudget budget;
};

struct WeightRow {
  double xi = 0.0;
  std::vector<std::pair<std::string, double>> weights;  // consistent instances
};

struct AnalysisReport {
  explicit AnalysisReport(ContingencyTable t) : table(std::move(t)) {}

  ContingencyTable table;
  std::vector<CellIndex> cells;
  std::vector<std::string> qi_binomials;
  std::size_t hilbert_generators = 0;
  std::size_t qi_instances = 0;
  std::size_t qi_consistent = 0;
  std::size_t sz_instances = 0;
  std::size_t sz_consistent = 0;
  WeightRow weights;
  BfReport bf;
  std::vector<std::string> notes;
};

AnalysisReport run_analyze(const AnalyzeOptions& options);

Json to_json(const AnalysisReport& report);
std::string to_text(const AnalysisReport& report);

/// Schema check for the analyze JSON document. Empty result means valid.
std::vector<std::string> validate_report_json(const Json& doc);

/// Per-cell alpha grid for `table` ({"alpha": [[number|null]]}).
DirichletPrior load_alpha_file(const std::string& path, const ContingencyTable& table);

enum class ModelKind { kQi, kSz };

ModelKind parse_model_kind(const std::string& name);

/// {cells, basis_vectors, binomials_as_strings, homogeneous, warnings}
Json run_kernel(const ContingencyTable& table, ModelKind model);
/// {generators, param_names, cell_order}
Json run_hilbert(const ContingencyTable& table, ModelKind model, const ModelBudget& budget);
/// {model, count, by_zero_cells, instances: [{label, support, z}]}
Json run_instances(const ContingencyTable& table, ModelKind model, const ModelBudget& budget,
                   const ContingencyTable* consistent_with = nullptr);
/// {xi, results: [{alpha, bf}], best_alpha}
Json run_calibrate(const ContingencyTable& shape, double xi, const std::vector<double>& alphas,
                   const ModelBudget& budget);

}  // namespace toric_bayes
