#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "toric_bayes/instances.hpp"
#include "toric_bayes/tables.hpp"

namespace toric_bayes {

/// log Gamma(x) for x > 0. Reentrant (does not touch the global signgam).
double log_gamma(double x);

/// log H(y) = log Gamma(sum y) - sum log Gamma(y_t). Throws InvalidArgument
/// on a nonpositive argument.
double log_h(std::span<const double> y);

/// log N! - sum log n_x! over the given counts.
double log_multinomial_coefficient(std::span<const std::int64_t> counts);

/// Dirichlet prior over an ordered set of cells.
class DirichletPrior {
 public:
  DirichletPrior(std::vector<CellIndex> cells, std::vector<double> alpha);

  /// alpha_x = alpha_bar on every cell.
  static DirichletPrior uniform(std::vector<CellIndex> cells, double alpha_bar);

  const std::vector<CellIndex>& cells() const noexcept { return cells_; }
  const std::vector<double>& alpha() const noexcept { return alpha_; }
  double alpha_at(const CellIndex& cell) const;
  double total() const;

 private:
  std::vector<CellIndex> cells_;
  std::vector<double> alpha_;
};

/// Natural-log marginal likelihood of the observed counts under one instance.
struct LogMarginal {
  double value = 0.0;
  std::string model_label;
};

/// Drop the alpha entries outside `support` (conditioning on a face).
DirichletPrior restrict_prior(const DirichletPrior& prior, const std::vector<CellIndex>& support);

/// Block sums of alpha. Blocks must be disjoint and cover the prior's cells.
std::vector<double> aggregate_alpha(const DirichletPrior& prior,
                                    const std::vector<std::vector<CellIndex>>& partition);

/// Multinomial-Dirichlet marginal over prior.cells(). Counts at free cells
/// outside the support must be zero (InconsistentInstanceError otherwise).
LogMarginal marginal_saturated(const ContingencyTable& table, const DirichletPrior& prior,
                               bool include_coefficient = true);

/// How a quasi-independence support factors: cells alone in their row or
/// column (peeled repeatedly) and a complete rows x cols block of the rest.
struct QiDecomposition {
  std::vector<CellIndex> isolated;
  std::vector<int> block_rows;
  std::vector<int> block_cols;

  std::vector<CellIndex> block_cells() const;
};

/// nullopt when the cells left after peeling do not form a complete block.
std::optional<QiDecomposition> qi_decomposition(const std::vector<CellIndex>& support);

/// Quasi-independence marginal on prior.cells(): multinomial coefficient times
/// three independent Dirichlet-multinomial ratios over (isolated cells, block
/// total), block row sums, and block column sums. Throws InvalidArgument naming
/// the offending cells if the support has no block decomposition.
LogMarginal marginal_qi(const ContingencyTable& table, const DirichletPrior& prior,
                        bool include_coefficient = true);

enum class EvidenceClass { kSupportsQi, kPoor, kSubstantial, kStrong, kDecisive };

std::string_view to_string(EvidenceClass c);

/// Jeffreys scale on lambda = log10(1/bf): (0,0.5] poor, (0.5,1] substantial,
/// (1,2] strong, above 2 decisive; lambda <= 0 supports QI.
EvidenceClass jeffreys_class(double bf_qi_vs_sz);

/// p*bf / (p*bf + 1 - p)
double posterior_model_prob(double bf, double prior_prob_qi);

enum class BfMode { kMixture, kConventional };

std::string_view to_string(BfMode mode);

struct InstanceTerm {
  std::string label;
  int zero_cells = 0;
  double weight = 0.0;
  double log_marginal = 0.0;
  std::string marginal_form;  // "qi-factorized" or "saturated"
};

struct FamilySummary {
  std::string model_name;
  std::size_t total_instances = 0;
  std::size_t consistent_instances = 0;
  double normalizer = 0.0;
  std::vector<InstanceTerm> terms;
};

struct BfReport {
  BfMode mode = BfMode::kMixture;
  /// Headline BF(QI:SZ) for `mode`.
  double bf_qi_vs_sz = 0.0;
  double bf_mixture = 0.0;
  double bf_conventional = 0.0;
  double log10_against_qi = 0.0;
  EvidenceClass evidence_class = EvidenceClass::kPoor;
  double prior_prob_qi = 0.5;
  double posterior_prob_qi = 0.0;
  FamilySummary qi;
  FamilySummary sz;
  double xi = 0.0;
  double alpha_bar = 0.0;  // NaN when a per-cell prior was supplied
  std::vector<std::string> warnings;
};

struct BayesFactorOptions {
  BfMode mode = BfMode::kMixture;
  double prior_prob_qi = 0.5;
  bool include_coefficients = true;
};

/// Mixture Bayes factor sum_h q_h m_h(QI) / sum_h q_h m_h(SZ) over the
/// data-consistent members of each family (log-sum-exp), plus the
/// conventional full-support ratio m_QI0 / m_SZ0.
BfReport mixture_bayes_factor(const ContingencyTable& table, const InstanceFamily& qi_family,
                              const InstanceFamily& sz_family, const DirichletPrior& prior,
                              const BayesFactorOptions& options = {});

struct CalibrationEntry {
  double alpha_bar = 0.0;
  double bf = 0.0;
};

struct CalibrationReport {
  double xi = 0.0;
  std::vector<CalibrationEntry> entries;
  double best_alpha = 0.0;
};

/// Imaginary training sample: one count in every free cell of `shape`. For
/// each candidate alpha_bar, the mixture BF(QI:SZ) on that sample; the winner
/// minimizes |BF - 1| (first candidate on ties).
CalibrationReport calibrate_alpha(const ContingencyTable& shape, double xi,
                                  const std::vector<double>& candidates,
                                  const ModelBudget& budget = {});

}  // namespace toric_bayes
