#include "toric_bayes/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <set>

#include "toric_bayes/errors.hpp"

namespace toric_bayes {

namespace {

std::string describe(const std::vector<CellIndex>& cells) {
  std::string out;
  for (const auto& c : cells) {
    if (!out.empty()) out += ", ";
    out += "(" + std::to_string(c.row) + "," + std::to_string(c.col) + ")";
  }
  return out;
}

double log_sum_exp(const std::vector<double>& terms) {
  const double peak = *std::max_element(terms.begin(), terms.end());
  if (!std::isfinite(peak)) return peak;
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - peak);
  return peak + std::log(sum);
}

// Dirichlet-multinomial ratio log H(alpha) - log H(alpha + n).
double log_h_ratio(const std::vector<double>& alpha, const std::vector<double>& counts) {
  std::vector<double> posterior(alpha.size());
  for (std::size_t i = 0; i < alpha.size(); ++i) posterior[i] = alpha[i] + counts[i];
  return log_h(alpha) - log_h(posterior);
}

std::vector<std::int64_t> free_counts(const ContingencyTable& table) {
  std::vector<std::int64_t> out;
  for (const auto& c : free_cells(table)) out.push_back(table.count(c));
  return out;
}

// Positive counts at free cells outside `support` make the instance impossible.
void require_consistent(const ContingencyTable& table, const std::vector<CellIndex>& support) {
  const std::set<CellIndex> inside(support.begin(), support.end());
  std::vector<CellIndex> offending;
  for (const auto& c : free_cells(table)) {
    if (!inside.contains(c) && table.count(c) > 0) offending.push_back(c);
  }
  if (!offending.empty()) {
    throw InconsistentInstanceError("positive counts outside the instance support at " +
                                    describe(offending));
  }
}

bool is_full_support(const ModelInstance& inst) { return inst.zero_cell_count == 0; }

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0)) throw InvalidArgument("log_gamma requires a positive argument");
#if defined(__GLIBC__)
  int sign = 0;
  return lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

double log_h(std::span<const double> y) {
  double total = 0.0;
  double denom = 0.0;
  for (double v : y) {
    if (!(v > 0.0)) throw InvalidArgument("H(y) requires positive arguments");
    total += v;
    denom += log_gamma(v);
  }
  if (y.empty()) throw InvalidArgument("H(y) requires at least one argument");
  return log_gamma(total) - denom;
}

double log_multinomial_coefficient(std::span<const std::int64_t> counts) {
  std::int64_t n = 0;
  double denom = 0.0;
  for (auto c : counts) {
    n += c;
    denom += log_gamma(static_cast<double>(c) + 1.0);
  }
  return log_gamma(static_cast<double>(n) + 1.0) - denom;
}

DirichletPrior::DirichletPrior(std::vector<CellIndex> cells, std::vector<double> alpha)
    : cells_(std::move(cells)), alpha_(std::move(alpha)) {
  if (cells_.size() != alpha_.size()) throw InvalidArgument("one alpha per cell required");
  if (cells_.empty()) throw InvalidArgument("Dirichlet prior needs a nonempty support");
  for (double a : alpha_) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      throw InvalidArgument("Dirichlet parameters must be positive and finite");
    }
  }
  if (std::set<CellIndex>(cells_.begin(), cells_.end()).size() != cells_.size()) {
    throw InvalidArgument("duplicate cell in Dirichlet support");
  }
}

DirichletPrior DirichletPrior::uniform(std::vector<CellIndex> cells, double alpha_bar) {
  std::vector<double> alpha(cells.size(), alpha_bar);
  return DirichletPrior(std::move(cells), std::move(alpha));
}

double DirichletPrior::alpha_at(const CellIndex& cell) const {
  const auto it = std::find(cells_.begin(), cells_.end(), cell);
  if (it == cells_.end()) throw InvalidArgument("cell outside the prior's support");
  return alpha_[static_cast<std::size_t>(it - cells_.begin())];
}

double DirichletPrior::total() const {
  double s = 0.0;
  for (double a : alpha_) s += a;
  return s;
}

DirichletPrior restrict_prior(const DirichletPrior& prior, const std::vector<CellIndex>& support) {
  if (support.empty()) throw InvalidArgument("cannot restrict a prior to an empty support");
  const std::set<CellIndex> keep(support.begin(), support.end());
  for (const auto& c : support) prior.alpha_at(c);  // throws if not a subset
  std::vector<CellIndex> cells;
  std::vector<double> alpha;
  for (std::size_t i = 0; i < prior.cells().size(); ++i) {
    if (keep.contains(prior.cells()[i])) {
      cells.push_back(prior.cells()[i]);
      alpha.push_back(prior.alpha()[i]);
    }
  }
  return DirichletPrior(std::move(cells), std::move(alpha));
}

std::vector<double> aggregate_alpha(const DirichletPrior& prior,
                                    const std::vector<std::vector<CellIndex>>& partition) {
  std::set<CellIndex> seen;
  std::vector<double> out;
  for (const auto& block : partition) {
    double sum = 0.0;
    for (const auto& c : block) {
      if (!seen.insert(c).second) {
        throw InvalidArgument("partition blocks overlap at " + describe({c}));
      }
      sum += prior.alpha_at(c);
    }
    out.push_back(sum);
  }
  if (seen.size() != prior.cells().size()) {
    throw InvalidArgument("partition does not cover the prior's support");
  }
  return out;
}

LogMarginal marginal_saturated(const ContingencyTable& table, const DirichletPrior& prior,
                               bool include_coefficient) {
  require_consistent(table, prior.cells());
  std::vector<double> counts;
  for (const auto& c : prior.cells()) counts.push_back(static_cast<double>(table.count(c)));
  double value = log_h_ratio(prior.alpha(), counts);
  if (include_coefficient) value += log_multinomial_coefficient(free_counts(table));
  return {value, "saturated"};
}

std::vector<CellIndex> QiDecomposition::block_cells() const {
  std::vector<CellIndex> out;
  for (int r : block_rows) {
    for (int c : block_cols) out.push_back({r, c});
  }
  return out;
}

std::optional<QiDecomposition> qi_decomposition(const std::vector<CellIndex>& support) {
  std::set<CellIndex> rest(support.begin(), support.end());
  QiDecomposition out;
  bool peeled = true;
  while (peeled) {
    peeled = false;
    std::map<int, int> per_row, per_col;
    for (const auto& c : rest) {
      ++per_row[c.row];
      ++per_col[c.col];
    }
    for (auto it = rest.begin(); it != rest.end();) {
      if (per_row[it->row] == 1 || per_col[it->col] == 1) {
        out.isolated.push_back(*it);
        it = rest.erase(it);
        peeled = true;
      } else {
        ++it;
      }
    }
  }
  std::sort(out.isolated.begin(), out.isolated.end());

  std::set<int> rows, cols;
  for (const auto& c : rest) {
    rows.insert(c.row);
    cols.insert(c.col);
  }
  if (rest.size() != rows.size() * cols.size()) return std::nullopt;
  out.block_rows.assign(rows.begin(), rows.end());
  out.block_cols.assign(cols.begin(), cols.end());
  return out;
}

LogMarginal marginal_qi(const ContingencyTable& table, const DirichletPrior& prior,
                        bool include_coefficient) {
  const auto decomposition = qi_decomposition(prior.cells());
  if (!decomposition) {
    std::vector<CellIndex> offending;
    std::set<CellIndex> rest(prior.cells().begin(), prior.cells().end());
    // Report what is left after peeling isolated cells.
    std::map<int, int> per_row, per_col;
    for (const auto& c : rest) {
      ++per_row[c.row];
      ++per_col[c.col];
    }
    for (const auto& c : rest) {
      if (per_row[c.row] > 1 && per_col[c.col] > 1) offending.push_back(c);
    }
    throw InvalidArgument("quasi-independence support has no row x column block decomposition; "
                          "non-block cells: " + describe(offending));
  }
  require_consistent(table, prior.cells());

  auto count = [&](const CellIndex& c) { return static_cast<double>(table.count(c)); };
  const auto block = decomposition->block_cells();

  // Isolated cells plus the block total.
  std::vector<double> lambda_alpha, lambda_counts;
  for (const auto& c : decomposition->isolated) {
    lambda_alpha.push_back(prior.alpha_at(c));
    lambda_counts.push_back(count(c));
  }
  if (!block.empty()) {
    double a = 0.0, n = 0.0;
    for (const auto& c : block) {
      a += prior.alpha_at(c);
      n += count(c);
    }
    lambda_alpha.push_back(a);
    lambda_counts.push_back(n);
  }
  double value = log_h_ratio(lambda_alpha, lambda_counts);

  if (!block.empty()) {
    std::vector<double> row_alpha, row_counts;
    for (int r : decomposition->block_rows) {
      double a = 0.0, n = 0.0;
      for (int c : decomposition->block_cols) {
        a += prior.alpha_at({r, c});
        n += count({r, c});
      }
      row_alpha.push_back(a);
      row_counts.push_back(n);
    }
    std::vector<double> col_alpha, col_counts;
    for (int c : decomposition->block_cols) {
      double a = 0.0, n = 0.0;
      for (int r : decomposition->block_rows) {
        a += prior.alpha_at({r, c});
        n += count({r, c});
      }
      col_alpha.push_back(a);
      col_counts.push_back(n);
    }
    value += log_h_ratio(row_alpha, row_counts) + log_h_ratio(col_alpha, col_counts);
  }
  if (include_coefficient) value += log_multinomial_coefficient(free_counts(table));
  return {value, "qi-factorized"};
}

std::string_view to_string(EvidenceClass c) {
  switch (c) {
    case EvidenceClass::kSupportsQi:
      return "supports_qi";
    case EvidenceClass::kPoor:
      return "poor";
    case EvidenceClass::kSubstantial:
      return "substantial";
    case EvidenceClass::kStrong:
      return "strong";
    case EvidenceClass::kDecisive:
      return "decisive";
  }
  return "unknown";
}

namespace {

EvidenceClass classify(double lambda) {
  if (lambda <= 0.0) return EvidenceClass::kSupportsQi;
  if (lambda <= 0.5) return EvidenceClass::kPoor;
  if (lambda <= 1.0) return EvidenceClass::kSubstantial;
  if (lambda <= 2.0) return EvidenceClass::kStrong;
  return EvidenceClass::kDecisive;
}

// Posterior from log BF, so an underflowed BF still gives a usable value.
double posterior_from_log(double log_bf, double p) {
  if (p == 1.0) return 1.0;
  if (p == 0.0) return 0.0;
  return 1.0 / (1.0 + std::exp(std::log1p(-p) - std::log(p) - log_bf));
}

}  // namespace

EvidenceClass jeffreys_class(double bf_qi_vs_sz) {
  if (!(bf_qi_vs_sz > 0.0)) throw InvalidArgument("Bayes factor must be positive");
  return classify(-std::log10(bf_qi_vs_sz));
}

double posterior_model_prob(double bf, double prior_prob_qi) {
  if (!(prior_prob_qi >= 0.0 && prior_prob_qi <= 1.0)) {
    throw InvalidArgument("model prior probability must lie in [0,1]");
  }
  if (!(bf > 0.0)) throw InvalidArgument("Bayes factor must be positive");
  if (prior_prob_qi == 1.0) return 1.0;
  const double num = prior_prob_qi * bf;
  return num / (num + (1.0 - prior_prob_qi));
}

std::string_view to_string(BfMode mode) {
  return mode == BfMode::kMixture ? "mixture" : "conventional";
}

namespace {

FamilySummary evaluate_family(const ContingencyTable& table, const InstanceFamily& family,
                              const DirichletPrior& prior, bool qi_model, bool coefficients,
                              std::vector<std::string>& warnings) {
  const auto pos = positive_cells(table);
  FamilySummary summary;
  summary.model_name = family.model_name;
  summary.total_instances = family.total_instances;
  summary.normalizer = family.normalizer;
  for (std::size_t i = 0; i < family.instances.size(); ++i) {
    const auto& inst = family.instances[i];
    const auto cells = inst.support_cells();
    const std::set<CellIndex> inside(cells.begin(), cells.end());
    if (!std::includes(inside.begin(), inside.end(), pos.begin(), pos.end())) continue;

    const auto instance_prior = restrict_prior(prior, cells);
    InstanceTerm term{inst.label, inst.zero_cell_count, family.weights[i], 0.0, ""};
    if (qi_model && (is_full_support(inst) || qi_decomposition(cells))) {
      const auto m = marginal_qi(table, instance_prior, coefficients);
      term.log_marginal = m.value;
      term.marginal_form = m.model_label;
    } else {
      if (qi_model) {
        warnings.push_back("instance " + inst.label +
                           " has no block decomposition; using the saturated marginal");
      }
      const auto m = marginal_saturated(table, instance_prior, coefficients);
      term.log_marginal = m.value;
      term.marginal_form = m.model_label;
    }
    summary.terms.push_back(std::move(term));
  }
  summary.consistent_instances = summary.terms.size();
  if (summary.terms.empty()) {
    throw InconsistentInstanceError("no " + family.model_name +
                                    " instance is consistent with the observed data");
  }
  return summary;
}

double log_mixture(const FamilySummary& summary) {
  std::vector<double> terms;
  for (const auto& t : summary.terms) terms.push_back(std::log(t.weight) + t.log_marginal);
  return log_sum_exp(terms);
}

}  // namespace

BfReport mixture_bayes_factor(const ContingencyTable& table, const InstanceFamily& qi_family,
                              const InstanceFamily& sz_family, const DirichletPrior& prior,
                              const BayesFactorOptions& options) {
  BfReport report;
  report.mode = options.mode;
  report.xi = qi_family.xi;
  report.prior_prob_qi = options.prior_prob_qi;
  const auto& alpha = prior.alpha();
  report.alpha_bar = std::all_of(alpha.begin(), alpha.end(),
                                 [&](double a) { return a == alpha.front(); })
                         ? alpha.front()
                         : std::numeric_limits<double>::quiet_NaN();

  report.qi = evaluate_family(table, qi_family, prior, true, options.include_coefficients,
                              report.warnings);
  report.sz = evaluate_family(table, sz_family, prior, false, options.include_coefficients,
                              report.warnings);
  const double log_mixture_bf = log_mixture(report.qi) - log_mixture(report.sz);
  report.bf_mixture = std::exp(log_mixture_bf);

  const double log_qi0 = marginal_qi(table, prior, options.include_coefficients).value;
  const double log_sz0 = marginal_saturated(table, prior, options.include_coefficients).value;
  report.bf_conventional = std::exp(log_qi0 - log_sz0);

  if (!(options.prior_prob_qi >= 0.0 && options.prior_prob_qi <= 1.0)) {
    throw InvalidArgument("model prior probability must lie in [0,1]");
  }
  const double log_bf = options.mode == BfMode::kMixture ? log_mixture_bf : log_qi0 - log_sz0;
  if (!std::isfinite(log_bf)) throw NumericError("log Bayes factor is not finite");
  report.bf_qi_vs_sz = std::exp(log_bf);
  report.log10_against_qi = -log_bf / std::numbers::ln10;
  report.evidence_class = classify(report.log10_against_qi);
  report.posterior_prob_qi = posterior_from_log(log_bf, options.prior_prob_qi);
  return report;
}

CalibrationReport calibrate_alpha(const ContingencyTable& shape, double xi,
                                  const std::vector<double>& candidates,
                                  const ModelBudget& budget) {
  if (candidates.empty()) throw InvalidArgument("calibration needs at least one candidate");
  const auto imaginary = with_uniform_counts(shape, 1);
  const auto qi = build_qi_model(imaginary, budget);
  const auto sz = build_sz_model(imaginary, budget);
  const auto qi_family =
      consistent_family(instance_prior_weights(qi.instances, xi, qi.name), imaginary);
  const auto sz_family =
      consistent_family(instance_prior_weights(sz.instances, xi, sz.name), imaginary);

  CalibrationReport report;
  report.xi = xi;
  double best_gap = std::numeric_limits<double>::infinity();
  for (double a : candidates) {
    const auto prior = DirichletPrior::uniform(free_cells(imaginary), a);
    const auto bf = mixture_bayes_factor(imaginary, qi_family, sz_family, prior).bf_mixture;
    report.entries.push_back({a, bf});
    if (std::abs(bf - 1.0) < best_gap) {
      best_gap = std::abs(bf - 1.0);
      report.best_alpha = a;
    }
  }
  return report;
}

}  // namespace toric_bayes
