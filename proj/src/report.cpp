#include "toric_bayes/report.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "toric_bayes/errors.hpp"

namespace toric_bayes {

namespace {

Json cell_json(const CellIndex& c) { return Json::array({c.row, c.col}); }

Json cells_json(const std::vector<CellIndex>& cells) {
  auto out = Json::array();
  for (const auto& c : cells) out.push_back(cell_json(c));
  return out;
}

// NaN (per-cell prior) serializes as null.
Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

ToricModel build_model(const ContingencyTable& table, ModelKind model, const ModelBudget& budget) {
  return model == ModelKind::kQi ? build_qi_model(table, budget) : build_sz_model(table, budget);
}

Json family_json(const FamilySummary& f) {
  Json out;
  out["model_name"] = f.model_name;
  out["total_instances"] = f.total_instances;
  out["consistent_instances"] = f.consistent_instances;
  out["normalizer"] = f.normalizer;
  auto terms = Json::array();
  for (const auto& t : f.terms) {
    Json term;
    term["label"] = t.label;
    term["z"] = t.zero_cells;
    term["weight"] = t.weight;
    term["log_marginal"] = t.log_marginal;
    term["marginal_form"] = t.marginal_form;
    terms.push_back(std::move(term));
  }
  out["terms"] = std::move(terms);
  return out;
}

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::string general(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

}  // namespace

ModelBudget parse_budget(const std::string& spec, ModelBudget base) {
  std::istringstream in(spec);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ParseError("budget entry \"" + item + "\" lacks '='");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    unsigned long long n = 0;
    try {
      std::size_t used = 0;
      if (value.empty() || !std::isdigit(static_cast<unsigned char>(value.front()))) {
        throw std::invalid_argument(value);
      }
      n = std::stoull(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw ParseError("budget value \"" + value + "\" is not a nonnegative integer");
    }
    if (key == "hilbert_elements") {
      base.hilbert.max_elements = n;
    } else if (key == "hilbert_pairs") {
      base.hilbert.max_pairs = n;
    } else if (key == "instance_generators") {
      base.enumeration.max_generators = n;
    } else {
      throw ParseError("unknown budget key \"" + key + "\"");
    }
  }
  return base;
}

ModelBudget budget_from_env() {
  if (const char* spec = std::getenv("TORIC_BAYES_BUDGET")) return parse_budget(spec);
  return {};
}

DirichletPrior load_alpha_file(const std::string& path, const ContingencyTable& table) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open alpha file " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed alpha file: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("alpha") || !doc["alpha"].is_array() ||
      doc["alpha"].size() != static_cast<std::size_t>(table.rows())) {
    throw ParseError("alpha file must hold {\"alpha\": [[number|null]]} matching the table");
  }
  std::vector<CellIndex> cells;
  std::vector<double> alpha;
  for (int r = 1; r <= table.rows(); ++r) {
    const auto& row = doc["alpha"][static_cast<std::size_t>(r - 1)];
    if (!row.is_array() || row.size() != static_cast<std::size_t>(table.cols())) {
      throw ParseError("alpha row " + std::to_string(r) + " has the wrong length");
    }
    for (int c = 1; c <= table.cols(); ++c) {
      const auto& v = row[static_cast<std::size_t>(c - 1)];
      if (table.is_structural_zero({r, c})) {
        if (!v.is_null()) throw ParseError("alpha must be null at structural zeros");
        continue;
      }
      if (!v.is_number()) throw ParseError("alpha must be numeric at free cells");
      cells.push_back({r, c});
      alpha.push_back(v.get<double>());
    }
  }
  try {
    return DirichletPrior(std::move(cells), std::move(alpha));
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what());
  }
}

ModelKind parse_model_kind(const std::string& name) {
  if (name == "qi" || name == "QI") return ModelKind::kQi;
  if (name == "sz" || name == "SZ") return ModelKind::kSz;
  throw ParseError("unknown model \"" + name + "\" (expected qi or sz)");
}

AnalysisReport run_analyze(const AnalyzeOptions& options) {
  const auto table = load_table_file(options.input);
  AnalysisReport report(table);
  report.cells = free_cells(table);

  const auto qi = build_qi_model(table, options.budget);
  const auto sz = build_sz_model(table, options.budget);
  report.notes = qi.notes;
  for (const auto& eq : kernel_binomials(qi.kernel)) report.qi_binomials.push_back(eq.to_string());
  report.hilbert_generators = qi.hilbert.size();
  report.qi_instances = qi.instances.size();
  report.sz_instances = sz.instances.size();

  const auto qi_family =
      consistent_family(instance_prior_weights(qi.instances, options.xi, qi.name), table);
  const auto sz_family =
      consistent_family(instance_prior_weights(sz.instances, options.xi, sz.name), table);
  report.qi_consistent = qi_family.instances.size();
  report.sz_consistent = sz_family.instances.size();

  report.weights.xi = options.xi;
  for (const auto* family : {&sz_family, &qi_family}) {
    for (std::size_t i = 0; i < family->instances.size(); ++i) {
      report.weights.weights.emplace_back(family->instances[i].label, family->weights[i]);
    }
  }

  const auto prior = options.alpha_file
                         ? load_alpha_file(*options.alpha_file, table)
                         : DirichletPrior::uniform(report.cells, options.alpha);
  BayesFactorOptions bf_options;
  bf_options.mode = options.mode;
  bf_options.prior_prob_qi = options.model_prior;
  report.bf = mixture_bayes_factor(table, qi_family, sz_family, prior, bf_options);
  return report;
}

Json to_json(const AnalysisReport& report) {
  Json doc;
  doc["version"] = kVersion;

  Json table = Json::parse(serialize_table(report.table));
  table["N"] = report.table.total();
  table["free_cells"] = cells_json(report.cells);
  table["shape"] = Json::array({report.table.rows(), report.table.cols()});
  doc["table"] = std::move(table);

  doc["binomials"] = report.qi_binomials;
  doc["hilbert_generators"] = report.hilbert_generators;
  doc["maximal_design_shape"] = Json::array({report.cells.size(), report.hilbert_generators});

  Json counts;
  counts["QI"] = {{"total", report.qi_instances}, {"consistent", report.qi_consistent}};
  counts["SZ"] = {{"total", report.sz_instances}, {"consistent", report.sz_consistent}};
  doc["instance_counts"] = std::move(counts);

  Json weights;
  weights["xi"] = report.weights.xi;
  auto entries = Json::array();
  for (const auto& [label, w] : report.weights.weights) {
    entries.push_back({{"label", label}, {"weight", w}});
  }
  weights["instances"] = std::move(entries);
  doc["prior_weights"] = std::move(weights);

  const auto& bf = report.bf;
  Json b;
  b["mode"] = std::string(to_string(bf.mode));
  b["bf_qi_vs_sz"] = bf.bf_qi_vs_sz;
  b["bf_mixture"] = bf.bf_mixture;
  b["bf_conventional"] = bf.bf_conventional;
  b["log10_against_qi"] = bf.log10_against_qi;
  b["evidence_class"] = std::string(to_string(bf.evidence_class));
  b["prior_prob_qi"] = bf.prior_prob_qi;
  b["posterior_prob_qi"] = bf.posterior_prob_qi;
  b["weights_used"] = {{"qi", family_json(bf.qi)}, {"sz", family_json(bf.sz)}};
  b["xi"] = bf.xi;
  b["alpha_bar"] = number_or_null(bf.alpha_bar);
  b["warnings"] = bf.warnings;
  doc["bf_report"] = std::move(b);

  Json provenance;
  provenance["xi"] = bf.xi;
  provenance["alpha_bar"] = number_or_null(bf.alpha_bar);
  provenance["cell_order"] = cells_json(report.cells);
  auto column_major = Json::array();
  for (auto i : column_major_order(report.cells)) column_major.push_back(cell_json(report.cells[i]));
  provenance["cell_order_column_major"] = std::move(column_major);
  provenance["version"] = kVersion;
  provenance["notes"] = report.notes;
  doc["provenance"] = std::move(provenance);
  return doc;
}

std::string to_text(const AnalysisReport& report) {
  std::ostringstream os;
  const auto& t = report.table;
  os << "Table (" << t.rows() << " x " << t.cols() << ", N = " << t.total()
     << ", structural zeros marked *)\n";
  std::size_t width = 8;
  for (const auto& l : t.row_labels()) width = std::max(width, l.size() + 2);
  os << std::setw(static_cast<int>(width)) << "";
  for (const auto& l : t.col_labels()) os << std::setw(10) << l;
  os << "\n";
  for (int r = 1; r <= t.rows(); ++r) {
    os << std::left << std::setw(static_cast<int>(width)) << t.row_labels()[r - 1] << std::right;
    for (int c = 1; c <= t.cols(); ++c) {
      if (t.is_structural_zero({r, c})) {
        os << std::setw(10) << "*";
      } else {
        os << std::setw(10) << t.count({r, c});
      }
    }
    os << "\n";
  }

  os << "\nQuasi-independence binomials (lattice basis):\n";
  if (report.qi_binomials.empty()) os << "  (none)\n";
  for (const auto& b : report.qi_binomials) os << "  " << b << " = 0\n";
  os << "\nMaximal design: " << report.cells.size() << " x " << report.hilbert_generators
     << " (Hilbert basis of " << report.hilbert_generators << " generators)\n";
  os << "\nInstances: QI " << report.qi_instances << " (" << report.qi_consistent
     << " consistent with the data), SZ " << report.sz_instances << " ("
     << report.sz_consistent << " consistent)\n";

  os << "\nPrior instance weights, xi = " << general(report.weights.xi) << ":\n";
  for (const auto& [label, w] : report.weights.weights) {
    os << "  q_" << label << " = " << general(w) << "\n";
  }

  const auto& bf = report.bf;
  os << "\nBayes factor (" << to_string(bf.mode) << ", alpha_bar = "
     << (std::isfinite(bf.alpha_bar) ? general(bf.alpha_bar) : std::string("per-cell")) << ")\n";
  os << "  BF(QI:SZ)            = " << general(bf.bf_qi_vs_sz) << "\n";
  os << "  mixture BF           = " << general(bf.bf_mixture) << "\n";
  os << "  conventional BF      = " << general(bf.bf_conventional) << "\n";
  os << "  log10 BF(SZ:QI)      = " << fixed(bf.log10_against_qi, 4) << "\n";
  os << "  evidence against QI  : " << to_string(bf.evidence_class) << "\n";
  os << "  Pr(QI | data)        = " << general(bf.posterior_prob_qi) << " (prior "
     << general(bf.prior_prob_qi) << ")\n";
  for (const auto& w : bf.warnings) os << "warning: " << w << "\n";
  for (const auto& n : report.notes) os << "note: " << n << "\n";
  return os.str();
}

std::vector<std::string> validate_report_json(const Json& doc) {
  std::vector<std::string> errors;
  auto require = [&](const Json& obj, const std::string& path, const char* key,
                     auto predicate, const char* kind) {
    if (!obj.is_object() || !obj.contains(key)) {
      errors.push_back(path + "." + key + " missing");
      return false;
    }
    if (!predicate(obj[key])) {
      errors.push_back(path + "." + key + " must be " + kind);
      return false;
    }
    return true;
  };
  const auto is_number = [](const Json& j) { return j.is_number(); };
  const auto is_number_or_null = [](const Json& j) { return j.is_number() || j.is_null(); };
  const auto is_string = [](const Json& j) { return j.is_string(); };
  const auto is_object = [](const Json& j) { return j.is_object(); };
  const auto is_array = [](const Json& j) { return j.is_array(); };
  const auto is_count = [](const Json& j) { return j.is_number_unsigned(); };
  const auto is_positive = [](const Json& j) { return j.is_number() && j.get<double>() > 0.0; };
  const auto is_probability = [](const Json& j) {
    return j.is_number() && j.get<double>() >= 0.0 && j.get<double>() <= 1.0;
  };

  if (!doc.is_object()) return {"report must be a JSON object"};
  require(doc, "$", "version", is_string, "a string");
  if (require(doc, "$", "table", is_object, "an object")) {
    const auto& t = doc["table"];
    for (const char* k : {"rows", "cols", "counts", "structural_zeros", "free_cells"}) {
      require(t, "$.table", k, is_array, "an array");
    }
    require(t, "$.table", "N", is_count, "a nonnegative integer");
  }
  require(doc, "$", "binomials", is_array, "an array");
  require(doc, "$", "hilbert_generators", is_count, "a nonnegative integer");
  if (require(doc, "$", "instance_counts", is_object, "an object")) {
    for (const char* m : {"QI", "SZ"}) {
      if (require(doc["instance_counts"], "$.instance_counts", m, is_object, "an object")) {
        const std::string path = std::string("$.instance_counts.") + m;
        require(doc["instance_counts"][m], path, "total", is_count, "a nonnegative integer");
        require(doc["instance_counts"][m], path, "consistent", is_count, "a nonnegative integer");
      }
    }
  }
  if (require(doc, "$", "prior_weights", is_object, "an object")) {
    require(doc["prior_weights"], "$.prior_weights", "xi", is_probability, "a probability");
    require(doc["prior_weights"], "$.prior_weights", "instances", is_array, "an array");
  }
  if (require(doc, "$", "bf_report", is_object, "an object")) {
    const auto& b = doc["bf_report"];
    const std::string p = "$.bf_report";
    if (require(b, p, "mode", is_string, "a string") && b["mode"] != "mixture" &&
        b["mode"] != "conventional") {
      errors.push_back(p + ".mode must be mixture or conventional");
    }
    require(b, p, "bf_qi_vs_sz", is_positive, "a positive number");
    require(b, p, "bf_mixture", is_positive, "a positive number");
    require(b, p, "bf_conventional", is_positive, "a positive number");
    require(b, p, "log10_against_qi", is_number, "a number");
    if (require(b, p, "evidence_class", is_string, "a string")) {
      const auto c = b["evidence_class"].get<std::string>();
      if (c != "supports_qi" && c != "poor" && c != "substantial" && c != "strong" &&
          c != "decisive") {
        errors.push_back(p + ".evidence_class has an unknown value \"" + c + "\"");
      }
    }
    require(b, p, "prior_prob_qi", is_probability, "a probability");
    require(b, p, "posterior_prob_qi", is_probability, "a probability");
    if (require(b, p, "weights_used", is_object, "an object")) {
      for (const char* side : {"qi", "sz"}) {
        if (!require(b["weights_used"], p + ".weights_used", side, is_object, "an object")) {
          continue;
        }
        const auto& f = b["weights_used"][side];
        const std::string fp = p + ".weights_used." + side;
        require(f, fp, "model_name", is_string, "a string");
        require(f, fp, "total_instances", is_count, "a nonnegative integer");
        require(f, fp, "consistent_instances", is_count, "a nonnegative integer");
        require(f, fp, "normalizer", is_positive, "a positive number");
        require(f, fp, "terms", is_array, "an array");
      }
    }
    require(b, p, "xi", is_probability, "a probability");
    require(b, p, "alpha_bar", is_number_or_null, "a number or null");
    require(b, p, "warnings", is_array, "an array");
    if (errors.empty()) {
      const double bfv = b["bf_qi_vs_sz"].get<double>();
      const double lam = b["log10_against_qi"].get<double>();
      if (std::abs(lam - std::log10(1.0 / bfv)) > 1e-9 * std::max(1.0, std::abs(lam))) {
        errors.push_back(p + ".log10_against_qi is inconsistent with bf_qi_vs_sz");
      }
      if (b["evidence_class"].get<std::string>() != to_string(jeffreys_class(bfv))) {
        errors.push_back(p + ".evidence_class is inconsistent with bf_qi_vs_sz");
      }
    }
  }
  if (require(doc, "$", "provenance", is_object, "an object")) {
    require(doc["provenance"], "$.provenance", "cell_order", is_array, "an array");
    require(doc["provenance"], "$.provenance", "version", is_string, "a string");
  }
  return errors;
}

Json run_kernel(const ContingencyTable& table, ModelKind model) {
  Diagnostics notes;
  const auto design =
      model == ModelKind::kQi ? build_qi_design(table, &notes) : build_saturated_design(table);
  const auto kernel = integer_kernel(design);
  if (!kernel.homogeneous()) {
    notes.push_back("all-ones vector is not in the column span of the design; "
                    "binomials are not homogeneous");
  }
  Json doc;
  doc["cells"] = cells_json(kernel.cells);
  doc["basis_vectors"] = kernel.vectors;
  auto strings = Json::array();
  for (const auto& eq : kernel_binomials(kernel)) strings.push_back(eq.to_string());
  doc["binomials_as_strings"] = std::move(strings);
  doc["homogeneous"] = kernel.homogeneous();
  doc["warnings"] = notes;
  return doc;
}

Json run_hilbert(const ContingencyTable& table, ModelKind model, const ModelBudget& budget) {
  const auto m = build_model(table, model, budget);
  Json doc;
  doc["generators"] = m.hilbert.generators;
  doc["param_names"] = m.maximal.param_names();
  doc["cell_order"] = cells_json(m.hilbert.cells);
  return doc;
}

Json run_instances(const ContingencyTable& table, ModelKind model, const ModelBudget& budget,
                   const ContingencyTable* consistent_with) {
  const auto m = build_model(table, model, budget);
  const auto instances =
      consistent_with ? consistent_instances(m.instances, *consistent_with) : m.instances;
  Json doc;
  doc["model"] = m.name;
  doc["count"] = instances.size();
  doc["total_enumerated"] = m.instances.size();
  Json histogram = Json::object();
  for (const auto& [z, n] : count_by_zero_cells(instances)) histogram[std::to_string(z)] = n;
  doc["by_zero_cells"] = std::move(histogram);
  auto list = Json::array();
  for (const auto& inst : instances) {
    list.push_back(
        {{"label", inst.label}, {"support", cells_json(inst.support_cells())}, {"z", inst.zero_cell_count}});
  }
  doc["instances"] = std::move(list);
  return doc;
}

Json run_calibrate(const ContingencyTable& shape, double xi, const std::vector<double>& alphas,
                   const ModelBudget& budget) {
  const auto report = calibrate_alpha(shape, xi, alphas, budget);
  Json doc;
  doc["xi"] = report.xi;
  auto results = Json::array();
  for (const auto& e : report.entries) results.push_back({{"alpha", e.alpha_bar}, {"bf", e.bf}});
  doc["results"] = std::move(results);
  doc["best_alpha"] = report.best_alpha;
  return doc;
}

}  // namespace toric_bayes
