#include <doctest.h>

#include <cstdlib>
#include <regex>
#include <sys/wait.h>

#include "toric_bayes/errors.hpp"
#include "toric_bayes/report.hpp"

using namespace toric_bayes;

namespace {

std::string data(const char* name) { return std::string(TORIC_BAYES_DATA_DIR) + "/" + name; }

int run_binary_with_env(const std::string& env, const std::string& args) {
  const std::string cmd = env + " " + std::string(TORIC_BAYES_BINARY) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

int run_binary(const std::string& args) { return run_binary_with_env("", args); }

AnalyzeOptions cancer_options() {
  AnalyzeOptions o;
  o.input = data("cancer.json");
  return o;
}

void collect_numbers(const Json& j, std::vector<double>& out) {
  if (j.is_number()) out.push_back(j.get<double>());
  if (j.is_structured()) {
    for (const auto& v : j) collect_numbers(v, out);
  }
}

}  // namespace

TEST_CASE("analyze reproduces the cancer report") {
  const auto r = run_analyze(cancer_options());
  CHECK(r.qi_instances == 87);
  CHECK(r.qi_consistent == 1);
  CHECK(r.sz_instances == 255);
  CHECK(r.sz_consistent == 2);
  CHECK(r.hilbert_generators == 7);
  CHECK(r.qi_binomials == std::vector<std::string>{"q_11*q_22 - q_12*q_21", "q_21*q_52 - q_22*q_51"});
  CHECK(std::nearbyint(r.bf.bf_qi_vs_sz * 100) == 17);
  CHECK(r.bf.evidence_class == EvidenceClass::kSubstantial);

  auto conv = cancer_options();
  conv.mode = BfMode::kConventional;
  const auto c = run_analyze(conv);
  CHECK(std::nearbyint(c.bf.bf_qi_vs_sz * 100) == 55);
  CHECK(c.bf.evidence_class == EvidenceClass::kPoor);

  auto ones = cancer_options();
  ones.input = data("ones_2x2.json");
  const auto o = run_analyze(ones);
  CHECK(std::isfinite(o.bf.bf_qi_vs_sz));
  CHECK(o.bf.bf_qi_vs_sz > 0);
}

TEST_CASE("json output is deterministic and validates") {
  const auto a = to_json(run_analyze(cancer_options())).dump(2);
  const auto b = to_json(run_analyze(cancer_options())).dump(2);
  CHECK(a == b);
  const auto doc = Json::parse(a);
  CHECK(validate_report_json(doc).empty());
  CHECK(doc["bf_report"]["bf_qi_vs_sz"].get<double>() == run_analyze(cancer_options()).bf.bf_qi_vs_sz);
  CHECK(doc["instance_counts"]["QI"]["total"] == 87);

  auto broken = doc;
  broken.erase("bf_report");
  CHECK_FALSE(validate_report_json(broken).empty());
  auto wrong_class = doc;
  wrong_class["bf_report"]["evidence_class"] = "decisive";
  CHECK_FALSE(validate_report_json(wrong_class).empty());
  auto wrong_log = doc;
  wrong_log["bf_report"]["log10_against_qi"] = 3.0;
  CHECK_FALSE(validate_report_json(wrong_log).empty());
}

TEST_CASE("every number printed in text is carried in json") {
  const auto report = run_analyze(cancer_options());
  const auto text = to_text(report);
  std::vector<double> numbers;
  collect_numbers(to_json(report), numbers);
  const std::regex token(R"((^|[\s=(:])(-?\d+(\.\d+)?)(?=[\s),]|$))");
  for (auto it = std::sregex_iterator(text.begin(), text.end(), token); it != std::sregex_iterator(); ++it) {
    const std::string s = (*it)[2];
    const auto dot = s.find('.');
    const int decimals = dot == std::string::npos ? 0 : static_cast<int>(s.size() - dot - 1);
    const double v = std::stod(s);
    // A printed value with d decimals matches a json value rounded to d
    // decimals, or to that many significant digits.
    const bool found = std::any_of(numbers.begin(), numbers.end(), [&](double j) {
      if (std::abs(j - v) <= 0.5 * std::pow(10.0, -decimals) * (1 + 1e-9)) return true;
      return j != 0 && std::abs(j - v) <= 0.5 * std::pow(10.0, std::floor(std::log10(std::abs(j))) - 5);
    });
    CAPTURE(s);
    CHECK(found);
  }
}

TEST_CASE("subcommand documents") {
  const auto t = load_table_file(data("cancer.json"));
  const auto k = run_kernel(t, ModelKind::kQi);
  CHECK(k["binomials_as_strings"].size() == 2);
  CHECK(k["homogeneous"] == true);
  CHECK(run_kernel(t, ModelKind::kSz)["basis_vectors"].empty());

  const auto h = run_hilbert(t, ModelKind::kQi, {});
  CHECK(h["generators"].size() == 7);
  CHECK(h["cell_order"].size() == 8);

  CHECK(run_instances(t, ModelKind::kQi, {})["count"] == 87);
  CHECK(run_instances(t, ModelKind::kSz, {})["count"] == 255);
  const auto consistent = run_instances(t, ModelKind::kSz, {}, &t);
  CHECK(consistent["count"] == 2);
  CHECK(consistent["total_enumerated"] == 255);
  CHECK(consistent["instances"][1]["label"] == "SZ_1");

  const auto cal = run_calibrate(t, 0.1, {0.5, 1.0}, {});
  CHECK(cal["results"].size() == 2);
  CHECK(cal["best_alpha"] == 1.0);

  CHECK(parse_model_kind("qi") == ModelKind::kQi);
  CHECK(parse_model_kind("sz") == ModelKind::kSz);
  CHECK_THROWS_AS(parse_model_kind("loglin"), ParseError);
}

TEST_CASE("budgets and alpha files") {
  const auto b = parse_budget("hilbert_elements=10,hilbert_pairs=20,instance_generators=3");
  CHECK(b.hilbert.max_elements == 10);
  CHECK(b.hilbert.max_pairs == 20);
  CHECK(b.enumeration.max_generators == 3);
  CHECK(parse_budget("").hilbert.max_elements == ModelBudget{}.hilbert.max_elements);
  CHECK_THROWS_AS(parse_budget("hilbert_elements"), ParseError);
  CHECK_THROWS_AS(parse_budget("colour=3"), ParseError);
  CHECK_THROWS_AS(parse_budget("hilbert_pairs=-1"), ParseError);

  setenv("TORIC_BAYES_BUDGET", "instance_generators=4", 1);
  CHECK(budget_from_env().enumeration.max_generators == 4);
  unsetenv("TORIC_BAYES_BUDGET");
  CHECK(budget_from_env().enumeration.max_generators == EnumerationOptions{}.max_generators);

  const auto t = load_table_file(data("cancer.json"));
  const auto prior = load_alpha_file(data("alpha_cancer.json"), t);
  CHECK(prior.alpha() == std::vector<double>(8, 1.0));
  auto with_file = cancer_options();
  with_file.alpha_file = data("alpha_cancer.json");
  CHECK(run_analyze(with_file).bf.bf_qi_vs_sz == doctest::Approx(run_analyze(cancer_options()).bf.bf_qi_vs_sz));
  CHECK_THROWS_AS(load_alpha_file(data("small_2x2.json"), t), ParseError);
}

TEST_CASE("binary exit codes") {
  const std::string cancer = data("cancer.json");
  CHECK(run_binary("analyze --input " + cancer) == 0);
  CHECK(run_binary("analyze --input " + cancer + " --format json --mode conventional") == 0);
  CHECK(run_binary("instances --input " + cancer + " --model sz") == 0);
  CHECK(run_binary("calibrate --input " + cancer + " --xi 0.1 --alphas 0.5,1.0") == 0);
  CHECK(run_binary("analyze --input /nonexistent.json") == 2);
  CHECK(run_binary("analyze --bogus") == 2);
  CHECK(run_binary("instances --input " + cancer + " --model qi --budget-check") == 2);
  CHECK(run_binary("analyze --input " + cancer + " --xi 1.5") == 6);
  CHECK(run_binary_with_env("TORIC_BAYES_BUDGET=instance_generators=3",
                            "instances --input " + cancer + " --model qi") == 3);
  CHECK(run_binary_with_env("TORIC_BAYES_BUDGET=hilbert_elements=4", "hilbert --input " + cancer) == 3);
  CHECK(run_binary_with_env("TORIC_BAYES_BUDGET=oops", "hilbert --input " + cancer) == 2);
}
