// toric-bayes: algebraic Bayesian analysis of two-way tables with zero cells.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "toric_bayes/errors.hpp"
#include "toric_bayes/report.hpp"

namespace {

using namespace toric_bayes;

std::vector<double> parse_alpha_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ParseError("bad alpha value \"" + item + "\"");
    }
  }
  if (out.empty()) throw ParseError("--alphas needs at least one value");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Toric models, Hilbert bases and mixture Bayes factors for two-way tables"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  AnalyzeOptions analyze;
  std::string mode = "mixture";
  std::string format = "text";
  std::string alpha_file;
  auto* cmd_analyze = app.add_subcommand("analyze", "Full pipeline and Bayes factor report");
  cmd_analyze->add_option("--input", analyze.input, "Table file (.json or .csv)")->required();
  cmd_analyze->add_option("--xi", analyze.xi, "Per-cell zero-probability chance")
      ->capture_default_str();
  cmd_analyze->add_option("--alpha", analyze.alpha, "Shared Dirichlet parameter")
      ->capture_default_str();
  cmd_analyze->add_option("--alpha-file", alpha_file, "Per-cell Dirichlet parameters (JSON)");
  cmd_analyze->add_option("--model-prior", analyze.model_prior, "Prior probability of QI")
      ->capture_default_str();
  cmd_analyze->add_option("--mode", mode, "mixture|conventional")
      ->check(CLI::IsMember({"mixture", "conventional"}))
      ->capture_default_str();
  cmd_analyze->add_option("--format", format, "json|text")
      ->check(CLI::IsMember({"json", "text"}))
      ->capture_default_str();

  std::string input;
  std::string model = "qi";
  auto* cmd_kernel = app.add_subcommand("kernel", "Integer kernel basis and binomials");
  cmd_kernel->add_option("--input", input, "Table file")->required();
  cmd_kernel->add_option("--model", model, "qi|sz")->capture_default_str();

  auto* cmd_hilbert = app.add_subcommand("hilbert", "Minimal Hilbert basis (maximal design)");
  cmd_hilbert->add_option("--input", input, "Table file")->required();
  cmd_hilbert->add_option("--model", model, "qi|sz")->capture_default_str();

  std::string consistent_with;
  auto* cmd_instances = app.add_subcommand("instances", "Enumerate model instances");
  cmd_instances->add_option("--input", input, "Table file")->required();
  cmd_instances->add_option("--model", model, "qi|sz")->capture_default_str();
  cmd_instances->add_option("--consistent-with", consistent_with,
                            "Keep instances consistent with this table");

  double xi = 0.1;
  std::string alphas = "0.25,0.5,0.75,1,1.25,1.5,1.75,2";
  auto* cmd_calibrate = app.add_subcommand("calibrate", "Imaginary-training-sample calibration");
  cmd_calibrate->add_option("--input", input, "Table whose layout defines the free cells")
      ->required();
  cmd_calibrate->add_option("--xi", xi, "Per-cell zero-probability chance")->capture_default_str();
  cmd_calibrate->add_option("--alphas", alphas, "Comma-separated alpha_bar candidates")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(ErrorKind::kParse);
  }

  try {
    const auto budget = budget_from_env();
    if (cmd_analyze->parsed()) {
      analyze.mode = mode == "mixture" ? BfMode::kMixture : BfMode::kConventional;
      analyze.budget = budget;
      if (!alpha_file.empty()) analyze.alpha_file = alpha_file;
      const auto report = run_analyze(analyze);
      if (format == "json") {
        std::cout << to_json(report).dump(2) << "\n";
      } else {
        std::cout << to_text(report);
      }
      return 0;
    }
    const auto table = load_table_file(input);
    Json out;
    if (cmd_kernel->parsed()) {
      out = run_kernel(table, parse_model_kind(model));
    } else if (cmd_hilbert->parsed()) {
      out = run_hilbert(table, parse_model_kind(model), budget);
    } else if (cmd_instances->parsed()) {
      if (consistent_with.empty()) {
        out = run_instances(table, parse_model_kind(model), budget);
      } else {
        const auto data = load_table_file(consistent_with);
        out = run_instances(table, parse_model_kind(model), budget, &data);
      }
    } else if (cmd_calibrate->parsed()) {
      out = run_calibrate(table, xi, parse_alpha_list(alphas), budget);
    }
    std::cout << out.dump(2) << "\n";
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::kNumeric);
  }
}
