#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "trppm/config.hpp"
#include "trppm/error.hpp"
#include "trppm/experiment.hpp"
#include "trppm/parse.hpp"
#include "trppm/verify.hpp"

namespace {

using namespace trppm;

int cmd_run(const std::string& path) {
  ExperimentConfig cfg = parse_config(read_text_file(path));
  apply_seed_override(cfg);
  const auto outcome = run_experiment(cfg);
  outcome.report.write(std::cout);
  return outcome.exit_code;
}

int cmd_sweep(const std::string& path, const std::string& axis, const std::vector<std::string>& values,
              const std::string& out_path, unsigned workers) {
  const auto doc = KeyValueDocument::parse(read_text_file(path));
  // Validate the template before fanning out.
  parse_config(doc);
  const auto rows = sweep(doc, axis, values, workers);
  if (out_path.empty()) {
    write_sweep_csv(std::cout, axis, rows);
  } else {
    std::ofstream out(out_path);
    if (!out) throw Error(fmt::format("cannot open '{}' for writing", out_path));
    write_sweep_csv(out, axis, rows);
    if (!out) throw Error(fmt::format("failed writing '{}'", out_path));
  }
  return kExitPass;
}

int cmd_verify(const std::string& suite) {
  std::uint64_t seed = 42;
  if (const char* env = std::getenv("TRPPM_SEED")) {
    seed = static_cast<std::uint64_t>(parse::integer(env, "TRPPM_SEED"));
  }
  const auto report = verify_suite(suite, seed);
  report.write(std::cout);
  return report.passed() ? kExitPass : kExitCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trust-region proximal point experiments"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run one experiment and print its verification report");
  run->add_option("config", config_path, "Experiment config file")->required();

  std::string sweep_path;
  std::string axis;
  std::vector<std::string> values;
  std::string out_path;
  unsigned workers = 1;
  auto* sw = app.add_subcommand("sweep", "Run an experiment once per value of a numeric key");
  sw->add_option("config", sweep_path, "Experiment config template")->required();
  sw->add_option("--axis", axis, "Dotted numeric key, e.g. solver.t")->required();
  sw->add_option("--values", values, "Comma-separated values")->delimiter(',');
  sw->add_option("--out", out_path, "Summary CSV path (default: stdout)");
  sw->add_option("--workers", workers, "Concurrent runs")->check(CLI::PositiveNumber);

  std::string suite;
  auto* ver = app.add_subcommand("verify", "Run a property suite");
  ver->add_option("suite", suite, "operators, displacement, rates, equivalence or all")
      ->required()
      ->check(CLI::IsMember({"operators", "displacement", "rates", "equivalence", "all"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfigError;
  }

  try {
    if (*run) return cmd_run(config_path);
    if (*sw) {
      for (auto& v : values) v = parse::trim(v);
      return cmd_sweep(sweep_path, axis, values, out_path, workers);
    }
    return cmd_verify(suite);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumericalFailure;
  } catch (const InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
}
