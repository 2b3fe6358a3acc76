// Command-line front end: run, validate, oracles.
#include <cstdint>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "evorl/errors.hpp"
#include "evorl/harness.hpp"
#include "evorl/oracles.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

int run_command(const std::string& config_path, const std::string& out_dir,
                std::optional<std::uint64_t> seed, std::optional<std::size_t> replicates,
                unsigned threads) {
  evorl::ScenarioConfig cfg = evorl::parse_config(config_path);
  if (seed) cfg.seed = *seed;
  if (replicates) cfg.replicates = *replicates;
  cfg.validate();
  const evorl::RunManifest manifest = evorl::run(cfg, out_dir, {threads});
  std::cout << "scenario " << evorl::to_string(cfg.scenario) << ", seed " << cfg.seed << ", "
            << cfg.replicates << " replicates\n";
  for (const auto& [name, path] : manifest.outputs) std::cout << "  " << name << ": " << path << '\n';
  if (!manifest.extinctions.empty()) {
    std::cout << "  " << manifest.extinctions.size() << " replicate(s) went extinct\n";
  }
  return kExitOk;
}

int validate_command(const std::string& config_path) {
  const evorl::ScenarioConfig cfg = evorl::parse_config(config_path);
  std::cout << evorl::config_to_json(cfg).dump(2) << '\n';
  return kExitOk;
}

int oracles_command() {
  const auto checks = evorl::oracles::run_all();
  std::size_t failed = 0;
  for (const auto& c : checks) {
    std::cout << (c.passed ? "PASS  " : "FAIL  ") << c.name << ": observed "
              << std::setprecision(17) << c.observed << ", expected " << c.expected;
    if (c.tolerance > 0.0) std::cout << " +/- " << c.tolerance;
    std::cout << '\n';
    if (!c.passed) ++failed;
  }
  std::cout << checks.size() - failed << "/" << checks.size() << " oracle checks passed\n";
  return failed == 0 ? kExitOk : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evolution-as-reinforcement-learning simulation engine"};
  app.require_subcommand(1);
  app.set_version_flag("--version", evorl::kEngineVersion);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replicates;
  unsigned threads = 0;

  auto* run = app.add_subcommand("run", "Run a scenario and write CSV outputs plus a manifest");
  run->add_option("--config", config_path, "Scenario config (JSON)")->required();
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--seed", seed, "Override the config seed");
  run->add_option("--replicates", replicates, "Override the replicate count");
  run->add_option("--threads", threads, "Worker threads (0 = all cores); output does not depend on it");

  auto* validate = app.add_subcommand("validate", "Parse and validate a config, print it resolved");
  validate->add_option("--config", config_path, "Scenario config (JSON)")->required();

  auto* oracles = app.add_subcommand("oracles", "Run the built-in oracle checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*run) return run_command(config_path, out_dir, seed, replicates, threads);
    if (*validate) return validate_command(config_path);
    if (*oracles) return oracles_command();
  } catch (const evorl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}
