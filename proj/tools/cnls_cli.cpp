// cnls_cli: runs one scenario and writes out/<scenario>/...
//
//   cnls_cli --scenario diagram --out-dir out
//   cnls_cli --config run.json --seed-ell 1 --seed-ell 2 --beta1-range 2 100
//   cnls_cli --scenario verify      (exit code 0 iff every criterion passed)

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "cnls/runner/config.hpp"
#include "cnls/runner/scenarios.hpp"
#include "cnls/runner/verify.hpp"

using namespace cnls;
using namespace cnls::runner;

int main(int argc, char** argv) {
  CLI::App app{"Solitary-wave continuation experiments for coupled NLS equations"};
  std::string scenario, config_path, out_dir = "out";
  std::vector<int> seed_ells;
  std::vector<double> beta1_range;
  app.add_option("--scenario", scenario, "diagram, asymptotics, eigenloci, geneig or verify")
      ->check(CLI::IsMember(scenario_names()));
  app.add_option("--config", config_path, "JSON configuration")->check(CLI::ExistingFile);
  app.add_option("--out-dir", out_dir, "output root");
  app.add_option("--seed-ell", seed_ells, "branch indices ell (repeatable)");
  app.add_option("--beta1-range", beta1_range, "lo hi")->expected(2);
  CLI11_PARSE(app, argc, argv);

  try {
    ScenarioConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    if (!scenario.empty()) cfg.scenario = scenario;
    if (!seed_ells.empty()) cfg.ells = seed_ells;
    if (!beta1_range.empty()) cfg.beta1_range = std::make_pair(beta1_range[0], beta1_range[1]);
    cfg.validate();
    const fs::path out(out_dir);

    if (cfg.scenario == "verify") {
      const auto rep = run_verify(cfg, out, [](const CriterionResult& c) {
        std::printf("[%s] %2d %s: %s\n", c.passed ? "PASS" : "FAIL", c.id, c.name.c_str(), c.measured.c_str());
        std::fflush(stdout);
      });
      return rep.all_passed() ? 0 : 1;
    }
    nlohmann::json summary;
    if (cfg.scenario == "diagram")
      summary = run_diagram(cfg, out).summary;
    else if (cfg.scenario == "asymptotics")
      summary = run_asymptotics(cfg, out).summary;
    else if (cfg.scenario == "eigenloci")
      summary = run_eigenloci(cfg, out).summary;
    else
      summary = run_geneig(cfg, out).summary;
    std::cout << summary.dump(2) << '\n';
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
