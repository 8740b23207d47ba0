// Command-line driver: run <config> | verify-all <config>.

#include "rieszgreen/scenario.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

int run_config(const std::string& path, const std::string& out, std::optional<long long> seed,
               std::optional<int> filter, bool require_verify_all) {
  using namespace rieszgreen;
  try {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::config, "cannot open config " + path);
    scenario::json doc;
    try {
      doc = scenario::json::parse(in);
    } catch (const scenario::json::parse_error& e) {
      fail(ErrorKind::config, path + ": " + e.what());
    }
    if (seed) doc["seed"] = *seed;
    if (filter) doc["filter"] = *filter;
    scenario::ScenarioConfig cfg = scenario::parse(doc, path);
    if (require_verify_all && cfg.task != "verify-all")
      fail(ErrorKind::config, path + ": verify-all needs a config with task \"verify-all\"");
    if (!out.empty()) cfg.output_dir = out;
    const scenario::Outcome outcome = scenario::execute(cfg, &std::cerr);
    scenario::write_outputs(cfg, outcome);
    int failed = 0;
    for (const auto& c : outcome.claims)
      if (c.hard && !c.passed) {
        ++failed;
        std::cerr << "invariant failed: " << c.name << " (" << io::format_double(c.measured) << " " << c.relation << " "
                  << io::format_double(c.tolerance) << ")\n";
      }
    std::cout << cfg.task << ": " << (failed ? "FAIL" : "ok") << ", report at " << (cfg.output_dir / "report.json").string()
              << "\n";
    return failed ? 5 : 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return scenario::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete Riesz and Green potentials, balayage and Gauss variational problems"};
  app.require_subcommand(1);
  std::string config, out;
  std::optional<long long> seed;
  std::optional<int> filter;

  auto* run = app.add_subcommand("run", "Run the task named in a config file");
  run->add_option("config", config, "JSON config")->required();
  run->add_option("--out", out, "Output directory (overrides output.dir)");
  run->add_option("--seed", seed, "RNG seed (overrides seed)");
  run->add_option("--filter", filter, "Criterion id (verify-all configs only)");

  auto* all = app.add_subcommand("verify-all", "Run the acceptance criteria");
  all->add_option("config", config, "JSON config with task verify-all")->required();
  all->add_option("--out", out, "Output directory (overrides output.dir)");
  all->add_option("--seed", seed, "RNG seed (overrides seed)");
  all->add_option("--filter", filter, "Run a single criterion");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  return run_config(config, out, seed, filter, all->parsed());
}
