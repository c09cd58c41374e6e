#include "netrisk/driver.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

namespace {

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out.push_back(c);
  }
  return out;
}

void print_error(const std::string& msg) {
  std::cerr << "{\"error\":\"" << json_escape(msg) << "\"}\n";
}

netrisk::RunConfig default_figures_config() {
  netrisk::RunConfig cfg;
  cfg.scenario.edges = netrisk::EdgeModel::toy(0.5);
  cfg.scenario.claims.alpha = 2.0;
  cfg.scenario.claims.scales = netrisk::VectorXd::Ones(3);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact and simulated tail-risk analysis of bipartite insurance "
               "markets"};

  std::string config_path;
  std::string subcommand;
  netrisk::DriverOptions opts;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::size_t replicates = 0;

  app.add_option("--config", config_path, "Path to the JSON scenario config");
  app.add_option("--out", opts.out_dir, "Output directory for CSV files")
      ->required();
  app.add_option("--seed", seed, "Override the simulation seed")
      ->each([&](const std::string&) { seed_set = true; });
  app.add_option("--replicates", replicates,
                 "Override the simulation replicate count");
  app.add_option("--tol", opts.tol,
                 "Extra slack on Monte Carlo confidence-interval checks");
  app.add_option("--subcommand", subcommand, "Analysis to run")
      ->required()
      ->check(CLI::IsMember({"exact", "sweep", "poisson", "mc", "figures"}));

  CLI11_PARSE(app, argc, argv);

  try {
    netrisk::RunConfig cfg;
    if (!config_path.empty()) {
      cfg = netrisk::load_run_config(config_path);
    } else if (subcommand == "figures") {
      cfg = default_figures_config();
    } else {
      print_error("--config is required for subcommand " + subcommand);
      return netrisk::kExitConfig;
    }
    if (seed_set) cfg.sim.seed = seed;
    if (replicates > 0) cfg.sim.replicates = replicates;

    if (subcommand == "exact") return netrisk::run_exact(cfg, opts);
    if (subcommand == "sweep") return netrisk::run_sweep(cfg, opts);
    if (subcommand == "poisson") return netrisk::run_poisson(cfg, opts);
    if (subcommand == "mc") return netrisk::run_mc(cfg, opts);
    return netrisk::run_figures(cfg, opts);
  } catch (const std::invalid_argument& e) {
    print_error(e.what());
    return netrisk::kExitConfig;
  } catch (const std::exception& e) {
    print_error(e.what());
    return 1;
  }
}
