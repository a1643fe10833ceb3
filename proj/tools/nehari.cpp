// Command-line driver: solve, sweep, sync-threshold, verify, sobolev.

#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "nehari/cli.hpp"
#include "nehari/errors.hpp"

namespace {

struct Common {
  std::string config_path;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> grid;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "JSON configuration file");
  cmd->add_option("--out", c.out, "Output directory (overrides the config)");
  cmd->add_option("--seed", c.seed, "Random seed (overrides the config)");
  cmd->add_option("--grid", c.grid, "Number of arc cells M (overrides the config)");
}

nehari::cli::RunConfig resolve(const Common& c) {
  nehari::cli::RunConfig cfg;
  if (!c.config_path.empty()) cfg = nehari::cli::load_config(c.config_path);
  if (c.out) cfg.out_dir = *c.out;
  if (c.seed) cfg.solver.seed = *c.seed;
  if (c.grid) cfg.model.M = *c.grid;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symmetric Nehari-manifold solver for the critical competitive system"};
  app.require_subcommand(1);

  Common common;
  bool resume = false;
  int dim = 4;
  std::string fault;

  auto* solve = app.add_subcommand("solve", "Minimize the energy on the invariant Nehari set");
  add_common(solve, common);
  auto* sweep = app.add_subcommand("sweep", "Lambda continuation toward phase separation");
  add_common(sweep, common);
  sweep->add_flag("--resume", resume, "Continue from sweep_state.json in the output directory");
  auto* sync = app.add_subcommand("sync-threshold", "Emptiness threshold of synchronized solutions");
  add_common(sync, common);
  auto* verify = app.add_subcommand("verify", "Run the invariant battery");
  add_common(verify, common);
  verify->add_option("--inject-fault", fault)->group("");
  auto* sob = app.add_subcommand("sobolev", "Print the Sobolev constant and energy levels");
  sob->add_option("--dim", dim, "Dimension N")->check(CLI::Range(3, 64));

  CLI11_PARSE(app, argc, argv);

  using namespace nehari::cli;
  if (sob->parsed()) return cmd_sobolev(dim, std::cout);

  RunConfig cfg;
  try {
    cfg = resolve(common);
  } catch (const nehari::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return Exit::bad_config;
  }
  if (solve->parsed()) return cmd_solve(cfg, std::cerr);
  if (sweep->parsed()) return cmd_sweep(cfg, resume, std::cerr);
  if (sync->parsed()) return cmd_sync_threshold(cfg, std::cout, std::cerr);
  VerifyOptions vo;
  if (!fault.empty()) {
    if (fault != "sobolev_constant") {
      std::cerr << "error: unknown fault '" << fault << "'\n";
      return Exit::bad_config;
    }
    vo.inject_sobolev_fault = true;
  }
  return cmd_verify(cfg, vo, std::cout);
}
