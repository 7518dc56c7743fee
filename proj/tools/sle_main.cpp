#include <CLI11.hpp>
#include <iostream>

#include "sle/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"States of Low Energy on Friedmann-Lemaitre backgrounds"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::string suite = "identities";
  std::uint64_t seed = 0;
  bool seed_set = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "configuration file (key = value lines)");
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--seed", seed, "override the config PRNG seed")
        ->each([&](const std::string&) { seed_set = true; });
  };

  CLI::App* c_solve = app.add_subcommand("solve", "solve one SLE mode and emit CSV/JSON");
  CLI::App* c_spec = app.add_subcommand("spectrum", "primordial power spectrum scan");
  CLI::App* c_smallp = app.add_subcommand("smallp", "small-momentum expansion tables");
  CLI::App* c_gd = app.add_subcommand("gd", "generalized heat-kernel coefficient tables");
  CLI::App* c_verify = app.add_subcommand("verify", "run a verification suite");
  for (CLI::App* c : {c_solve, c_spec, c_smallp, c_gd, c_verify}) add_common(c);
  c_verify->add_option("--suite", suite,
                       "one of invariance|identities|smallp|wkb|spectrum");

  CLI11_PARSE(app, argc, argv);

  try {
    sle::RunConfig cfg =
        config_path.empty() ? sle::RunConfig{} : sle::RunConfig::parse_file(config_path);
    if (seed_set) cfg.seed = seed;

    if (c_solve->parsed()) {
      sle::cmd_solve(cfg, out_dir);
    } else if (c_spec->parsed()) {
      sle::cmd_spectrum(cfg, out_dir);
    } else if (c_smallp->parsed()) {
      sle::cmd_smallp(cfg, out_dir);
    } else if (c_gd->parsed()) {
      sle::cmd_gd(cfg, out_dir);
    } else if (c_verify->parsed()) {
      sle::Report rep = sle::run_suite(cfg, suite);
      rep.print(std::cout);
      sle::write_file(out_dir + "/verify_" + suite + ".json", rep.to_json());
      return rep.ok() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
