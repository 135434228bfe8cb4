#include <CLI11.hpp>

#include <iostream>

#include <similab/errors.hpp>

#include "check.hpp"
#include "config.hpp"
#include "experiments.hpp"

using namespace similab::cli;

int main(int argc, char** argv) {
  CLI::App app{"similab: stochastic self-similarity experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", similab::cli::code_version());

  auto* run = app.add_subcommand("run", "run one experiment from a config file");
  std::string config_path, out_dir;
  std::int64_t seed = -1, paths = -1, threads = -1;
  run->add_option("config", config_path, "key = value config file")->required();
  run->add_option("--seed", seed, "override the seed");
  run->add_option("--out", out_dir, "override the output directory");
  run->add_option("--paths", paths, "override the ensemble size");
  run->add_option("--threads", threads, "worker threads (0 = all cores)");

  auto* list = app.add_subcommand("list", "list experiments and their parameters");
  bool verbose = false;
  list->add_flag("-v,--verbose", verbose, "show parameters and defaults");

  app.add_subcommand("check", "run the fast invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (list->parsed()) {
    for (const auto& e : registry()) {
      std::cout << e.name << "  " << e.description << '\n';
      if (!verbose) continue;
      for (const auto& p : e.params) std::cout << "    " << p.key << " = " << p.value << "    # " << p.help << '\n';
    }
    return 0;
  }
  if (app.got_subcommand("check")) return run_checks(std::cout) == 0 ? 0 : 3;

  Bundle bundle;
  std::string dir;
  try {
    Config cfg = Config::load(config_path);
    if (seed >= 0) cfg.set("seed", std::to_string(seed));
    if (paths >= 0) cfg.set("paths", std::to_string(paths));
    if (threads >= 0) cfg.set("threads", std::to_string(threads));
    if (!out_dir.empty()) cfg.set("out", out_dir);
    if (!cfg.has("experiment")) throw ConfigError("config lacks the 'experiment' key");
    const Config resolved = resolve(find_experiment(cfg.str("experiment")), cfg);
    dir = resolved.str("out");
    bundle = run_experiment(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime abort: " << e.what() << '\n';
    return 3;
  }
  try {
    write_bundle(bundle, dir);
  } catch (const std::exception& e) {
    std::cerr << "runtime abort: " << e.what() << '\n';
    return 3;
  }
  std::cout << bundle.experiment << " finished in " << bundle.wall_seconds << " s; results in " << dir << '\n'
            << bundle.summary.dump(2) << '\n';
  return 0;
}
