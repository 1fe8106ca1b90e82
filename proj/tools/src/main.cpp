#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "kexp_cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace kexp::cli;

  CLI::App app{"Krylov approximation of exp/phi actions with a-posteriori error estimates"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  unsigned threads = 1;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides the config)");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 1024u));
    sub->add_option("--seed", seed, "starting-vector seed (overrides the config)");
  };
  CLI::App* build = app.add_subcommand("build", "write the operator as Matrix Market plus metadata JSON");
  CLI::App* sweep = app.add_subcommand("sweep", "oracle error and estimators over a t grid");
  CLI::App* bench = app.add_subcommand("bench", "restarted propagation with step-size controllers");
  for (CLI::App* sub : {build, sweep, bench}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  RunOptions opts;
  opts.threads = threads;
  for (CLI::App* sub : {build, sweep, bench}) {
    if (sub->count("--out") > 0) opts.out_dir = out_dir;
    if (sub->count("--seed") > 0) opts.seed = seed;
  }

  try {
    const Config cfg = load_config(config_path);
    if (*build) return cmd_build(cfg, opts, std::cout);
    if (*sweep) return cmd_sweep(cfg, opts, std::cout);
    return cmd_bench(cfg, opts, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}
