#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dpr/harness.hpp"

namespace {

struct SubcommandArgs {
  std::string config_path;
  dpr::ConfigOverrides overrides;
};

void attach_common_flags(CLI::App* cmd, SubcommandArgs& args) {
  cmd->add_option("--config", args.config_path, "experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  auto* seed = cmd->add_option("--seed", "override the config seed");
  auto* out = cmd->add_option("--out", "override the output directory");
  auto* workers = cmd->add_option("--workers", "override the worker count");
  cmd->callback([cmd, seed, out, workers, &args] {
    if (!seed->empty()) args.overrides.seed = cmd->get_option("--seed")->as<std::uint64_t>();
    if (!out->empty()) args.overrides.out_dir = cmd->get_option("--out")->as<std::string>();
    if (!workers->empty())
      args.overrides.workers = cmd->get_option("--workers")->as<int>();
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dpr: compressive phase retrieval under generative priors"};
  app.require_subcommand(1);

  const char* kinds[] = {"solve",      "sweep",      "landscape", "verify-wdc",
                         "verify-rrcp", "tessellate", "compare"};
  SubcommandArgs args;
  std::string selected;
  for (const char* kind : kinds) {
    auto* cmd = app.add_subcommand(kind);
    attach_common_flags(cmd, args);
    cmd->parse_complete_callback([kind, &selected] { selected = kind; });
  }

  CLI11_PARSE(app, argc, argv);

  dpr::ExperimentConfig config;
  try {
    config = dpr::load_config(args.config_path);
  } catch (const dpr::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return dpr::kExitConfig;
  }
  if (dpr::to_string(config.kind) != selected) {
    std::cerr << "config error: config kind '" << dpr::to_string(config.kind)
              << "' does not match subcommand '" << selected << "'\n";
    return dpr::kExitConfig;
  }
  dpr::apply_overrides(config, args.overrides);
  return dpr::run(config);
}
