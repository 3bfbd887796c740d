#include <cstddef>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "drift/experiment.hpp"

namespace {

// Exit codes: 0 success, 1 usage (bad flags or config), 2 runtime failure.
constexpr int kUsageError = 1;
constexpr int kRuntimeError = 2;

struct Options {
  std::string config_path;
  std::string out_override;
  std::size_t workers = 0;     // 0 = keep config value
  std::size_t seed_count = 0;  // 0 = keep config seeds
};

void add_common_flags(CLI::App* cmd, Options& opts, bool config_required) {
  auto* config = cmd->add_option("--config", opts.config_path, "experiment config (JSON)");
  if (config_required) config->required();
  cmd->add_option("--out", opts.out_override, "output directory (overrides config)");
  cmd->add_option("--workers", opts.workers, "parallel workers (overrides config)");
  cmd->add_option("--seed-count", opts.seed_count, "use seeds 1..n (overrides config)");
}

drift::ExperimentConfig load_config(const Options& opts) {
  drift::ExperimentConfig config = drift::ExperimentConfig::load(opts.config_path);
  if (!opts.out_override.empty()) config.out = opts.out_override;
  if (opts.workers > 0) config.workers = opts.workers;
  if (opts.seed_count > 0) {
    config.seeds.clear();
    for (std::size_t i = 1; i <= opts.seed_count; ++i) config.seeds.push_back(i);
  }
  config.validate();
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming concept-drift detection harness"};
  app.require_subcommand(1);

  Options opts;
  CLI::App* generate =
      app.add_subcommand("generate", "Write the config's synthetic streams as CSVs with manifests");
  add_common_flags(generate, opts, true);

  CLI::App* run =
      app.add_subcommand("run", "Run every detector over every stream and seed; write reports");
  add_common_flags(run, opts, true);

  CLI::App* evaluate =
      app.add_subcommand("evaluate", "Aggregate per-run reports into a detector x stream table");
  add_common_flags(evaluate, opts, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;  // --help exits 0; bad flags are usage errors
  }

  drift::ExperimentConfig config;
  std::string evaluate_dir = opts.out_override;
  try {
    if (generate->parsed() || run->parsed()) {
      config = load_config(opts);
    } else if (evaluate_dir.empty()) {
      if (opts.config_path.empty()) {
        std::cerr << "evaluate: pass --out <run-dir> or --config <file>\n";
        return kUsageError;
      }
      evaluate_dir = load_config(opts).out;
    }
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsageError;
  }

  try {
    if (generate->parsed()) return drift::cmd_generate(config);
    if (run->parsed()) return drift::cmd_run(config);
    return drift::cmd_evaluate(evaluate_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
}
