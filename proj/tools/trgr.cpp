// trgr: command-line front end for the through-wall gait recognition
// simulator. See README.md for the config schema.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "trgr/config.hpp"
#include "trgr/experiment.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string output;
};

void add_common(CLI::App* sub, CommonOptions& opts) {
  sub->add_option("--config", opts.config, "Experiment config (JSON); built-in defaults when omitted");
  sub->add_option("--seed", opts.seed, "Master seed, overrides the config");
  sub->add_option("--output", opts.output, "Output directory, overrides config output_dir");
}

trgr::ExperimentConfig load(const CommonOptions& opts) {
  trgr::ExperimentConfig cfg = opts.config.empty()
                                   ? trgr::parse_config(trgr::default_config_json(), opts.seed)
                                   : trgr::load_config_file(opts.config, opts.seed);
  if (!opts.output.empty()) cfg.output_dir = opts.output;
  return cfg;
}

int finish(const std::string& command, const trgr::ExperimentConfig& cfg, const trgr::CommandResult& result,
           std::chrono::steady_clock::time_point start) {
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  trgr::write_manifest(cfg.output_dir, command, cfg, result, seconds);
  std::cout << result.summary.dump(2) << '\n';
  if (!result.ok) std::cerr << command << ": internal audit failed\n";
  return result.ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transmissive-RIS through-wall gait recognition simulator"};
  app.require_subcommand(1);

  CommonOptions opt_optimize, opt_generate, opt_train, opt_evaluate, opt_ablate;
  auto* optimize = app.add_subcommand("optimize", "Optimize the RIS codebook and report the SNR gain");
  add_common(optimize, opt_optimize);

  auto* generate = app.add_subcommand("generate", "Synthesize ris_on / ris_off CSI datasets");
  add_common(generate, opt_generate);

  std::string train_dataset;
  auto* train = app.add_subcommand("train", "Train and evaluate the residual CNN on a dataset");
  add_common(train, opt_train);
  train->add_option("--dataset", train_dataset, "Dataset file")->required();

  std::string eval_dataset, eval_checkpoint;
  bool eval_all = false;
  auto* evaluate = app.add_subcommand("evaluate", "Evaluate a checkpoint on a dataset");
  add_common(evaluate, opt_evaluate);
  evaluate->add_option("--dataset", eval_dataset, "Dataset file")->required();
  evaluate->add_option("--checkpoint", eval_checkpoint, "Model checkpoint")->required();
  evaluate->add_flag("--all", eval_all, "Evaluate every recording instead of the test split");

  std::optional<std::string> ablate_on, ablate_off;
  auto* ablate = app.add_subcommand("ablate", "Compare recognition with and without the RIS");
  add_common(ablate, opt_ablate);
  ablate->add_option("--ris-on", ablate_on, "Existing ris_on dataset");
  ablate->add_option("--ris-off", ablate_off, "Existing ris_off dataset");

  std::size_t shape_height = 150, shape_width = 8192, shape_classes = 4;
  auto* shapes = app.add_subcommand("shapes", "Print the network shape chain for an input size");
  shapes->add_option("--height", shape_height, "Packets per recording (T)");
  shapes->add_option("--width", shape_width, "Subcarriers (S)");
  shapes->add_option("--classes", shape_classes, "Number of subjects (K)");

  CLI11_PARSE(app, argc, argv);

  try {
    const auto start = std::chrono::steady_clock::now();
    if (*shapes) {
      std::cout << trgr::format_shape_chain(shape_height, shape_width, shape_classes);
      return 0;
    }
    if (*optimize) {
      const auto cfg = load(opt_optimize);
      return finish("optimize", cfg, trgr::cmd_optimize(cfg, cfg.output_dir), start);
    }
    if (*generate) {
      const auto cfg = load(opt_generate);
      return finish("generate", cfg, trgr::cmd_generate(cfg, cfg.output_dir), start);
    }
    if (*train) {
      const auto cfg = load(opt_train);
      return finish("train", cfg, trgr::cmd_train(cfg, train_dataset, cfg.output_dir), start);
    }
    if (*evaluate) {
      const auto cfg = load(opt_evaluate);
      return finish("evaluate", cfg,
                    trgr::cmd_evaluate(cfg, eval_checkpoint, eval_dataset, eval_all, cfg.output_dir), start);
    }
    if (*ablate) {
      const auto cfg = load(opt_ablate);
      std::optional<fs::path> on, off;
      if (ablate_on) on = *ablate_on;
      if (ablate_off) off = *ablate_off;
      return finish("ablate", cfg, trgr::cmd_ablate(cfg, on, off, cfg.output_dir), start);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
