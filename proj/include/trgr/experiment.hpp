#pragma once

// End-to-end experiment commands shared by the CLI and the integration
// tests. Each command writes its artifacts plus a manifest into the output
// directory and returns a summary.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "trgr/config.hpp"
#include "trgr/metrics.hpp"
#include "trgr/nn/train.hpp"
#include "trgr/ris_optimizer.hpp"

namespace trgr {

inline constexpr const char* kVersion = "1.0.0";

struct OptimizeReport {
  OptimizationTrace trace;
  double initial_snr = 0.0;
  double optimized_snr = 0.0;
  double gain_db = 0.0;
  /// Exhaustive optimum, when the grid is small enough.
  std::optional<BruteForceResult> oracle;
  bool audits_passed = false;

  nlohmann::json to_json() const;
};

/// Runs the line-flip optimizer on the scenario's RIS channel starting from
/// the all-zeros codebook.
OptimizeReport optimize_scenario(const ExperimentConfig& cfg);

/// The scenario with its RIS removed (codebook 0x0).
ScenarioConfig without_ris(const ScenarioConfig& scenario);

/// Denoise then normalize each recording.
std::vector<CsiRecording> preprocess(const std::vector<CsiRecording>& recs, const PipelineSettings& pipeline);

/// Number of classes K; requires labels 0..K-1 with K >= 2 and no vacant label.
std::size_t class_count(const std::vector<CsiRecording>& recs);

struct TrainOutcome {
  Metrics metrics;
  nn::TrainLog log;
  std::size_t classes = 0;
};

/// preprocess -> split -> train -> evaluate on the test split. The trained
/// model is returned through `model_out` when given.
TrainOutcome train_and_evaluate(const ExperimentConfig& cfg, const std::vector<CsiRecording>& recs,
                                std::optional<nn::RcnnModel>* model_out = nullptr);

struct CommandResult {
  nlohmann::json summary;
  std::vector<std::filesystem::path> artifacts;
  bool ok = true;
};

CommandResult cmd_optimize(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);
CommandResult cmd_generate(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);
CommandResult cmd_train(const ExperimentConfig& cfg, const std::filesystem::path& dataset,
                        const std::filesystem::path& out_dir);
/// Evaluates a checkpoint on the test split (or every recording with all=true).
CommandResult cmd_evaluate(const ExperimentConfig& cfg, const std::filesystem::path& checkpoint,
                           const std::filesystem::path& dataset, bool all,
                           const std::filesystem::path& out_dir);
/// Uses the given datasets when both exist; generates them when neither is
/// given. A given path that does not exist is an error naming it.
CommandResult cmd_ablate(const ExperimentConfig& cfg, const std::optional<std::filesystem::path>& ris_on,
                         const std::optional<std::filesystem::path>& ris_off,
                         const std::filesystem::path& out_dir);

/// Table-style shape chain; `ok` is false if the chain underflows.
std::string format_shape_chain(std::size_t height, std::size_t width, std::size_t classes);

/// Writes manifest_<command>.json with config hash, artifact hashes and timing.
void write_manifest(const std::filesystem::path& out_dir, const std::string& command,
                    const ExperimentConfig& cfg, const CommandResult& result, double seconds);

std::uint64_t file_hash(const std::filesystem::path& path);

}  // namespace trgr
