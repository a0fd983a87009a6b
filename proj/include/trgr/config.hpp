#pragma once

// Experiment configuration (one JSON document). Every seed is explicit:
// sub-seeds default to values derived from the master "seed".

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "trgr/channel.hpp"
#include "trgr/dsp.hpp"
#include "trgr/gait.hpp"
#include "trgr/nn/train.hpp"

namespace trgr {

struct RisSettings {
  std::size_t rows = 16;
  std::size_t cols = 16;
  std::size_t outer_iters = 5;
  double measurement_noise_std = 0.0;
  std::uint64_t probe_seed = 0;
};

struct PipelineSettings {
  FilterSpec filter;
  std::uint64_t split_seed = 0;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  ScenarioConfig scenario;
  std::vector<SubjectProfile> profiles;
  std::size_t episodes_per_subject = 50;
  std::uint64_t dataset_seed = 0;
  RisSettings ris;
  PipelineSettings pipeline;
  nn::TrainConfig train;
  std::string output_dir = "out";

  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
};

/// Parses a config document; `seed_override` (if set) replaces the master
/// seed before sub-seeds are derived.
ExperimentConfig parse_config(const nlohmann::json& doc, std::optional<std::uint64_t> seed_override = {});
ExperimentConfig load_config_file(const std::string& path, std::optional<std::uint64_t> seed_override = {});

/// Fully resolved form (all seeds and the channel written out).
nlohmann::json to_json(const ExperimentConfig& config);

/// Built-in desk-scale defaults: 16x16 rich-scattering RIS behind a 30 dB
/// wall, 4 subjects x 50 episodes, S = 256.
nlohmann::json default_config_json();

void to_json(nlohmann::json& j, const SubjectProfile& p);
void from_json(const nlohmann::json& j, SubjectProfile& p);

}  // namespace trgr
