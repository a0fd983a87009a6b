#include "trgr/config.hpp"

#include <fstream>
#include <optional>
#include <stdexcept>

#include "trgr/errors.hpp"
#include "trgr/rng.hpp"

namespace trgr {

namespace {

std::uint64_t derived(std::uint64_t master, std::uint64_t tag) { return hash_values(master, tag); }

std::uint64_t seed_or(const nlohmann::json& j, const char* key, std::uint64_t fallback) {
  return j.contains(key) ? j.at(key).get<std::uint64_t>() : fallback;
}

}  // namespace

void to_json(nlohmann::json& j, const SubjectProfile& p) {
  j = {{"subject_id", p.subject_id},   {"cadence_hz", p.cadence_hz},
       {"torso_amp", p.torso_amp},     {"limb_amp", p.limb_amp},
       {"harmonic_weights", p.harmonic_weights}, {"signature_seed", p.signature_seed}};
}

void from_json(const nlohmann::json& j, SubjectProfile& p) {
  p.subject_id = j.at("subject_id").get<std::uint16_t>();
  p.cadence_hz = j.at("cadence_hz").get<double>();
  p.torso_amp = j.at("torso_amp").get<double>();
  p.limb_amp = j.at("limb_amp").get<double>();
  p.harmonic_weights = j.at("harmonic_weights").get<std::vector<double>>();
  p.signature_seed = j.at("signature_seed").get<std::uint64_t>();
  p.validate();
}

void ExperimentConfig::validate() const {
  scenario.validate();
  if (scenario.ris.size() != 0 && scenario.ris.size() != ris.rows * ris.cols) {
    throw std::invalid_argument("config: RIS grid " + std::to_string(ris.rows) + "x" +
                                std::to_string(ris.cols) + " does not match channel with " +
                                std::to_string(scenario.ris.size()) + " elements");
  }
  if (ris.outer_iters < 1) throw std::invalid_argument("config: ris.outer_iters must be >= 1");
  if (episodes_per_subject < 1) throw std::invalid_argument("config: episodes_per_subject must be >= 1");
  for (const auto& p : profiles) p.validate();
  train.validate();
  if (pipeline.filter.window == 0 || pipeline.filter.window % 2 == 0) {
    throw std::invalid_argument("config: pipeline.window must be odd and positive");
  }
}

ExperimentConfig parse_config(const nlohmann::json& doc, std::optional<std::uint64_t> seed_override) {
  try {
    ExperimentConfig cfg;
    cfg.seed = seed_override ? *seed_override : doc.value("seed", std::uint64_t{1});
    cfg.output_dir = doc.value("output_dir", std::string("out"));

    const nlohmann::json ris_doc = doc.value("ris", nlohmann::json::object());
    cfg.ris.rows = ris_doc.value("rows", std::size_t{16});
    cfg.ris.cols = ris_doc.value("cols", std::size_t{16});
    cfg.ris.outer_iters = ris_doc.value("outer_iters", std::size_t{5});
    cfg.ris.measurement_noise_std = ris_doc.value("measurement_noise_std", 0.0);
    cfg.ris.probe_seed = seed_or(ris_doc, "probe_seed", derived(cfg.seed, 1));

    const nlohmann::json sc = doc.value("scenario", nlohmann::json::object());
    auto& scenario = cfg.scenario;
    scenario.name = sc.value("name", std::string("default"));
    scenario.wall_attenuation_db = sc.value("wall_attenuation_db", 30.0);
    scenario.dynamic_path_count = sc.value("dynamic_path_count", std::size_t{4});
    scenario.packets_per_second = sc.value("packets_per_second", 50.0);
    scenario.duration_s = sc.value("duration_s", 3.0);
    const nlohmann::json grid = sc.value("grid", nlohmann::json::object());
    scenario.grid.count = grid.value("count", std::size_t{256});
    scenario.grid.center_frequency = grid.value("center_frequency", 5.8e9);
    scenario.grid.bandwidth = grid.value("bandwidth", 160e6);

    if (sc.contains("channel")) {
      ChannelDescription channel = sc.at("channel").get<ChannelDescription>();
      scenario.direct = std::move(channel.direct);
      scenario.ris = std::move(channel.ris);
      scenario.noise = channel.noise;
    } else {
      const nlohmann::json rs = sc.value("rich_scattering", nlohmann::json::object());
      RichScatteringSpec spec;
      spec.ris_rows = cfg.ris.rows;
      spec.ris_cols = cfg.ris.cols;
      spec.direct_paths = rs.value("direct_paths", spec.direct_paths);
      spec.direct_power = rs.value("direct_power", spec.direct_power);
      spec.element_power = rs.value("element_power", spec.element_power);
      spec.direct_max_delay = rs.value("direct_max_delay", spec.direct_max_delay);
      spec.ris_delay = rs.value("ris_delay", spec.ris_delay);
      spec.seed = seed_or(rs, "seed", derived(cfg.seed, 2));
      const ChannelDescription channel = make_rich_scattering_channel(spec);
      scenario.direct = channel.direct;
      scenario.ris = channel.ris;
    }
    if (sc.contains("noise")) {
      scenario.noise.variance = sc.at("noise").value("variance", 0.0);
      scenario.noise.seed = seed_or(sc.at("noise"), "seed", derived(cfg.seed, 3));
    } else if (!sc.contains("channel")) {
      scenario.noise = {0.0, derived(cfg.seed, 3)};
    }

    if (doc.contains("profiles")) {
      cfg.profiles = doc.at("profiles").get<std::vector<SubjectProfile>>();
    } else {
      const nlohmann::json subjects = doc.value("subjects", nlohmann::json::object());
      cfg.profiles = default_profiles(subjects.value("count", std::size_t{4}),
                                      seed_or(subjects, "seed", derived(cfg.seed, 4)));
    }
    cfg.episodes_per_subject = doc.value("episodes_per_subject", std::size_t{50});
    cfg.dataset_seed = seed_or(doc, "dataset_seed", derived(cfg.seed, 5));

    const nlohmann::json pipe = doc.value("pipeline", nlohmann::json::object());
    cfg.pipeline.filter.window = pipe.value("window", std::size_t{5});
    cfg.pipeline.split_seed = seed_or(pipe, "split_seed", derived(cfg.seed, 6));

    const nlohmann::json tr = doc.value("train", nlohmann::json::object());
    cfg.train.learning_rate = tr.value("learning_rate", 1e-3);
    cfg.train.batch_size = tr.value("batch_size", std::size_t{8});
    cfg.train.epochs = tr.value("epochs", std::size_t{20});
    cfg.train.seed = seed_or(tr, "seed", derived(cfg.seed, 7));

    cfg.validate();
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
}

ExperimentConfig load_config_file(const std::string& path, std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config file not found: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("config " + path + ": " + e.what());
  }
  return parse_config(doc, seed_override);
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
  ChannelDescription channel{cfg.scenario.direct, cfg.scenario.ris, cfg.scenario.noise};
  const auto& sc = cfg.scenario;
  return {
      {"seed", cfg.seed},
      {"output_dir", cfg.output_dir},
      {"scenario",
       {{"name", sc.name},
        {"wall_attenuation_db", sc.wall_attenuation_db},
        {"dynamic_path_count", sc.dynamic_path_count},
        {"packets_per_second", sc.packets_per_second},
        {"duration_s", sc.duration_s},
        {"grid", {{"count", sc.grid.count}, {"center_frequency", sc.grid.center_frequency}, {"bandwidth", sc.grid.bandwidth}}},
        {"noise", {{"variance", sc.noise.variance}, {"seed", sc.noise.seed}}},
        {"channel", channel}}},
      {"profiles", cfg.profiles},
      {"episodes_per_subject", cfg.episodes_per_subject},
      {"dataset_seed", cfg.dataset_seed},
      {"ris",
       {{"rows", cfg.ris.rows}, {"cols", cfg.ris.cols}, {"outer_iters", cfg.ris.outer_iters},
        {"measurement_noise_std", cfg.ris.measurement_noise_std}, {"probe_seed", cfg.ris.probe_seed}}},
      {"pipeline", {{"window", cfg.pipeline.filter.window}, {"split_seed", cfg.pipeline.split_seed}}},
      {"train",
       {{"learning_rate", cfg.train.learning_rate}, {"batch_size", cfg.train.batch_size},
        {"epochs", cfg.train.epochs}, {"seed", cfg.train.seed}}},
  };
}

nlohmann::json default_config_json() {
  return {
      {"seed", 1},
      {"output_dir", "out"},
      {"scenario",
       {{"name", "desk"},
        {"wall_attenuation_db", 30.0},
        {"dynamic_path_count", 4},
        {"grid", {{"count", 256}, {"center_frequency", 5.8e9}, {"bandwidth", 160e6}}},
        {"noise", {{"variance", 0.1}}}}},
      {"subjects", {{"count", 4}}},
      {"episodes_per_subject", 50},
      {"ris", {{"rows", 16}, {"cols", 16}, {"outer_iters", 5}}},
      {"pipeline", {{"window", 5}}},
      {"train", {{"learning_rate", 1e-3}, {"batch_size", 8}, {"epochs", 20}}},
  };
}

}  // namespace trgr
