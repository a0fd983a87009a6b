#include "trgr/experiment.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include "trgr/checkpoint.hpp"
#include "trgr/dataset_io.hpp"
#include "trgr/errors.hpp"
#include "trgr/rng.hpp"

namespace trgr {

namespace fs = std::filesystem;

namespace {

std::string hex64(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void require_file(const fs::path& path, const char* what) {
  if (!fs::exists(path)) throw std::runtime_error(std::string(what) + " not found: " + path.string());
}

NoiseSpec objective_noise(const ScenarioConfig& scenario) {
  // SNR needs a positive variance; a noiseless scenario optimizes |h Phi H|^2.
  return {scenario.noise.variance > 0.0 ? scenario.noise.variance : 1.0, scenario.noise.seed};
}

nlohmann::json trace_summary(const OptimizationTrace& trace) {
  std::size_t accepted = 0;
  for (const auto& s : trace.iterations) accepted += s.accepted;
  return {{"steps", trace.iterations.size()}, {"accepted", accepted}};
}

}  // namespace

nlohmann::json OptimizeReport::to_json() const {
  nlohmann::json j = {
      {"snr_initial", initial_snr},
      {"snr_optimized", optimized_snr},
      {"gain_db", gain_db},
      {"trace", trace_summary(trace)},
      {"trace_monotone", trace_is_monotone(trace)},
      {"audits_passed", audits_passed},
  };
  if (oracle) {
    j["brute_force_snr"] = oracle->strength;
    j["brute_force_gap_db"] = 10.0 * std::log10(oracle->strength / optimized_snr);
    j["matches_brute_force"] = std::abs(oracle->strength - optimized_snr) <= 1e-12 * oracle->strength;
  }
  return j;
}

OptimizeReport optimize_scenario(const ExperimentConfig& cfg) {
  const auto& ris = cfg.scenario.ris;
  if (ris.size() == 0) throw std::invalid_argument("optimize: scenario has no RIS elements");
  const NoiseSpec noise = objective_noise(cfg.scenario);
  ObjectiveProbe probe = make_snr_probe(ris, noise);
  probe.measurement_noise_std = cfg.ris.measurement_noise_std;
  probe.seed = cfg.ris.probe_seed;

  OptimizeReport report;
  const Codebook initial(cfg.ris.rows, cfg.ris.cols);
  report.trace = optimize(probe, initial, cfg.ris.outer_iters);
  report.initial_snr = snr(ris, initial, noise);
  report.optimized_snr = snr(ris, report.trace.best_codebook, noise);
  report.gain_db = 10.0 * std::log10(report.optimized_snr / report.initial_snr);
  if (ris.size() <= kBruteForceMaxElements) {
    ObjectiveProbe exact = make_snr_probe(ris, noise);
    report.oracle = brute_force(exact, cfg.ris.rows, cfg.ris.cols);
  }
  const bool monotone = cfg.ris.measurement_noise_std > 0.0 || trace_is_monotone(report.trace);
  report.audits_passed = monotone && report.optimized_snr >= report.initial_snr &&
                         (!report.oracle || report.oracle->strength >= report.optimized_snr);
  return report;
}

ScenarioConfig without_ris(const ScenarioConfig& scenario) {
  ScenarioConfig out = scenario;
  out.ris = RisChannel{};
  out.name = scenario.name + "_ris_off";
  return out;
}

std::vector<CsiRecording> preprocess(const std::vector<CsiRecording>& recs, const PipelineSettings& pipeline) {
  std::vector<CsiRecording> out;
  out.reserve(recs.size());
  for (const auto& rec : recs) out.push_back(normalize(denoise_recording(rec, pipeline.filter)));
  return out;
}

std::size_t class_count(const std::vector<CsiRecording>& recs) {
  if (recs.empty()) throw std::invalid_argument("dataset is empty");
  std::set<std::uint16_t> labels;
  for (const auto& r : recs) {
    if (r.vacant()) throw std::invalid_argument("training data must not contain vacant recordings");
    labels.insert(r.label);
  }
  if (labels.size() < 2) {
    throw std::invalid_argument("training needs at least 2 classes, dataset has " +
                                std::to_string(labels.size()));
  }
  const std::size_t k = static_cast<std::size_t>(*labels.rbegin()) + 1;
  if (k != labels.size()) throw std::invalid_argument("labels must be contiguous from 0");
  return k;
}

TrainOutcome train_and_evaluate(const ExperimentConfig& cfg, const std::vector<CsiRecording>& recs,
                                std::optional<nn::RcnnModel>* model_out) {
  TrainOutcome outcome;
  outcome.classes = class_count(recs);
  const DatasetSplit split = split_dataset(preprocess(recs, cfg.pipeline), cfg.pipeline.split_seed);
  nn::RcnnModel model(recs.front().packets, recs.front().subcarriers, outcome.classes, cfg.train.seed);
  outcome.log = nn::train(model, split, cfg.train);
  outcome.metrics = evaluate(model, split.test.empty() ? split.train : split.test);
  if (model_out) model_out->emplace(std::move(model));
  return outcome;
}

CommandResult cmd_optimize(const ExperimentConfig& cfg, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  const OptimizeReport report = optimize_scenario(cfg);
  CommandResult result;
  const fs::path codebook = out_dir / "codebook.txt";
  const fs::path trace = out_dir / "trace.csv";
  const fs::path snr_report = out_dir / "snr_report.json";
  write_codebook_file(codebook.string(), report.trace.best_codebook);
  write_text(trace, report.trace.to_csv());
  write_text(snr_report, report.to_json().dump(2) + "\n");
  result.artifacts = {codebook, trace, snr_report};
  result.summary = report.to_json();
  result.ok = report.audits_passed;
  return result;
}

CommandResult cmd_generate(const ExperimentConfig& cfg, const fs::path& out_dir) {
  if (cfg.profiles.empty()) throw std::invalid_argument("generate: no subjects configured, dataset would be empty");
  fs::create_directories(out_dir);
  CommandResult result;

  Codebook codebook;
  bool audits = true;
  if (cfg.scenario.ris.size() > 0) {
    const OptimizeReport report = optimize_scenario(cfg);
    codebook = report.trace.best_codebook;
    audits = report.audits_passed;
    result.summary["optimize"] = report.to_json();
    const fs::path cb = out_dir / "codebook.txt";
    write_codebook_file(cb.string(), codebook);
    result.artifacts.push_back(cb);
  }

  const auto on = generate_dataset(cfg.profiles, cfg.scenario, codebook, cfg.episodes_per_subject, cfg.dataset_seed);
  const auto off = generate_dataset(cfg.profiles, without_ris(cfg.scenario), Codebook{},
                                    cfg.episodes_per_subject, cfg.dataset_seed);
  const fs::path on_path = out_dir / "dataset_ris_on.trgr";
  const fs::path off_path = out_dir / "dataset_ris_off.trgr";
  write_dataset_file(on_path.string(), on);
  write_dataset_file(off_path.string(), off);
  result.artifacts.push_back(on_path);
  result.artifacts.push_back(off_path);
  result.summary["records"] = on.size();
  result.summary["packets"] = on.front().packets;
  result.summary["subcarriers"] = on.front().subcarriers;
  result.ok = audits;
  return result;
}

CommandResult cmd_train(const ExperimentConfig& cfg, const fs::path& dataset, const fs::path& out_dir) {
  require_file(dataset, "dataset file");
  const auto recs = read_dataset_file(dataset.string());
  fs::create_directories(out_dir);
  std::optional<nn::RcnnModel> model;
  const TrainOutcome outcome = train_and_evaluate(cfg, recs, &model);

  const std::string stem = dataset.stem().string();
  const fs::path metrics = out_dir / (stem + ".metrics.json");
  const fs::path checkpoint = out_dir / (stem + ".model");
  const fs::path log = out_dir / (stem + ".train_log.csv");
  write_text(metrics, outcome.metrics.to_json().dump(2) + "\n");
  save_checkpoint_file(checkpoint.string(), *model);
  write_text(log, outcome.log.to_csv());

  CommandResult result;
  result.artifacts = {metrics, checkpoint, log};
  result.summary = outcome.metrics.to_json();
  return result;
}

CommandResult cmd_evaluate(const ExperimentConfig& cfg, const fs::path& checkpoint, const fs::path& dataset,
                           bool all, const fs::path& out_dir) {
  require_file(checkpoint, "checkpoint file");
  require_file(dataset, "dataset file");
  nn::RcnnModel model = load_checkpoint_file(checkpoint.string());
  const auto recs = preprocess(read_dataset_file(dataset.string()), cfg.pipeline);
  std::vector<CsiRecording> eval_set = recs;
  if (!all) eval_set = split_dataset(recs, cfg.pipeline.split_seed).test;
  const Metrics metrics = evaluate(model, eval_set);

  fs::create_directories(out_dir);
  const fs::path path = out_dir / (dataset.stem().string() + ".eval.json");
  write_text(path, metrics.to_json().dump(2) + "\n");
  CommandResult result;
  result.artifacts = {path};
  result.summary = metrics.to_json();
  return result;
}

CommandResult cmd_ablate(const ExperimentConfig& cfg, const std::optional<fs::path>& ris_on,
                         const std::optional<fs::path>& ris_off, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  CommandResult result;
  fs::path on_path, off_path;
  if (ris_on || ris_off) {
    if (!ris_on || !ris_off) throw std::invalid_argument("ablate: give both --ris-on and --ris-off, or neither");
    require_file(*ris_on, "dataset file");
    require_file(*ris_off, "dataset file");
    on_path = *ris_on;
    off_path = *ris_off;
  } else {
    const CommandResult gen = cmd_generate(cfg, out_dir);
    result.ok = gen.ok;
    result.artifacts = gen.artifacts;
    on_path = out_dir / "dataset_ris_on.trgr";
    off_path = out_dir / "dataset_ris_off.trgr";
  }
  const auto off = train_and_evaluate(cfg, read_dataset_file(off_path.string()));
  const auto on = train_and_evaluate(cfg, read_dataset_file(on_path.string()));
  const double delta = round_percent(on.metrics.accuracy) - round_percent(off.metrics.accuracy);

  nlohmann::json report = {
      {"ris_off", off.metrics.to_json()},
      {"ris_on", on.metrics.to_json()},
      {"accuracy_delta", std::round(delta * 100.0) / 100.0},
  };
  const fs::path report_path = out_dir / "ablation.json";
  write_text(report_path, report.dump(2) + "\n");

  std::ostringstream table;
  table << std::fixed << std::setprecision(2);
  table << "RIS  accuracy  recall  precision  f1\n";
  auto row = [&](const char* name, const Metrics& m) {
    table << name << "  " << round_percent(m.accuracy) << "  " << round_percent(m.macro_recall) << "  "
          << round_percent(m.macro_precision) << "  " << round_percent(m.macro_f1) << '\n';
  };
  row("off", off.metrics);
  row("on ", on.metrics);
  table << "accuracy delta: " << delta << " pp\n";
  const fs::path table_path = out_dir / "ablation.txt";
  write_text(table_path, table.str());

  result.artifacts.push_back(report_path);
  result.artifacts.push_back(table_path);
  result.summary = report;
  return result;
}

std::string format_shape_chain(std::size_t height, std::size_t width, std::size_t classes) {
  const auto rows = nn::rcnn_shape_chain(height, width, classes);
  std::ostringstream out;
  out << std::left << std::setw(18) << "Input" << "1x" << height << 'x' << width << '\n';
  for (const auto& r : rows) out << std::left << std::setw(18) << r.block << nn::shape_string(r.shape) << '\n';
  return out.str();
}

std::uint64_t file_hash(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return fnv1a64(bytes);
}

void write_manifest(const fs::path& out_dir, const std::string& command, const ExperimentConfig& cfg,
                    const CommandResult& result, double seconds) {
  const std::string config_text = to_json(cfg).dump();
  const auto* begin = reinterpret_cast<const unsigned char*>(config_text.data());
  nlohmann::json artifacts = nlohmann::json::array();
  for (const auto& a : result.artifacts) {
    artifacts.push_back({{"path", a.string()}, {"fnv1a64", hex64(file_hash(a))}});
  }
  const nlohmann::json manifest = {
      {"command", command},
      {"version", kVersion},
      {"config_hash", hex64(fnv1a64({begin, config_text.size()}))},
      {"seed", cfg.seed},
      {"artifacts", artifacts},
      {"ok", result.ok},
      {"wall_clock_s", seconds},
  };
  fs::create_directories(out_dir);
  write_text(out_dir / ("manifest_" + command + ".json"), manifest.dump(2) + "\n");
}

}  // namespace trgr
