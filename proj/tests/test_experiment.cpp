#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "trgr/config.hpp"
#include "trgr/dataset_io.hpp"
#include "trgr/experiment.hpp"

using namespace trgr;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("trgr_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Two subjects, a handful of episodes, 4x4 RIS, two epochs: seconds, not minutes.
nlohmann::json tiny_config() {
  nlohmann::json j = default_config_json();
  j["subjects"]["count"] = 2;
  j["episodes_per_subject"] = 6;
  j["ris"]["rows"] = 4;
  j["ris"]["cols"] = 4;
  j["scenario"]["rich_scattering"] = {{"seed", 5}};
  j["train"]["epochs"] = 2;
  return j;
}

nlohmann::json single_element_channel() {
  return nlohmann::json::parse(R"({
    "direct": [],
    "ris": {"tx_to_ris": [[1, 0]], "ris_to_rx": [[1, 0]], "delays": [0]},
    "noise": {"variance": 1, "seed": 0}})");
}

}  // namespace

TEST_CASE("optimize on a single unit element reports zero gain") {
  nlohmann::json j = default_config_json();
  j["ris"]["rows"] = 1;
  j["ris"]["cols"] = 1;
  j["scenario"]["channel"] = single_element_channel();
  j["scenario"].erase("noise");  // the channel document carries its own noise
  const auto cfg = parse_config(j);
  const auto report = optimize_scenario(cfg);
  CHECK(report.gain_db == doctest::Approx(0.0));
  CHECK(report.audits_passed);
  REQUIRE(report.oracle.has_value());
  CHECK(report.oracle->strength == doctest::Approx(1.0));
}

TEST_CASE("optimize on 8 elements reports the oracle comparison") {
  nlohmann::json j = default_config_json();
  j["ris"]["rows"] = 2;
  j["ris"]["cols"] = 4;
  j["scenario"]["rich_scattering"] = {{"seed", 77}};
  const auto dir = scratch("optimize8");
  const auto result = cmd_optimize(parse_config(j), dir);
  CHECK(result.ok);
  const auto report = nlohmann::json::parse(slurp(dir / "snr_report.json"));
  CHECK(report.contains("brute_force_snr"));
  CHECK(report.contains("brute_force_gap_db"));
  CHECK(report["brute_force_snr"].get<double>() >= report["snr_optimized"].get<double>() * (1 - 1e-12));
  CHECK(report["brute_force_gap_db"].get<double>() >= -1e-9);
  CHECK(report["matches_brute_force"].get<bool>() ==
        (report["brute_force_gap_db"].get<double>() <= 1e-9));
  const std::string codebook = slurp(dir / "codebook.txt");
  CHECK(std::count(codebook.begin(), codebook.end(), '\n') == 2);
  CHECK(slurp(dir / "trace.csv").rfind("t,i,kind,index,s_current,accepted\n", 0) == 0);
}

TEST_CASE("optimize on the default 16x16 scenario gains and stays monotone") {
  const auto dir = scratch("optimize16");
  const auto cfg = parse_config(default_config_json());
  const auto result = cmd_optimize(cfg, dir);
  CHECK(result.ok);
  CHECK(result.summary["gain_db"].get<double>() > 0.0);
  CHECK(result.summary["trace_monotone"].get<bool>());
  CHECK(result.summary["trace"]["steps"] == 160);
  CHECK_FALSE(result.summary.contains("brute_force_snr"));
  write_manifest(dir, "optimize", cfg, result, 0.5);
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest_optimize.json"));
  CHECK(manifest["command"] == "optimize");
  CHECK(manifest["version"] == "1.0.0");
  CHECK(manifest["artifacts"].size() == 3);
  CHECK(manifest["config_hash"].get<std::string>().size() == 16);
}

TEST_CASE("generate writes both datasets and is byte-identical on rerun") {
  const auto cfg = parse_config(tiny_config());
  const auto a = scratch("generate_a");
  const auto b = scratch("generate_b");
  const auto ra = cmd_generate(cfg, a);
  cmd_generate(cfg, b);
  CHECK(ra.summary["records"] == 12);
  CHECK(ra.summary["packets"] == 150);
  CHECK(ra.summary["subcarriers"] == 256);
  for (const char* f : {"dataset_ris_on.trgr", "dataset_ris_off.trgr", "codebook.txt"}) {
    CHECK(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
  CHECK(slurp(a / "dataset_ris_on.trgr") != slurp(a / "dataset_ris_off.trgr"));
  const auto recs = read_dataset_file((a / "dataset_ris_on.trgr").string());
  CHECK(recs.size() == 12);
  CHECK(recs[0].packets == 150);

  nlohmann::json none = tiny_config();
  none["subjects"]["count"] = 0;
  CHECK_THROWS_AS(cmd_generate(parse_config(none), scratch("generate_none")), std::invalid_argument);
}

TEST_CASE("train, evaluate and determinism of the metrics file") {
  const auto cfg = parse_config(tiny_config());
  const auto data = scratch("train_data");
  cmd_generate(cfg, data);
  const auto a = scratch("train_a");
  const auto b = scratch("train_b");
  const auto ra = cmd_train(cfg, data / "dataset_ris_on.trgr", a);
  cmd_train(cfg, data / "dataset_ris_on.trgr", b);
  for (const char* f : {"dataset_ris_on.metrics.json", "dataset_ris_on.model", "dataset_ris_on.train_log.csv"}) {
    CHECK(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
  CHECK(ra.summary.contains("accuracy"));

  const auto eval = cmd_evaluate(cfg, a / "dataset_ris_on.model", data / "dataset_ris_on.trgr", false, a);
  // The same checkpoint on the same test split reproduces the training-time metrics.
  CHECK(eval.summary == ra.summary);
  const auto all = cmd_evaluate(cfg, a / "dataset_ris_on.model", data / "dataset_ris_on.trgr", true, a);
  std::size_t total = 0;
  for (const auto& row : all.summary["confusion"])
    for (const auto& v : row) total += v.get<std::size_t>();
  CHECK(total == 12);
}

TEST_CASE("training refuses a single-class dataset") {
  nlohmann::json j = tiny_config();
  j["subjects"]["count"] = 1;
  const auto cfg = parse_config(j);
  const auto dir = scratch("one_class");
  cmd_generate(cfg, dir);
  CHECK_THROWS_WITH_AS(cmd_train(cfg, dir / "dataset_ris_on.trgr", dir), doctest::Contains("at least 2 classes"),
                       std::invalid_argument);
}

TEST_CASE("missing files are reported by path") {
  const auto cfg = parse_config(tiny_config());
  const auto dir = scratch("missing");
  const fs::path ghost = dir / "nope_ris_on.trgr";
  CHECK_THROWS_WITH(cmd_ablate(cfg, ghost, dir / "nope_off.trgr", dir), doctest::Contains(ghost.string().c_str()));
  CHECK_THROWS_WITH(cmd_train(cfg, ghost, dir), doctest::Contains(ghost.string().c_str()));
  CHECK_THROWS_WITH(cmd_evaluate(cfg, dir / "m.model", ghost, false, dir), doctest::Contains("m.model"));
  CHECK_THROWS_AS(cmd_ablate(cfg, ghost, std::nullopt, dir), std::invalid_argument);
}

TEST_CASE("ablate on a noiseless scenario still emits a report") {
  nlohmann::json j = tiny_config();
  j["scenario"]["noise"]["variance"] = 0.0;
  const auto dir = scratch("ablate_silent");
  const auto result = cmd_ablate(parse_config(j), std::nullopt, std::nullopt, dir);
  CHECK(fs::exists(dir / "ablation.json"));
  CHECK(slurp(dir / "ablation.txt").find("accuracy delta") != std::string::npos);
  CHECK(result.summary.contains("accuracy_delta"));
  CHECK(result.summary["ris_on"].contains("f1"));
}

TEST_CASE("config seeds: override, derivation and explicit sub-seeds") {
  const auto base = parse_config(default_config_json());
  const auto other = parse_config(default_config_json(), 2);
  CHECK(other.seed == 2);
  CHECK(other.dataset_seed != base.dataset_seed);
  CHECK(other.train.seed != base.train.seed);
  CHECK(other.profiles[0].signature_seed != base.profiles[0].signature_seed);

  nlohmann::json pinned = default_config_json();
  pinned["dataset_seed"] = 99;
  CHECK(parse_config(pinned, 5).dataset_seed == 99);

  // The resolved form re-parses to the same configuration.
  const auto again = parse_config(to_json(base));
  CHECK(again.dataset_seed == base.dataset_seed);
  CHECK(again.scenario.ris.tx_to_ris == base.scenario.ris.tx_to_ris);
  CHECK(again.scenario.noise.variance == base.scenario.noise.variance);
  CHECK(again.profiles[3].cadence_hz == base.profiles[3].cadence_hz);
  CHECK(to_json(again) == to_json(base));

  nlohmann::json bad = default_config_json();
  bad["scenario"]["channel"] = single_element_channel();
  bad["ris"]["rows"] = 3;
  CHECK_THROWS_AS(parse_config(bad), std::invalid_argument);
}

TEST_CASE("shipped configs parse") {
  for (const char* name : {"desk_moderate.json", "desk_high_noise.json"}) {
    const auto cfg = load_config_file(std::string(TRGR_SOURCE_DIR) + "/configs/" + name);
    CHECK(cfg.profiles.size() == 4);
    CHECK(cfg.episodes_per_subject == 50);
    CHECK(cfg.scenario.grid.count == 256);
    CHECK(cfg.scenario.packet_count() == 150);
  }
  CHECK_THROWS(load_config_file("no/such/config.json"));
}

TEST_CASE("shape chain text") {
  const std::string text = format_shape_chain(150, 8192, 4);
  for (const char* row : {"8x74x4095", "8x37x2048", "8x18x1024", "16x8x511", "16x4x255", "8x2x128", "8x1x64", "8x1x32"})
    CHECK(text.find(row) != std::string::npos);
  CHECK(text.find("FC input") != std::string::npos);
}
