#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "trgr/dsp.hpp"
#include "trgr/rng.hpp"

using namespace trgr;

namespace {

CsiRecording random_recording(std::size_t t, std::size_t s, std::uint64_t seed, double offset = 3.0) {
  Rng rng(seed);
  CsiRecording rec;
  rec.packets = t;
  rec.subcarriers = s;
  rec.label = 0;
  for (std::size_t i = 0; i < t * s; ++i) rec.magnitudes.push_back(offset + rng.normal());
  return rec;
}

std::vector<CsiRecording> labelled(const std::vector<std::size_t>& per_class) {
  std::vector<CsiRecording> out;
  std::uint64_t seed = 0;
  for (std::size_t k = 0; k < per_class.size(); ++k) {
    for (std::size_t i = 0; i < per_class[k]; ++i) {
      CsiRecording r;
      r.packets = 1;
      r.subcarriers = 1;
      r.magnitudes = {static_cast<double>(seed)};
      r.label = static_cast<std::uint16_t>(k);
      r.episode_seed = seed++;
      out.push_back(r);
    }
  }
  return out;
}

double temporal_variance(const CsiRecording& r, std::size_t s) {
  double m = 0.0;
  for (std::size_t t = 0; t < r.packets; ++t) m += r.at(t, s);
  m /= static_cast<double>(r.packets);
  double q = 0.0;
  for (std::size_t t = 0; t < r.packets; ++t) q += (r.at(t, s) - m) * (r.at(t, s) - m);
  return q / static_cast<double>(r.packets);
}

}  // namespace

TEST_CASE("moving_average examples") {
  const std::vector<double> flat{5, 5, 5, 5};
  CHECK(moving_average(flat, {3}) == flat);
  const std::vector<double> ramp{1, 2, 3, 4, 5};
  const auto out = moving_average(ramp, {3});
  const std::vector<double> expected{1.5, 2, 3, 4, 4.5};
  REQUIRE(out.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(out[i] == doctest::Approx(expected[i]).epsilon(1e-15));
  const std::vector<double> x{0.3, -2.0, 7.5, 1.0};
  CHECK(moving_average(x, {1}) == x);
  CHECK(moving_average(std::vector<double>{}, {5}).empty());
  // Window wider than the series averages everything in reach.
  CHECK(moving_average(std::vector<double>{2, 4}, {7}) == std::vector<double>{3, 3});
}

TEST_CASE("moving_average rejects even and zero windows") {
  const std::vector<double> x{1, 2, 3};
  CHECK_THROWS_AS(moving_average(x, {2}), std::invalid_argument);
  CHECK_THROWS_AS(moving_average(x, {0}), std::invalid_argument);
}

TEST_CASE("moving_average is linear") {
  Rng rng(5);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 1 + rng.below(40);
    const std::size_t window = 1 + 2 * rng.below(6);
    std::vector<double> x(n), y(n), z(n);
    const double a = rng.uniform(-3, 3), b = rng.uniform(-3, 3);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = rng.normal();
      y[i] = rng.normal();
      z[i] = a * x[i] + b * y[i];
    }
    const auto mx = moving_average(x, {window});
    const auto my = moving_average(y, {window});
    const auto mz = moving_average(z, {window});
    for (std::size_t i = 0; i < n; ++i) CHECK(mz[i] == doctest::Approx(a * mx[i] + b * my[i]).epsilon(1e-12));
  }
}

TEST_CASE("denoise_recording") {
  CsiRecording constant;
  constant.packets = 10;
  constant.subcarriers = 3;
  for (std::size_t t = 0; t < 10; ++t)
    for (double v : {1.0, 2.5, 0.25}) constant.magnitudes.push_back(v);
  auto out = denoise_recording(constant, {5});
  for (std::size_t i = 0; i < out.magnitudes.size(); ++i)
    CHECK(out.magnitudes[i] == doctest::Approx(constant.magnitudes[i]).epsilon(1e-15));

  const auto noisy = random_recording(150, 16, 3);
  CHECK(denoise_recording(noisy, {1}).magnitudes == noisy.magnitudes);
  const auto smooth = denoise_recording(noisy, {5});
  CHECK(smooth.label == noisy.label);
  for (std::size_t s = 0; s < 16; ++s) CHECK(temporal_variance(smooth, s) < temporal_variance(noisy, s));
  // Filtering is along time only: column s equals the 1-D filter of column s.
  std::vector<double> col;
  for (std::size_t t = 0; t < 150; ++t) col.push_back(noisy.at(t, 4));
  const auto ref = moving_average(col, {5});
  for (std::size_t t = 0; t < 150; ++t) CHECK(smooth.at(t, 4) == doctest::Approx(ref[t]).epsilon(1e-14));
}

TEST_CASE("normalize moments, constants and idempotence") {
  const auto rec = random_recording(150, 32, 9, 10.0);
  const auto z = normalize(rec);
  double mean = 0.0;
  for (double v : z.magnitudes) mean += v;
  mean /= static_cast<double>(z.magnitudes.size());
  double var = 0.0;
  for (double v : z.magnitudes) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(z.magnitudes.size()));
  CHECK(std::abs(mean) <= 1e-9);
  CHECK(std::abs(sd - 1.0) <= 1e-9);

  const auto twice = normalize(z);
  for (std::size_t i = 0; i < z.magnitudes.size(); ++i) CHECK(std::abs(twice.magnitudes[i] - z.magnitudes[i]) <= 1e-12);

  CsiRecording constant;
  constant.packets = 2;
  constant.subcarriers = 2;
  constant.magnitudes = {4, 4, 4, 4};
  CHECK(normalize(constant).magnitudes == std::vector<double>{0, 0, 0, 0});
}

TEST_CASE("train_count_for rounds two thirds half up") {
  CHECK(train_count_for(50) == 33);
  CHECK(train_count_for(3) == 2);
  CHECK(train_count_for(100) == 67);
  CHECK(train_count_for(4) == 3);
  CHECK(train_count_for(7) == 5);
  for (std::size_t n = 3; n < 200; ++n) {
    const double exact = 2.0 * static_cast<double>(n) / 3.0;
    CHECK(train_count_for(n) == static_cast<std::size_t>(std::floor(exact + 0.5)));
  }
}

TEST_CASE("split_dataset partitions each class in the right proportion") {
  const auto recs = labelled({50, 50, 50, 50});
  const auto split = split_dataset(recs, 42);
  CHECK(split.split_seed == 42);
  CHECK(split.train.size() == 132);
  CHECK(split.test.size() == 68);
  std::map<std::uint16_t, std::size_t> train_counts, test_counts;
  std::set<std::uint64_t> seen;
  for (const auto& r : split.train) {
    ++train_counts[r.label];
    CHECK(seen.insert(r.episode_seed).second);
  }
  for (const auto& r : split.test) {
    ++test_counts[r.label];
    CHECK(seen.insert(r.episode_seed).second);
  }
  CHECK(seen.size() == 200);
  for (std::uint16_t k = 0; k < 4; ++k) {
    CHECK(train_counts[k] == 33);
    CHECK(test_counts[k] == 17);
  }
  // Input order is kept inside each half.
  for (std::size_t i = 1; i < split.train.size(); ++i) CHECK(split.train[i - 1].episode_seed < split.train[i].episode_seed);
  for (std::size_t i = 1; i < split.test.size(); ++i) CHECK(split.test[i - 1].episode_seed < split.test[i].episode_seed);
}

TEST_CASE("split_dataset small class, determinism and errors") {
  const auto three = split_dataset(labelled({3}), 1);
  CHECK(three.train.size() == 2);
  CHECK(three.test.size() == 1);

  const auto recs = labelled({10, 20, 7});
  const auto a = split_dataset(recs, 5);
  const auto b = split_dataset(recs, 5);
  REQUIRE(a.train.size() == b.train.size());
  for (std::size_t i = 0; i < a.train.size(); ++i) CHECK(a.train[i].episode_seed == b.train[i].episode_seed);
  CHECK(a.train.size() == 7 + 13 + 5);
  bool differs = false;
  const auto c = split_dataset(recs, 6);
  for (std::size_t i = 0; i < a.train.size(); ++i) differs |= a.train[i].episode_seed != c.train[i].episode_seed;
  CHECK(differs);

  CHECK_THROWS_AS(split_dataset(labelled({5, 2}), 1), std::invalid_argument);
}
