#include "trgr/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "trgr/rng.hpp"

namespace trgr {

std::vector<double> moving_average(std::span<const double> series, const FilterSpec& spec) {
  if (spec.window == 0 || spec.window % 2 == 0) {
    throw std::invalid_argument("moving_average: window must be odd and positive, got " +
                                std::to_string(spec.window));
  }
  const std::size_t n = series.size();
  const std::size_t half = spec.window / 2;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(n - 1, i + half);
    double sum = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) sum += series[j];
    out[i] = sum / static_cast<double>(hi - lo + 1);
  }
  return out;
}

CsiRecording denoise_recording(const CsiRecording& rec, const FilterSpec& spec) {
  CsiRecording out = rec;
  std::vector<double> column(rec.packets);
  for (std::size_t s = 0; s < rec.subcarriers; ++s) {
    for (std::size_t t = 0; t < rec.packets; ++t) column[t] = rec.at(t, s);
    const auto smoothed = moving_average(column, spec);
    for (std::size_t t = 0; t < rec.packets; ++t) out.at(t, s) = smoothed[t];
  }
  return out;
}

CsiRecording normalize(const CsiRecording& rec) {
  CsiRecording out = rec;
  const std::size_t n = rec.magnitudes.size();
  if (n == 0) return out;
  double mean = 0.0;
  for (double v : rec.magnitudes) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : rec.magnitudes) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);
  const double sd = std::sqrt(var);
  if (!(sd > 0.0)) {
    std::fill(out.magnitudes.begin(), out.magnitudes.end(), 0.0);
    return out;
  }
  for (auto& v : out.magnitudes) v = (v - mean) / sd;
  return out;
}

std::size_t train_count_for(std::size_t n) { return (2 * n + 1) / 3; }

DatasetSplit split_dataset(const std::vector<CsiRecording>& recs, std::uint64_t split_seed) {
  std::map<std::uint16_t, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < recs.size(); ++i) by_class[recs[i].label].push_back(i);

  std::vector<bool> in_train(recs.size(), false);
  for (auto& [label, indices] : by_class) {
    if (indices.size() < 3) {
      throw std::invalid_argument("split_dataset: class " + std::to_string(label) + " has " +
                                  std::to_string(indices.size()) + " recordings, need at least 3");
    }
    Rng rng(hash_values(split_seed, label, 0x53504c));
    rng.shuffle(std::span<std::size_t>(indices));
    const std::size_t k = train_count_for(indices.size());
    for (std::size_t j = 0; j < k; ++j) in_train[indices[j]] = true;
  }

  DatasetSplit split;
  split.split_seed = split_seed;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    (in_train[i] ? split.train : split.test).push_back(recs[i]);
  }
  return split;
}

}  // namespace trgr
