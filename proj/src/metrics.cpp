#include "trgr/metrics.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "trgr/errors.hpp"
#include "trgr/nn/train.hpp"

namespace trgr {

double round_percent(double fraction) { return std::round(fraction * 10000.0) / 100.0; }

nlohmann::json Metrics::to_json() const {
  return {
      {"accuracy", round_percent(accuracy)},
      {"recall", round_percent(macro_recall)},
      {"precision", round_percent(macro_precision)},
      {"f1", round_percent(macro_f1)},
      {"confusion", confusion},
  };
}

Metrics compute_metrics(std::span<const std::size_t> truth, std::span<const std::size_t> predicted,
                        std::size_t classes) {
  if (truth.empty()) throw std::invalid_argument("compute_metrics: no samples");
  if (truth.size() != predicted.size()) throw DimensionError("compute_metrics: truth/prediction length mismatch");
  Metrics m;
  m.confusion.assign(classes, std::vector<std::size_t>(classes, 0));
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] >= classes || predicted[i] >= classes) {
      throw std::invalid_argument("compute_metrics: label out of range");
    }
    ++m.confusion[truth[i]][predicted[i]];
  }

  std::size_t correct = 0;
  double recall_sum = 0.0, precision_sum = 0.0, f1_sum = 0.0;
  std::size_t present = 0;
  for (std::size_t c = 0; c < classes; ++c) {
    correct += m.confusion[c][c];
    const std::size_t actual = std::accumulate(m.confusion[c].begin(), m.confusion[c].end(), std::size_t{0});
    if (actual == 0) continue;
    std::size_t predicted_pos = 0;
    for (std::size_t r = 0; r < classes; ++r) predicted_pos += m.confusion[r][c];
    const double tp = static_cast<double>(m.confusion[c][c]);
    const double recall = tp / static_cast<double>(actual);
    const double precision = predicted_pos ? tp / static_cast<double>(predicted_pos) : 0.0;
    const double f1 = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    recall_sum += recall;
    precision_sum += precision;
    f1_sum += f1;
    ++present;
  }
  m.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
  m.macro_recall = recall_sum / static_cast<double>(present);
  m.macro_precision = precision_sum / static_cast<double>(present);
  m.macro_f1 = f1_sum / static_cast<double>(present);
  return m;
}

Metrics evaluate(nn::RcnnModel& model, const std::vector<CsiRecording>& recs) {
  if (recs.empty()) throw std::invalid_argument("evaluate: no recordings");
  std::vector<std::size_t> truth, predicted;
  truth.reserve(recs.size());
  predicted.reserve(recs.size());
  constexpr std::size_t chunk = 16;
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < recs.size(); start += chunk) {
    idx.clear();
    for (std::size_t i = start; i < std::min(recs.size(), start + chunk); ++i) {
      if (recs[i].label >= model.classes()) {
        throw std::invalid_argument("evaluate: label " + std::to_string(recs[i].label) + " out of range");
      }
      idx.push_back(i);
      truth.push_back(recs[i].label);
    }
    for (auto p : model.predict(nn::make_batch(recs, idx))) predicted.push_back(p);
  }
  return compute_metrics(truth, predicted, model.classes());
}

}  // namespace trgr
