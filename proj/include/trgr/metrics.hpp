#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <json.hpp>

#include "trgr/gait.hpp"
#include "trgr/nn/rcnn.hpp"

namespace trgr {

/// Confusion matrix (rows = truth, columns = prediction) and macro scores.
/// Classes that never occur in the truth are left out of the macro
/// averages; a class with no predicted positives has precision 0.
struct Metrics {
  std::vector<std::vector<std::size_t>> confusion;
  double accuracy = 0.0;
  double macro_recall = 0.0;
  double macro_precision = 0.0;
  double macro_f1 = 0.0;

  /// Percentages rounded to two decimals plus the raw confusion matrix.
  nlohmann::json to_json() const;
};

Metrics compute_metrics(std::span<const std::size_t> truth, std::span<const std::size_t> predicted,
                        std::size_t classes);

/// Eval-mode predictions on preprocessed recordings.
Metrics evaluate(nn::RcnnModel& model, const std::vector<CsiRecording>& recs);

double round_percent(double fraction);

}  // namespace trgr
