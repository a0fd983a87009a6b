#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trgr/dsp.hpp"
#include "trgr/gait.hpp"
#include "trgr/nn/adam.hpp"
#include "trgr/nn/rcnn.hpp"

namespace trgr::nn {

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t batch_size = 8;
  std::size_t epochs = 20;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EpochLog {
  std::size_t epoch = 0;
  double loss = 0.0;       // mean training loss over the epoch
  double train_acc = 0.0;  // fraction correct in training mode
  std::optional<double> test_acc;
};

struct TrainLog {
  std::vector<EpochLog> epochs;
  /// epoch,loss,train_acc,test_acc
  std::string to_csv() const;
};

/// Stacks recordings into a B x 1 x T x S tensor.
Tensor make_batch(const std::vector<CsiRecording>& recs, std::span<const std::size_t> indices);

/// Mean cross-entropy in eval mode.
double mean_loss(RcnnModel& model, const std::vector<CsiRecording>& recs);

/// Fraction of recordings whose eval-mode prediction matches the label.
double accuracy(RcnnModel& model, const std::vector<CsiRecording>& recs);

/// Adam + softmax cross-entropy. Batches are reshuffled each epoch from a
/// stream seeded by cfg.seed. Throws std::invalid_argument for an empty
/// training set or a label >= model.classes().
TrainLog train(RcnnModel& model, const DatasetSplit& data, const TrainConfig& cfg);

}  // namespace trgr::nn
