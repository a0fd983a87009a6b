#include "trgr/nn/train.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "trgr/errors.hpp"
#include "trgr/rng.hpp"

namespace trgr::nn {

namespace {

constexpr std::size_t kEvalBatch = 16;

void check_recordings(const RcnnModel& model, const std::vector<CsiRecording>& recs) {
  for (const auto& rec : recs) {
    if (rec.packets != model.input_height() || rec.subcarriers != model.input_width()) {
      throw DimensionError("recording shape " + std::to_string(rec.packets) + "x" +
                           std::to_string(rec.subcarriers) + " does not match model input " +
                           std::to_string(model.input_height()) + "x" +
                           std::to_string(model.input_width()));
    }
    if (rec.label >= model.classes()) {
      throw std::invalid_argument("label " + std::to_string(rec.label) + " out of range for " +
                                  std::to_string(model.classes()) + " classes");
    }
  }
}

std::vector<std::size_t> labels_of(const std::vector<CsiRecording>& recs,
                                   std::span<const std::size_t> indices) {
  std::vector<std::size_t> labels;
  labels.reserve(indices.size());
  for (auto i : indices) labels.push_back(recs[i].label);
  return labels;
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || batch_size == 0 || epochs == 0) {
    throw std::invalid_argument("train config: learning_rate, batch_size and epochs must be positive");
  }
}

std::string TrainLog::to_csv() const {
  std::ostringstream out;
  out << "epoch,loss,train_acc,test_acc\n" << std::setprecision(10);
  for (const auto& e : epochs) {
    out << e.epoch << ',' << e.loss << ',' << e.train_acc << ',';
    if (e.test_acc) out << *e.test_acc;
    out << '\n';
  }
  return out.str();
}

Tensor make_batch(const std::vector<CsiRecording>& recs, std::span<const std::size_t> indices) {
  if (indices.empty()) throw std::invalid_argument("make_batch: empty batch");
  const std::size_t t = recs[indices[0]].packets, s = recs[indices[0]].subcarriers;
  Tensor batch({indices.size(), 1, t, s});
  for (std::size_t b = 0; b < indices.size(); ++b) {
    const auto& rec = recs[indices[b]];
    if (rec.packets != t || rec.subcarriers != s) throw DimensionError("make_batch: mixed recording shapes");
    std::copy(rec.magnitudes.begin(), rec.magnitudes.end(), batch.data() + b * t * s);
  }
  return batch;
}

double mean_loss(RcnnModel& model, const std::vector<CsiRecording>& recs) {
  if (recs.empty()) throw std::invalid_argument("mean_loss: no recordings");
  check_recordings(model, recs);
  double total = 0.0;
  std::vector<std::size_t> idx(recs.size());
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t start = 0; start < idx.size(); start += kEvalBatch) {
    const std::span<const std::size_t> chunk(idx.data() + start, std::min(kEvalBatch, idx.size() - start));
    const auto result = softmax_cross_entropy(model.forward(make_batch(recs, chunk), Mode::eval),
                                              labels_of(recs, chunk));
    total += result.loss * static_cast<double>(chunk.size());
  }
  return total / static_cast<double>(recs.size());
}

double accuracy(RcnnModel& model, const std::vector<CsiRecording>& recs) {
  if (recs.empty()) throw std::invalid_argument("accuracy: no recordings");
  check_recordings(model, recs);
  std::size_t correct = 0;
  std::vector<std::size_t> idx(recs.size());
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t start = 0; start < idx.size(); start += kEvalBatch) {
    const std::span<const std::size_t> chunk(idx.data() + start, std::min(kEvalBatch, idx.size() - start));
    const auto pred = model.predict(make_batch(recs, chunk));
    for (std::size_t b = 0; b < chunk.size(); ++b) correct += pred[b] == recs[chunk[b]].label;
  }
  return static_cast<double>(correct) / static_cast<double>(recs.size());
}

TrainLog train(RcnnModel& model, const DatasetSplit& data, const TrainConfig& cfg) {
  cfg.validate();
  if (data.train.empty()) throw std::invalid_argument("train: empty training set");
  check_recordings(model, data.train);
  check_recordings(model, data.test);

  Adam optimizer(model.parameters(), AdamConfig{cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.epsilon});
  Rng shuffler(hash_values(cfg.seed, 0x5348));
  std::vector<std::size_t> order(data.train.size());
  std::iota(order.begin(), order.end(), 0);

  TrainLog log;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffler.shuffle(std::span<std::size_t>(order));
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::span<const std::size_t> chunk(order.data() + start,
                                               std::min(cfg.batch_size, order.size() - start));
      const auto labels = labels_of(data.train, chunk);
      model.zero_grad();
      const Tensor logits = model.forward(make_batch(data.train, chunk), Mode::train);
      const auto result = softmax_cross_entropy(logits, labels);
      model.backward(result.grad);
      optimizer.step();

      loss_sum += result.loss * static_cast<double>(chunk.size());
      const std::size_t k = model.classes();
      for (std::size_t b = 0; b < chunk.size(); ++b) {
        const double* z = logits.data() + b * k;
        correct += static_cast<std::size_t>(std::max_element(z, z + k) - z) == labels[b];
      }
    }
    EpochLog entry;
    entry.epoch = epoch;
    entry.loss = loss_sum / static_cast<double>(order.size());
    entry.train_acc = static_cast<double>(correct) / static_cast<double>(order.size());
    if (!data.test.empty()) entry.test_acc = accuracy(model, data.test);
    log.epochs.push_back(entry);
  }
  return log;
}

}  // namespace trgr::nn
