#include "trgr/nn/rcnn.hpp"

#include <algorithm>

#include "trgr/errors.hpp"
#include "trgr/rng.hpp"

namespace trgr::nn {

std::vector<BlockSpec> rcnn_blocks(std::size_t classes) {
  auto conv_block = [](std::string name, std::size_t ch, std::size_t pad) {
    return BlockSpec{std::move(name), {conv_spec(ch, 3, 2, pad), batchnorm_spec(ch), relu_spec()}};
  };
  return {
      conv_block("Conv 1", 8, 0),
      {"Res-block 1", {residual_spec(8, 2)}},
      {"Res-block 2", {residual_spec(8, 1)}},
      {"Pooling-layer 1", {maxpool_spec(2, 2)}},
      conv_block("Conv 2", 16, 0),
      {"Pooling-layer 2", {maxpool_spec(2, 2)}},
      conv_block("Conv 3", 8, 1),
      {"Pooling-layer 3", {maxpool_spec(2, 2)}},
      conv_block("Conv 4", 8, 1),
      {"FC", {flatten_spec(), fc_spec(classes)}},
  };
}

std::vector<ShapeRow> rcnn_shape_chain(std::size_t height, std::size_t width, std::size_t classes) {
  if (classes == 0) throw DimensionError("shape chain: class count must be positive");
  std::vector<ShapeRow> rows;
  Shape shape{1, height, width};
  for (const auto& block : rcnn_blocks(classes)) {
    for (const auto& spec : block.layers) {
      if (spec.kind == LayerKind::fc) rows.push_back({"FC input", shape});
      shape = output_shape(spec, shape);
    }
    rows.push_back({block.name == "FC" ? "Output" : block.name, shape});
  }
  return rows;
}

RcnnModel::RcnnModel(std::size_t input_height, std::size_t input_width, std::size_t classes,
                     std::uint64_t seed)
    : height_(input_height), width_(input_width), classes_(classes) {
  if (classes < 1) throw std::invalid_argument("RcnnModel: need at least one class");
  rcnn_shape_chain(input_height, input_width, classes);
  Rng rng(hash_values(seed, 0x52434e4e));
  Shape shape{1, input_height, input_width};
  for (const auto& block : rcnn_blocks(classes)) {
    for (std::size_t i = 0; i < block.layers.size(); ++i) {
      Stage stage;
      stage.layer = make_layer(block.layers[i], shape, rng);
      if (i + 1 == block.layers.size()) stage.block_end = block.name;
      shape = output_shape(block.layers[i], shape);
      stages_.push_back(std::move(stage));
    }
  }
}

Tensor RcnnModel::forward(const Tensor& batch, Mode mode) {
  if (batch.rank() != 4 || batch.dim(1) != 1 || batch.dim(2) != height_ || batch.dim(3) != width_) {
    throw DimensionError("RcnnModel: expected B x 1 x " + std::to_string(height_) + " x " +
                         std::to_string(width_) + " input, got " + shape_string(batch.shape()));
  }
  last_shapes_.clear();
  Tensor x = batch;
  for (auto& stage : stages_) {
    x = stage.layer->forward(x, mode);
    if (!stage.block_end.empty()) {
      Shape per_sample(x.shape().begin() + 1, x.shape().end());
      last_shapes_.push_back({stage.block_end, std::move(per_sample)});
    }
  }
  return x;
}

Tensor RcnnModel::backward(const Tensor& grad_logits) {
  Tensor g = grad_logits;
  for (auto it = stages_.rbegin(); it != stages_.rend(); ++it) g = it->layer->backward(g);
  return g;
}

std::vector<std::size_t> RcnnModel::predict(const Tensor& batch) {
  const Tensor logits = forward(batch, Mode::eval);
  std::vector<std::size_t> out(logits.dim(0));
  for (std::size_t b = 0; b < out.size(); ++b) {
    const double* z = logits.data() + b * classes_;
    out[b] = static_cast<std::size_t>(std::max_element(z, z + classes_) - z);
  }
  return out;
}

std::vector<Parameter*> RcnnModel::parameters() {
  std::vector<Parameter*> out;
  for (auto& stage : stages_) {
    for (auto* p : stage.layer->parameters()) out.push_back(p);
  }
  return out;
}

void RcnnModel::zero_grad() {
  for (auto* p : parameters()) p->grad.fill(0.0);
}

std::vector<LayerSpec> RcnnModel::layer_specs() const {
  std::vector<LayerSpec> out;
  out.reserve(stages_.size());
  for (const auto& stage : stages_) out.push_back(stage.layer->spec());
  return out;
}

}  // namespace trgr::nn
