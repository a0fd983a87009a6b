#pragma once

// Residual CNN for 1 x T x S CSI magnitude inputs:
//   Conv 1 (3x3/2, 8) -> Res-block 1 (stride 2) -> Res-block 2 (stride 1)
//   -> pool -> Conv 2 (3x3/2, 16) -> pool -> Conv 3 (3x3/2 p1, 8) -> pool
//   -> Conv 4 (3x3/2 p1, 8) -> flatten -> FC(K).
// Every convolution block is conv -> batchnorm -> relu; pools are 2x2/2.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "trgr/nn/layers.hpp"
#include "trgr/nn/tensor.hpp"

namespace trgr::nn {

struct BlockSpec {
  std::string name;
  std::vector<LayerSpec> layers;
};

std::vector<BlockSpec> rcnn_blocks(std::size_t classes);

struct ShapeRow {
  std::string block;
  Shape shape;
};

/// Per-block output sizes for a 1 x height x width input, followed by the
/// "FC input" feature count and the K-dimensional "Output". Pure shape
/// arithmetic; throws DimensionError if any stage underflows.
std::vector<ShapeRow> rcnn_shape_chain(std::size_t height, std::size_t width, std::size_t classes);

class RcnnModel {
 public:
  /// Builds and initializes the stack; the shape chain is checked here.
  RcnnModel(std::size_t input_height, std::size_t input_width, std::size_t classes,
            std::uint64_t seed);

  std::size_t input_height() const { return height_; }
  std::size_t input_width() const { return width_; }
  std::size_t classes() const { return classes_; }

  /// batch: B x 1 x T x S. Returns B x K logits.
  Tensor forward(const Tensor& batch, Mode mode);
  Tensor backward(const Tensor& grad_logits);

  /// Argmax of the eval-mode posterior.
  std::vector<std::size_t> predict(const Tensor& batch);

  /// Parameters and running statistics in declaration order.
  std::vector<Parameter*> parameters();
  void zero_grad();

  /// Flattened top-level layer specs in execution order.
  std::vector<LayerSpec> layer_specs() const;

  /// Block name and output shape captured during the last forward pass.
  const std::vector<ShapeRow>& last_block_shapes() const { return last_shapes_; }

 private:
  struct Stage {
    std::unique_ptr<Layer> layer;
    std::string block_end;  // nonempty on the last layer of a block
  };

  std::size_t height_, width_, classes_;
  std::vector<Stage> stages_;
  std::vector<ShapeRow> last_shapes_;
};

}  // namespace trgr::nn
