#pragma once

// Layers with hand-written backward passes. Every layer caches what it
// needs from the most recent forward call, so one instance serves one
// forward/backward pair at a time. Activations are batch-first (N x C x H x W,
// or N x F after Flatten).

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "trgr/nn/tensor.hpp"
#include "trgr/rng.hpp"

namespace trgr::nn {

enum class LayerKind : std::uint8_t {
  conv = 0,
  batchnorm = 1,
  relu = 2,
  maxpool = 3,
  residual = 4,
  flatten = 5,
  fc = 6,
  softmax = 7,
};

std::string to_string(LayerKind kind);

struct LayerSpec {
  LayerKind kind = LayerKind::relu;
  std::size_t kh = 0, kw = 0;
  std::size_t sh = 1, sw = 1;
  std::size_t ph = 0, pw = 0;
  std::size_t channels_out = 0;

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

LayerSpec conv_spec(std::size_t channels_out, std::size_t kernel, std::size_t stride, std::size_t padding);
LayerSpec batchnorm_spec(std::size_t channels);
LayerSpec relu_spec();
LayerSpec maxpool_spec(std::size_t kernel, std::size_t stride);
/// 3x3 main path with padding 1; `stride` applies to the first convolution.
LayerSpec residual_spec(std::size_t channels, std::size_t stride);
LayerSpec flatten_spec();
LayerSpec fc_spec(std::size_t outputs);

/// floor((in + 2p - k) / s) + 1; throws DimensionError when the padded
/// input is smaller than the kernel.
std::size_t conv_output_dim(std::size_t in, std::size_t kernel, std::size_t stride, std::size_t padding);

/// Output shape (without batch) for a per-sample input shape.
Shape output_shape(const LayerSpec& spec, const Shape& input);

enum class Mode { train, eval };

struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;
  /// Running statistics are stored but not optimized.
  bool trainable = true;
};

class Layer {
 public:
  virtual ~Layer() = default;
  virtual Tensor forward(const Tensor& input, Mode mode) = 0;
  /// Accumulates parameter gradients and returns dLoss/dInput.
  virtual Tensor backward(const Tensor& grad_output) = 0;
  virtual std::vector<Parameter*> parameters() { return {}; }
  virtual LayerSpec spec() const = 0;
};

class Conv2d final : public Layer {
 public:
  Conv2d(std::size_t in_channels, std::size_t out_channels, std::size_t kernel, std::size_t stride,
         std::size_t padding);

  /// Kaiming-uniform (fan-in, negative slope sqrt(5)) weights and bias.
  void initialize(Rng& rng);

  Tensor forward(const Tensor& input, Mode mode) override;
  Tensor backward(const Tensor& grad_output) override;
  std::vector<Parameter*> parameters() override { return {&weight_, &bias_}; }
  LayerSpec spec() const override;

  Parameter& weight() { return weight_; }
  Parameter& bias() { return bias_; }

 private:
  std::size_t in_ch_, out_ch_, kernel_, stride_, padding_;
  Parameter weight_;  // out x in x k x k
  Parameter bias_;    // out
  Tensor input_;
};

/// Per-channel batch normalization over (N, H, W). Training mode uses batch
/// statistics and updates running estimates with momentum 0.1 (unbiased
/// variance); eval mode uses the running estimates.
class BatchNorm2d final : public Layer {
 public:
  explicit BatchNorm2d(std::size_t channels, double momentum = 0.1, double eps = 1e-5);

  Tensor forward(const Tensor& input, Mode mode) override;
  Tensor backward(const Tensor& grad_output) override;
  std::vector<Parameter*> parameters() override {
    return {&gamma_, &beta_, &running_mean_, &running_var_};
  }
  LayerSpec spec() const override { return batchnorm_spec(channels_); }

  Parameter& gamma() { return gamma_; }
  Parameter& beta() { return beta_; }
  Parameter& running_mean() { return running_mean_; }
  Parameter& running_var() { return running_var_; }

 private:
  std::size_t channels_;
  double momentum_, eps_;
  Parameter gamma_, beta_, running_mean_, running_var_;
  Mode last_mode_ = Mode::train;
  Tensor xhat_;
  std::vector<double> inv_std_;
};

class ReLU final : public Layer {
 public:
  Tensor forward(const Tensor& input, Mode mode) override;
  Tensor backward(const Tensor& grad_output) override;
  LayerSpec spec() const override { return relu_spec(); }

 private:
  Tensor input_;
};

class MaxPool2d final : public Layer {
 public:
  MaxPool2d(std::size_t kernel, std::size_t stride);
  Tensor forward(const Tensor& input, Mode mode) override;
  Tensor backward(const Tensor& grad_output) override;
  LayerSpec spec() const override { return maxpool_spec(kernel_, stride_); }

 private:
  std::size_t kernel_, stride_;
  Shape input_shape_;
  std::vector<std::size_t> argmax_;
};

class Flatten final : public Layer {
 public:
  Tensor forward(const Tensor& input, Mode mode) override;
  Tensor backward(const Tensor& grad_output) override;
  LayerSpec spec() const override { return flatten_spec(); }

 private:
  Shape input_shape_;
};

class Linear final : public Layer {
 public:
  Linear(std::size_t inputs, std::size_t outputs);
  void initialize(Rng& rng);

  Tensor forward(const Tensor& input, Mode mode) override;
  Tensor backward(const Tensor& grad_output) override;
  std::vector<Parameter*> parameters() override { return {&weight_, &bias_}; }
  LayerSpec spec() const override { return fc_spec(outputs_); }

  Parameter& weight() { return weight_; }
  Parameter& bias() { return bias_; }

 private:
  std::size_t inputs_, outputs_;
  Parameter weight_;  // out x in
  Parameter bias_;
  Tensor input_;
};

/// relu(bn(conv(relu(bn(conv(x))))) + shortcut(x)). The shortcut is the
/// identity at stride 1 and a 1x1 strided convolution plus batchnorm
/// otherwise.
class ResidualBlock final : public Layer {
 public:
  ResidualBlock(std::size_t channels, std::size_t stride);
  void initialize(Rng& rng);

  Tensor forward(const Tensor& input, Mode mode) override;
  Tensor backward(const Tensor& grad_output) override;
  std::vector<Parameter*> parameters() override;
  LayerSpec spec() const override { return residual_spec(channels_, stride_); }

  Conv2d& conv_a() { return conv_a_; }
  Conv2d& conv_b() { return conv_b_; }

 private:
  std::size_t channels_, stride_;
  Conv2d conv_a_;
  BatchNorm2d bn_a_;
  ReLU relu_a_;
  Conv2d conv_b_;
  BatchNorm2d bn_b_;
  std::unique_ptr<Conv2d> short_conv_;
  std::unique_ptr<BatchNorm2d> short_bn_;
  ReLU relu_out_;
};

/// Builds an initialized layer for channels_in -> spec.
std::unique_ptr<Layer> make_layer(const LayerSpec& spec, const Shape& input, Rng& rng);

/// Row-wise softmax of an N x K tensor.
Tensor softmax(const Tensor& logits);

struct LossResult {
  double loss = 0.0;  // mean over the batch
  Tensor grad;        // dLoss/dLogits
};

LossResult softmax_cross_entropy(const Tensor& logits, const std::vector<std::size_t>& labels);

}  // namespace trgr::nn
