#include "trgr/nn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "trgr/errors.hpp"

namespace trgr::nn {

namespace {

void require_rank(const Tensor& t, std::size_t rank, const char* who) {
  if (t.rank() != rank) {
    throw DimensionError(std::string(who) + ": expected rank " + std::to_string(rank) +
                         " input, got " + shape_string(t.shape()));
  }
}

void require_shape(const Tensor& t, const Shape& shape, const char* who) {
  if (t.shape() != shape) {
    throw DimensionError(std::string(who) + ": gradient shape " + shape_string(t.shape()) +
                         " does not match " + shape_string(shape));
  }
}

Parameter make_param(std::string name, Shape shape, bool trainable = true) {
  Parameter p;
  p.name = std::move(name);
  p.value = Tensor(shape);
  p.grad = Tensor(shape);
  p.trainable = trainable;
  return p;
}

// First and one-past-last output index whose input tap
// o*stride + k - pad lies in [0, in).
std::pair<std::size_t, std::size_t> valid_range(std::size_t in, std::size_t out, std::size_t k,
                                                std::size_t stride, std::size_t pad) {
  std::size_t lo = 0;
  if (k < pad) lo = (pad - k + stride - 1) / stride;
  // o*stride + k - pad <= in - 1  =>  o <= (in - 1 + pad - k) / stride
  if (in + pad < k + 1) return {0, 0};
  std::size_t hi = (in - 1 + pad - k) / stride + 1;
  hi = std::min(hi, out);
  if (lo > hi) lo = hi;
  return {lo, hi};
}

}  // namespace

std::string to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::conv: return "conv";
    case LayerKind::batchnorm: return "batchnorm";
    case LayerKind::relu: return "relu";
    case LayerKind::maxpool: return "maxpool";
    case LayerKind::residual: return "residual";
    case LayerKind::flatten: return "flatten";
    case LayerKind::fc: return "fc";
    case LayerKind::softmax: return "softmax";
  }
  return "unknown";
}

LayerSpec conv_spec(std::size_t channels_out, std::size_t kernel, std::size_t stride, std::size_t padding) {
  return {LayerKind::conv, kernel, kernel, stride, stride, padding, padding, channels_out};
}
LayerSpec batchnorm_spec(std::size_t channels) {
  return {LayerKind::batchnorm, 0, 0, 1, 1, 0, 0, channels};
}
LayerSpec relu_spec() { return {LayerKind::relu, 0, 0, 1, 1, 0, 0, 0}; }
LayerSpec maxpool_spec(std::size_t kernel, std::size_t stride) {
  return {LayerKind::maxpool, kernel, kernel, stride, stride, 0, 0, 0};
}
LayerSpec residual_spec(std::size_t channels, std::size_t stride) {
  return {LayerKind::residual, 3, 3, stride, stride, 1, 1, channels};
}
LayerSpec flatten_spec() { return {LayerKind::flatten, 0, 0, 1, 1, 0, 0, 0}; }
LayerSpec fc_spec(std::size_t outputs) { return {LayerKind::fc, 0, 0, 1, 1, 0, 0, outputs}; }

std::size_t conv_output_dim(std::size_t in, std::size_t kernel, std::size_t stride, std::size_t padding) {
  if (kernel == 0 || stride == 0) throw DimensionError("kernel and stride must be positive");
  if (in + 2 * padding < kernel) {
    throw DimensionError("spatial size " + std::to_string(in) + " (padding " +
                         std::to_string(padding) + ") is smaller than kernel " +
                         std::to_string(kernel));
  }
  return (in + 2 * padding - kernel) / stride + 1;
}

Shape output_shape(const LayerSpec& spec, const Shape& input) {
  auto chw = [&](const char* who) {
    if (input.size() != 3) {
      throw DimensionError(std::string(who) + " expects C x H x W, got " + shape_string(input));
    }
  };
  switch (spec.kind) {
    case LayerKind::conv:
    case LayerKind::residual:
      chw("conv");
      return {spec.channels_out, conv_output_dim(input[1], spec.kh, spec.sh, spec.ph),
              conv_output_dim(input[2], spec.kw, spec.sw, spec.pw)};
    case LayerKind::maxpool: {
      chw("maxpool");
      const std::size_t h = conv_output_dim(input[1], spec.kh, spec.sh, 0);
      const std::size_t w = conv_output_dim(input[2], spec.kw, spec.sw, 0);
      return {input[0], h, w};
    }
    case LayerKind::batchnorm:
    case LayerKind::relu:
    case LayerKind::softmax:
      return input;
    case LayerKind::flatten:
      return {shape_size(input)};
    case LayerKind::fc:
      if (input.size() != 1) throw DimensionError("fc expects a flat input, got " + shape_string(input));
      return {spec.channels_out};
  }
  throw DimensionError("unknown layer kind");
}

// ---------------------------------------------------------------- Conv2d

Conv2d::Conv2d(std::size_t in_channels, std::size_t out_channels, std::size_t kernel,
               std::size_t stride, std::size_t padding)
    : in_ch_(in_channels),
      out_ch_(out_channels),
      kernel_(kernel),
      stride_(stride),
      padding_(padding),
      weight_(make_param("weight", {out_channels, in_channels, kernel, kernel})),
      bias_(make_param("bias", {out_channels})) {
  if (kernel == 0 || stride == 0 || in_channels == 0 || out_channels == 0) {
    throw DimensionError("conv2d: kernel, stride and channel counts must be positive");
  }
}

void Conv2d::initialize(Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in_ch_ * kernel_ * kernel_));
  for (auto& w : weight_.value.values()) w = rng.uniform(-bound, bound);
  for (auto& b : bias_.value.values()) b = rng.uniform(-bound, bound);
}

LayerSpec Conv2d::spec() const { return conv_spec(out_ch_, kernel_, stride_, padding_); }

Tensor Conv2d::forward(const Tensor& input, Mode) {
  require_rank(input, 4, "conv2d");
  if (input.dim(1) != in_ch_) {
    throw DimensionError("conv2d: expected " + std::to_string(in_ch_) + " input channels, got " +
                         shape_string(input.shape()));
  }
  const std::size_t n = input.dim(0), h = input.dim(2), w = input.dim(3);
  const std::size_t oh = conv_output_dim(h, kernel_, stride_, padding_);
  const std::size_t ow = conv_output_dim(w, kernel_, stride_, padding_);
  input_ = input;
  Tensor out({n, out_ch_, oh, ow});

  const double* x = input.data();
  const double* wt = weight_.value.data();
  double* y = out.data();
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t oc = 0; oc < out_ch_; ++oc) {
      double* yp = y + ((b * out_ch_ + oc) * oh) * ow;
      std::fill(yp, yp + oh * ow, bias_.value[oc]);
      for (std::size_t ic = 0; ic < in_ch_; ++ic) {
        const double* xp = x + ((b * in_ch_ + ic) * h) * w;
        for (std::size_t ki = 0; ki < kernel_; ++ki) {
          const auto [r_lo, r_hi] = valid_range(h, oh, ki, stride_, padding_);
          for (std::size_t kj = 0; kj < kernel_; ++kj) {
            const double wv = wt[((oc * in_ch_ + ic) * kernel_ + ki) * kernel_ + kj];
            const auto [c_lo, c_hi] = valid_range(w, ow, kj, stride_, padding_);
            for (std::size_t r = r_lo; r < r_hi; ++r) {
              const double* xrow = xp + (r * stride_ + ki - padding_) * w;
              double* yrow = yp + r * ow;
              for (std::size_t c = c_lo; c < c_hi; ++c) yrow[c] += wv * xrow[c * stride_ + kj - padding_];
            }
          }
        }
      }
    }
  }
  return out;
}

Tensor Conv2d::backward(const Tensor& grad_output) {
  const std::size_t n = input_.dim(0), h = input_.dim(2), w = input_.dim(3);
  const std::size_t oh = conv_output_dim(h, kernel_, stride_, padding_);
  const std::size_t ow = conv_output_dim(w, kernel_, stride_, padding_);
  require_shape(grad_output, {n, out_ch_, oh, ow}, "conv2d");

  Tensor grad_in(input_.shape());
  const double* x = input_.data();
  const double* gy = grad_output.data();
  const double* wt = weight_.value.data();
  double* gw = weight_.grad.data();
  double* gx = grad_in.data();
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t oc = 0; oc < out_ch_; ++oc) {
      const double* gyp = gy + ((b * out_ch_ + oc) * oh) * ow;
      double gb = 0.0;
      for (std::size_t i = 0; i < oh * ow; ++i) gb += gyp[i];
      bias_.grad[oc] += gb;
      for (std::size_t ic = 0; ic < in_ch_; ++ic) {
        const double* xp = x + ((b * in_ch_ + ic) * h) * w;
        double* gxp = gx + ((b * in_ch_ + ic) * h) * w;
        for (std::size_t ki = 0; ki < kernel_; ++ki) {
          const auto [r_lo, r_hi] = valid_range(h, oh, ki, stride_, padding_);
          for (std::size_t kj = 0; kj < kernel_; ++kj) {
            const std::size_t widx = ((oc * in_ch_ + ic) * kernel_ + ki) * kernel_ + kj;
            const double wv = wt[widx];
            const auto [c_lo, c_hi] = valid_range(w, ow, kj, stride_, padding_);
            double acc = 0.0;
            for (std::size_t r = r_lo; r < r_hi; ++r) {
              const std::size_t offset = (r * stride_ + ki - padding_) * w;
              const double* xrow = xp + offset;
              double* gxrow = gxp + offset;
              const double* gyrow = gyp + r * ow;
              for (std::size_t c = c_lo; c < c_hi; ++c) {
                const std::size_t col = c * stride_ + kj - padding_;
                acc += gyrow[c] * xrow[col];
                gxrow[col] += wv * gyrow[c];
              }
            }
            gw[widx] += acc;
          }
        }
      }
    }
  }
  return grad_in;
}

// ----------------------------------------------------------- BatchNorm2d

BatchNorm2d::BatchNorm2d(std::size_t channels, double momentum, double eps)
    : channels_(channels),
      momentum_(momentum),
      eps_(eps),
      gamma_(make_param("gamma", {channels})),
      beta_(make_param("beta", {channels})),
      running_mean_(make_param("running_mean", {channels}, false)),
      running_var_(make_param("running_var", {channels}, false)) {
  gamma_.value.fill(1.0);
  running_var_.value.fill(1.0);
}

Tensor BatchNorm2d::forward(const Tensor& input, Mode mode) {
  require_rank(input, 4, "batchnorm");
  if (input.dim(1) != channels_) {
    throw DimensionError("batchnorm: expected " + std::to_string(channels_) + " channels, got " +
                         shape_string(input.shape()));
  }
  const std::size_t n = input.dim(0), plane = input.dim(2) * input.dim(3);
  const std::size_t count = n * plane;
  last_mode_ = mode;
  xhat_ = Tensor(input.shape());
  inv_std_.assign(channels_, 0.0);
  Tensor out(input.shape());
  for (std::size_t c = 0; c < channels_; ++c) {
    double mean = 0.0, var = 0.0;
    if (mode == Mode::train) {
      for (std::size_t b = 0; b < n; ++b) {
        const double* xp = input.data() + (b * channels_ + c) * plane;
        for (std::size_t i = 0; i < plane; ++i) mean += xp[i];
      }
      mean /= static_cast<double>(count);
      for (std::size_t b = 0; b < n; ++b) {
        const double* xp = input.data() + (b * channels_ + c) * plane;
        for (std::size_t i = 0; i < plane; ++i) var += (xp[i] - mean) * (xp[i] - mean);
      }
      var /= static_cast<double>(count);
      const double unbiased = count > 1 ? var * static_cast<double>(count) / static_cast<double>(count - 1) : var;
      running_mean_.value[c] = (1.0 - momentum_) * running_mean_.value[c] + momentum_ * mean;
      running_var_.value[c] = (1.0 - momentum_) * running_var_.value[c] + momentum_ * unbiased;
    } else {
      mean = running_mean_.value[c];
      var = running_var_.value[c];
    }
    const double inv_std = 1.0 / std::sqrt(var + eps_);
    inv_std_[c] = inv_std;
    const double g = gamma_.value[c], bt = beta_.value[c];
    for (std::size_t b = 0; b < n; ++b) {
      const std::size_t base = (b * channels_ + c) * plane;
      for (std::size_t i = 0; i < plane; ++i) {
        const double xh = (input[base + i] - mean) * inv_std;
        xhat_[base + i] = xh;
        out[base + i] = g * xh + bt;
      }
    }
  }
  return out;
}

Tensor BatchNorm2d::backward(const Tensor& grad_output) {
  require_shape(grad_output, xhat_.shape(), "batchnorm");
  const std::size_t n = xhat_.dim(0), plane = xhat_.dim(2) * xhat_.dim(3);
  const double count = static_cast<double>(n * plane);
  Tensor grad_in(xhat_.shape());
  for (std::size_t c = 0; c < channels_; ++c) {
    double sum_dy = 0.0, sum_dy_xhat = 0.0;
    for (std::size_t b = 0; b < n; ++b) {
      const std::size_t base = (b * channels_ + c) * plane;
      for (std::size_t i = 0; i < plane; ++i) {
        sum_dy += grad_output[base + i];
        sum_dy_xhat += grad_output[base + i] * xhat_[base + i];
      }
    }
    gamma_.grad[c] += sum_dy_xhat;
    beta_.grad[c] += sum_dy;
    const double g = gamma_.value[c];
    const double inv_std = inv_std_[c];
    for (std::size_t b = 0; b < n; ++b) {
      const std::size_t base = (b * channels_ + c) * plane;
      for (std::size_t i = 0; i < plane; ++i) {
        if (last_mode_ == Mode::train) {
          grad_in[base + i] = g * inv_std *
                              (grad_output[base + i] - sum_dy / count - xhat_[base + i] * sum_dy_xhat / count);
        } else {
          grad_in[base + i] = g * inv_std * grad_output[base + i];
        }
      }
    }
  }
  return grad_in;
}

// ------------------------------------------------------------------ ReLU

Tensor ReLU::forward(const Tensor& input, Mode) {
  input_ = input;
  Tensor out = input;
  for (auto& v : out.values()) v = v > 0.0 ? v : 0.0;
  return out;
}

Tensor ReLU::backward(const Tensor& grad_output) {
  require_shape(grad_output, input_.shape(), "relu");
  Tensor grad_in = grad_output;
  for (std::size_t i = 0; i < grad_in.size(); ++i) {
    if (!(input_[i] > 0.0)) grad_in[i] = 0.0;
  }
  return grad_in;
}

// ------------------------------------------------------------- MaxPool2d

MaxPool2d::MaxPool2d(std::size_t kernel, std::size_t stride) : kernel_(kernel), stride_(stride) {
  if (kernel == 0 || stride == 0) throw DimensionError("maxpool: kernel and stride must be positive");
}

Tensor MaxPool2d::forward(const Tensor& input, Mode) {
  require_rank(input, 4, "maxpool");
  const std::size_t n = input.dim(0), ch = input.dim(1), h = input.dim(2), w = input.dim(3);
  const std::size_t oh = conv_output_dim(h, kernel_, stride_, 0);
  const std::size_t ow = conv_output_dim(w, kernel_, stride_, 0);
  input_shape_ = input.shape();
  Tensor out({n, ch, oh, ow});
  argmax_.assign(out.size(), 0);
  for (std::size_t p = 0; p < n * ch; ++p) {
    const std::size_t in_base = p * h * w;
    const std::size_t out_base = p * oh * ow;
    for (std::size_t r = 0; r < oh; ++r) {
      for (std::size_t c = 0; c < ow; ++c) {
        double best = -std::numeric_limits<double>::infinity();
        std::size_t best_idx = in_base + (r * stride_) * w + c * stride_;
        for (std::size_t ki = 0; ki < kernel_; ++ki) {
          for (std::size_t kj = 0; kj < kernel_; ++kj) {
            const std::size_t idx = in_base + (r * stride_ + ki) * w + c * stride_ + kj;
            if (input[idx] > best) {
              best = input[idx];
              best_idx = idx;
            }
          }
        }
        out[out_base + r * ow + c] = best;
        argmax_[out_base + r * ow + c] = best_idx;
      }
    }
  }
  return out;
}

Tensor MaxPool2d::backward(const Tensor& grad_output) {
  if (grad_output.size() != argmax_.size()) throw DimensionError("maxpool: gradient shape mismatch");
  Tensor grad_in(input_shape_);
  for (std::size_t i = 0; i < argmax_.size(); ++i) grad_in[argmax_[i]] += grad_output[i];
  return grad_in;
}

// --------------------------------------------------------------- Flatten

Tensor Flatten::forward(const Tensor& input, Mode) {
  if (input.rank() < 2) throw DimensionError("flatten: expected a batched input");
  input_shape_ = input.shape();
  return input.reshaped({input.dim(0), input.size() / input.dim(0)});
}

Tensor Flatten::backward(const Tensor& grad_output) { return grad_output.reshaped(input_shape_); }

// ---------------------------------------------------------------- Linear

Linear::Linear(std::size_t inputs, std::size_t outputs)
    : inputs_(inputs),
      outputs_(outputs),
      weight_(make_param("weight", {outputs, inputs})),
      bias_(make_param("bias", {outputs})) {
  if (inputs == 0 || outputs == 0) throw DimensionError("linear: sizes must be positive");
}

void Linear::initialize(Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(inputs_));
  for (auto& w : weight_.value.values()) w = rng.uniform(-bound, bound);
  for (auto& b : bias_.value.values()) b = rng.uniform(-bound, bound);
}

Tensor Linear::forward(const Tensor& input, Mode) {
  require_rank(input, 2, "linear");
  if (input.dim(1) != inputs_) {
    throw DimensionError("linear: expected " + std::to_string(inputs_) + " features, got " +
                         shape_string(input.shape()));
  }
  input_ = input;
  const std::size_t n = input.dim(0);
  Tensor out({n, outputs_});
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t o = 0; o < outputs_; ++o) {
      double acc = bias_.value[o];
      const double* wrow = weight_.value.data() + o * inputs_;
      const double* x = input.data() + b * inputs_;
      for (std::size_t i = 0; i < inputs_; ++i) acc += wrow[i] * x[i];
      out[b * outputs_ + o] = acc;
    }
  }
  return out;
}

Tensor Linear::backward(const Tensor& grad_output) {
  const std::size_t n = input_.dim(0);
  require_shape(grad_output, {n, outputs_}, "linear");
  Tensor grad_in(input_.shape());
  for (std::size_t b = 0; b < n; ++b) {
    const double* x = input_.data() + b * inputs_;
    double* gx = grad_in.data() + b * inputs_;
    for (std::size_t o = 0; o < outputs_; ++o) {
      const double g = grad_output[b * outputs_ + o];
      bias_.grad[o] += g;
      double* gw = weight_.grad.data() + o * inputs_;
      const double* wrow = weight_.value.data() + o * inputs_;
      for (std::size_t i = 0; i < inputs_; ++i) {
        gw[i] += g * x[i];
        gx[i] += g * wrow[i];
      }
    }
  }
  return grad_in;
}

// --------------------------------------------------------- ResidualBlock

ResidualBlock::ResidualBlock(std::size_t channels, std::size_t stride)
    : channels_(channels),
      stride_(stride),
      conv_a_(channels, channels, 3, stride, 1),
      bn_a_(channels),
      conv_b_(channels, channels, 3, 1, 1),
      bn_b_(channels) {
  if (stride != 1) {
    short_conv_ = std::make_unique<Conv2d>(channels, channels, 1, stride, 0);
    short_bn_ = std::make_unique<BatchNorm2d>(channels);
  }
}

void ResidualBlock::initialize(Rng& rng) {
  conv_a_.initialize(rng);
  conv_b_.initialize(rng);
  if (short_conv_) short_conv_->initialize(rng);
}

std::vector<Parameter*> ResidualBlock::parameters() {
  std::vector<Parameter*> out;
  auto append = [&](Layer& layer) {
    for (auto* p : layer.parameters()) out.push_back(p);
  };
  append(conv_a_);
  append(bn_a_);
  append(conv_b_);
  append(bn_b_);
  if (short_conv_) {
    append(*short_conv_);
    append(*short_bn_);
  }
  return out;
}

Tensor ResidualBlock::forward(const Tensor& input, Mode mode) {
  Tensor main = conv_a_.forward(input, mode);
  main = bn_a_.forward(main, mode);
  main = relu_a_.forward(main, mode);
  main = conv_b_.forward(main, mode);
  main = bn_b_.forward(main, mode);
  Tensor shortcut = input;
  if (short_conv_) {
    shortcut = short_conv_->forward(input, mode);
    shortcut = short_bn_->forward(shortcut, mode);
  }
  if (shortcut.shape() != main.shape()) {
    throw DimensionError("residual block: shortcut " + shape_string(shortcut.shape()) +
                         " vs main path " + shape_string(main.shape()));
  }
  for (std::size_t i = 0; i < main.size(); ++i) main[i] += shortcut[i];
  return relu_out_.forward(main, mode);
}

Tensor ResidualBlock::backward(const Tensor& grad_output) {
  const Tensor grad_sum = relu_out_.backward(grad_output);
  Tensor g = bn_b_.backward(grad_sum);
  g = conv_b_.backward(g);
  g = relu_a_.backward(g);
  g = bn_a_.backward(g);
  Tensor grad_in = conv_a_.backward(g);
  if (short_conv_) {
    Tensor gs = short_bn_->backward(grad_sum);
    gs = short_conv_->backward(gs);
    for (std::size_t i = 0; i < grad_in.size(); ++i) grad_in[i] += gs[i];
  } else {
    for (std::size_t i = 0; i < grad_in.size(); ++i) grad_in[i] += grad_sum[i];
  }
  return grad_in;
}

// --------------------------------------------------------------- factory

std::unique_ptr<Layer> make_layer(const LayerSpec& spec, const Shape& input, Rng& rng) {
  switch (spec.kind) {
    case LayerKind::conv: {
      if (input.size() != 3 || spec.kh != spec.kw || spec.sh != spec.sw || spec.ph != spec.pw) {
        throw DimensionError("make_layer: conv supports square kernels on C x H x W inputs");
      }
      auto layer = std::make_unique<Conv2d>(input[0], spec.channels_out, spec.kh, spec.sh, spec.ph);
      layer->initialize(rng);
      return layer;
    }
    case LayerKind::batchnorm:
      return std::make_unique<BatchNorm2d>(input.at(0));
    case LayerKind::relu:
      return std::make_unique<ReLU>();
    case LayerKind::maxpool:
      return std::make_unique<MaxPool2d>(spec.kh, spec.sh);
    case LayerKind::residual: {
      if (input.size() != 3 || input[0] != spec.channels_out) {
        throw DimensionError("make_layer: residual block needs matching channel count, got " +
                             shape_string(input));
      }
      auto layer = std::make_unique<ResidualBlock>(spec.channels_out, spec.sh);
      layer->initialize(rng);
      return layer;
    }
    case LayerKind::flatten:
      return std::make_unique<Flatten>();
    case LayerKind::fc: {
      auto layer = std::make_unique<Linear>(shape_size(input), spec.channels_out);
      layer->initialize(rng);
      return layer;
    }
    case LayerKind::softmax:
      break;
  }
  throw std::invalid_argument("make_layer: softmax is applied by the loss, not as a layer");
}

// --------------------------------------------------------------- softmax

Tensor softmax(const Tensor& logits) {
  require_rank(logits, 2, "softmax");
  const std::size_t n = logits.dim(0), k = logits.dim(1);
  Tensor out(logits.shape());
  for (std::size_t b = 0; b < n; ++b) {
    const double* z = logits.data() + b * k;
    const double zmax = *std::max_element(z, z + k);
    double total = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      out[b * k + j] = std::exp(z[j] - zmax);
      total += out[b * k + j];
    }
    for (std::size_t j = 0; j < k; ++j) out[b * k + j] /= total;
  }
  return out;
}

LossResult softmax_cross_entropy(const Tensor& logits, const std::vector<std::size_t>& labels) {
  require_rank(logits, 2, "cross_entropy");
  const std::size_t n = logits.dim(0), k = logits.dim(1);
  if (labels.size() != n) throw DimensionError("cross_entropy: label count does not match batch");
  LossResult result;
  result.grad = softmax(logits);
  double total = 0.0;
  for (std::size_t b = 0; b < n; ++b) {
    if (labels[b] >= k) {
      throw std::invalid_argument("cross_entropy: label " + std::to_string(labels[b]) +
                                  " out of range for " + std::to_string(k) + " classes");
    }
    // log-sum-exp form keeps the loss finite for confident wrong logits.
    const double* z = logits.data() + b * k;
    const double zmax = *std::max_element(z, z + k);
    double sum = 0.0;
    for (std::size_t j = 0; j < k; ++j) sum += std::exp(z[j] - zmax);
    total += zmax + std::log(sum) - z[labels[b]];
    result.grad[b * k + labels[b]] -= 1.0;
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (auto& g : result.grad.values()) g *= inv_n;
  result.loss = total * inv_n;
  return result;
}

}  // namespace trgr::nn
