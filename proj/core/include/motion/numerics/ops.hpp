#pragma once

#include <cstddef>
#include <span>

#include "motion/numerics/rng.hpp"
#include "motion/numerics/tensor.hpp"

namespace motion::nn {

/// Geometry of a square-kernel 2D cross-correlation with zero padding.
struct Conv2dGeometry {
  std::size_t in_channels = 1;
  std::size_t in_height = 1;
  std::size_t in_width = 1;
  std::size_t out_channels = 1;
  std::size_t kernel = 1;
  std::size_t stride = 1;
  std::size_t pad = 0;

  std::size_t out_height() const { return (in_height + 2 * pad - kernel) / stride + 1; }
  std::size_t out_width() const { return (in_width + 2 * pad - kernel) / stride + 1; }
  std::size_t input_size() const { return in_channels * in_height * in_width; }
  std::size_t output_size() const { return out_channels * out_height() * out_width(); }
  std::size_t weight_size() const { return out_channels * in_channels * kernel * kernel; }

  /// Throws ConfigError for stride 0 and ShapeError when the kernel does not fit.
  void validate() const;
};

namespace kernels {

// Raw-buffer kernels used by the backbone to run per segment without copies.
// Backward accumulates into grad_weight / grad_bias; grad_input is overwritten
// and may be empty when the input gradient is not needed.

template <typename T>
void conv2d_forward(const Conv2dGeometry& g, std::span<const T> input, std::span<const T> weight,
                    std::span<const T> bias, std::span<T> output);

template <typename T>
void conv2d_backward(const Conv2dGeometry& g, std::span<const T> input, std::span<const T> weight,
                     std::span<const T> grad_output, std::span<T> grad_input,
                     std::span<T> grad_weight, std::span<T> grad_bias);

}  // namespace kernels

template <typename T>
struct Conv2dGrads {
  BasicTensor<T> input;
  BasicTensor<T> weight;
  BasicTensor<T> bias;
};

/// input [C_in,H,W], weight [C_out,C_in,k,k], bias [C_out] -> [C_out,H',W'].
template <typename T>
BasicTensor<T> conv2d(const BasicTensor<T>& input, const BasicTensor<T>& weight,
                      const BasicTensor<T>& bias, std::size_t stride, std::size_t pad);

template <typename T>
Conv2dGrads<T> conv2d_backward(const BasicTensor<T>& input, const BasicTensor<T>& weight,
                               const BasicTensor<T>& grad_output, std::size_t stride,
                               std::size_t pad);

template <typename T>
BasicTensor<T> relu(const BasicTensor<T>& input);

/// Passes the gradient where input > 0; the subgradient at exactly 0 is 0.
template <typename T>
BasicTensor<T> relu_backward(const BasicTensor<T>& input, const BasicTensor<T>& grad_output);

template <typename T>
struct LinearGrads {
  BasicTensor<T> input;
  BasicTensor<T> weight;
  BasicTensor<T> bias;
};

/// input [F_in], weight [F_out,F_in], bias [F_out] -> [F_out].
template <typename T>
BasicTensor<T> linear(const BasicTensor<T>& input, const BasicTensor<T>& weight,
                      const BasicTensor<T>& bias);

template <typename T>
LinearGrads<T> linear_backward(const BasicTensor<T>& input, const BasicTensor<T>& weight,
                               const BasicTensor<T>& grad_output);

/// [C,H,W] -> [C], per-channel spatial mean.
template <typename T>
BasicTensor<T> global_avg_pool(const BasicTensor<T>& input);

template <typename T>
BasicTensor<T> global_avg_pool_backward(const Shape& input_shape, const BasicTensor<T>& grad_output);

template <typename T>
struct DropoutResult {
  BasicTensor<T> output;
  /// Per-element multiplier: 0 for dropped, 1/(1-p) for kept, 1 in eval mode.
  BasicTensor<T> mask;
};

/// Inverted dropout. Eval mode (training == false) is the identity.
template <typename T>
DropoutResult<T> dropout(const BasicTensor<T>& input, double p, Rng& rng, bool training);

template <typename T>
BasicTensor<T> dropout_backward(const BasicTensor<T>& mask, const BasicTensor<T>& grad_output);

template <typename T>
BasicTensor<T> softmax(const BasicTensor<T>& logits);

template <typename T>
struct CrossEntropy {
  T loss{};
  BasicTensor<T> probs;
};

template <typename T>
CrossEntropy<T> softmax_cross_entropy(const BasicTensor<T>& logits, std::size_t target_class);

/// Gradient of the loss w.r.t. the logits: probs - onehot(target).
template <typename T>
BasicTensor<T> softmax_cross_entropy_backward(const BasicTensor<T>& probs, std::size_t target_class);

/// Index of the largest element; ties resolve to the lowest index.
template <typename T>
std::size_t argmax(std::span<const T> values);

}  // namespace motion::nn
