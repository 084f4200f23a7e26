#pragma once

#include <span>

#include "motion/numerics/tensor.hpp"

namespace motion::nn {

/// A learnable tensor with its gradient accumulator and momentum buffer.
template <typename T>
struct BasicParameter {
  BasicTensor<T> value;
  BasicTensor<T> grad;
  BasicTensor<T> momentum_buffer;

  BasicParameter() = default;
  explicit BasicParameter(BasicTensor<T> v)
      : value(std::move(v)), grad(value.shape()), momentum_buffer(value.shape()) {}

  void zero_grad() { grad.fill(T{0}); }
};

using Parameter = BasicParameter<float>;

struct SgdConfig {
  double learning_rate = 0.001;
  double momentum = 0.9;
  double weight_decay = 5e-5;

  /// Throws ConfigError when a field is out of range.
  void validate() const;
};

/// Classic momentum SGD with L2 decay folded into the gradient:
///   g' = grad + wd * value;  buf = momentum * buf + g';  value -= lr * buf
template <typename T>
void sgd_step(std::span<BasicParameter<T>* const> params, const SgdConfig& cfg);

}  // namespace motion::nn
