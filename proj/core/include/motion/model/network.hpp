#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "motion/model/config.hpp"
#include "motion/numerics/checkpoint.hpp"
#include "motion/numerics/sgd.hpp"
#include "motion/numerics/tensor.hpp"

namespace motion::model {

/// Learned weights W shared by every segment, plus the classifier head.
template <typename T>
struct BasicModelParams {
  std::vector<nn::BasicParameter<T>> conv_weight;  // [C_out, C_in, k, k]
  std::vector<nn::BasicParameter<T>> conv_bias;    // [C_out]
  std::vector<nn::BasicParameter<T>> head_weight;  // [F_out, F_in]
  std::vector<nn::BasicParameter<T>> head_bias;    // [F_out]

  /// Stable parameter order: conv weight/bias per block, then head layers.
  std::vector<nn::BasicParameter<T>*> all();
  std::vector<std::string> names() const;
  void zero_grad();

  template <typename U>
  BasicModelParams<U> cast() const;
};

using ModelParams = BasicModelParams<float>;

/// He-uniform weights (bound sqrt(6 / fan_in)), zero biases.
ModelParams init_params(const ModelConfig& cfg, std::uint64_t seed);

/// Throws ShapeError unless every tensor matches `cfg`.
template <typename T>
void check_params(const BasicModelParams<T>& params, const ModelConfig& cfg);

std::vector<nn::NamedTensor> to_named_tensors(const ModelParams& params);
ModelParams from_named_tensors(const std::vector<nn::NamedTensor>& tensors, const ModelConfig& cfg);

/// Moves floor(frac*C) channels one segment forward in time and the next
/// floor(frac*C) one segment backward, zero-filling the boundary segments.
/// features: [T, C, H, W]. Identity when T == 1.
template <typename T>
nn::BasicTensor<T> temporal_shift(const nn::BasicTensor<T>& features, double frac);

/// Adjoint of temporal_shift.
template <typename T>
nn::BasicTensor<T> temporal_shift_backward(const nn::BasicTensor<T>& grad_output, double frac);

/// Activations kept for the backward pass.
template <typename T>
struct BackboneCache {
  std::vector<nn::BasicTensor<T>> block_inputs;   // conv inputs after shifting
  std::vector<nn::BasicTensor<T>> block_outputs;  // post-ReLU conv outputs
};

/// segments [T, C, S, S] -> per-segment features [T, F].
template <typename T>
nn::BasicTensor<T> backbone_forward(const nn::BasicTensor<T>& segments, const BasicModelParams<T>& params,
                                    const ModelConfig& cfg, BackboneCache<T>* cache = nullptr);

/// Accumulates parameter gradients; returns d loss / d segments when
/// `want_input_grad` is set (otherwise an empty tensor).
template <typename T>
nn::BasicTensor<T> backbone_backward(const nn::BasicTensor<T>& grad_features, const BackboneCache<T>& cache,
                                     BasicModelParams<T>& params, const ModelConfig& cfg,
                                     bool want_input_grad = false);

/// Mean over the segment axis: [T, F] -> [F].
template <typename T>
nn::BasicTensor<T> consensus(const nn::BasicTensor<T>& per_segment);

template <typename T>
nn::BasicTensor<T> consensus_backward(const nn::BasicTensor<T>& grad_output, std::size_t segments);

template <typename T>
struct HeadCache {
  std::vector<nn::BasicTensor<T>> inputs;  // input of each linear layer (post-ReLU)
};

/// feature [F] -> logits [num_classes]: linear/ReLU per hidden width, then a
/// final linear layer to the class logits.
template <typename T>
nn::BasicTensor<T> head_forward(const nn::BasicTensor<T>& feature, const BasicModelParams<T>& params,
                                HeadCache<T>* cache = nullptr);

/// Accumulates head gradients and returns d loss / d feature.
template <typename T>
nn::BasicTensor<T> head_backward(const nn::BasicTensor<T>& grad_logits, const HeadCache<T>& cache,
                                 BasicModelParams<T>& params);

/// Softmax class probabilities for one consensus feature.
template <typename T>
nn::BasicTensor<T> classify(const nn::BasicTensor<T>& feature, const BasicModelParams<T>& params);

}  // namespace motion::model
