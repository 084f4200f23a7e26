#include "motion/model/network.hpp"

#include <algorithm>
#include <cmath>

#include "motion/numerics/ops.hpp"
#include "motion/numerics/rng.hpp"

namespace motion::model {

using nn::BasicTensor;
using nn::Shape;

template <typename T>
std::vector<nn::BasicParameter<T>*> BasicModelParams<T>::all() {
  std::vector<nn::BasicParameter<T>*> out;
  for (std::size_t i = 0; i < conv_weight.size(); ++i) {
    out.push_back(&conv_weight[i]);
    out.push_back(&conv_bias[i]);
  }
  for (std::size_t i = 0; i < head_weight.size(); ++i) {
    out.push_back(&head_weight[i]);
    out.push_back(&head_bias[i]);
  }
  return out;
}

template <typename T>
std::vector<std::string> BasicModelParams<T>::names() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < conv_weight.size(); ++i) {
    out.push_back("backbone.conv" + std::to_string(i) + ".weight");
    out.push_back("backbone.conv" + std::to_string(i) + ".bias");
  }
  for (std::size_t i = 0; i < head_weight.size(); ++i) {
    out.push_back("head.fc" + std::to_string(i) + ".weight");
    out.push_back("head.fc" + std::to_string(i) + ".bias");
  }
  return out;
}

template <typename T>
void BasicModelParams<T>::zero_grad() {
  for (auto* p : all()) p->zero_grad();
}

template <typename T>
template <typename U>
BasicModelParams<U> BasicModelParams<T>::cast() const {
  auto conv = [](const std::vector<nn::BasicParameter<T>>& src) {
    std::vector<nn::BasicParameter<U>> dst;
    for (const auto& p : src) dst.emplace_back(p.value.template cast<U>());
    return dst;
  };
  return {conv(conv_weight), conv(conv_bias), conv(head_weight), conv(head_bias)};
}

template struct BasicModelParams<float>;
template struct BasicModelParams<double>;
template BasicModelParams<double> BasicModelParams<float>::cast<double>() const;
template BasicModelParams<float> BasicModelParams<double>::cast<float>() const;

namespace {

nn::Tensor he_uniform(Shape shape, std::size_t fan_in, Rng& rng) {
  nn::Tensor t(std::move(shape));
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
  for (float& v : t.data()) v = static_cast<float>(rng.uniform(-bound, bound));
  return t;
}

std::vector<std::size_t> head_dims(const ModelConfig& cfg) {
  std::vector<std::size_t> dims = {cfg.feature_dim};
  dims.insert(dims.end(), cfg.head_widths.begin(), cfg.head_widths.end());
  dims.push_back(cfg.num_classes);
  return dims;
}

}  // namespace

ModelParams init_params(const ModelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  ModelParams p;
  for (std::size_t b = 0; b < cfg.num_blocks(); ++b) {
    const std::size_t cin = cfg.block_in_channels(b), cout = cfg.block_widths[b];
    p.conv_weight.emplace_back(he_uniform({cout, cin, cfg.kernel, cfg.kernel}, cin * cfg.kernel * cfg.kernel, rng));
    p.conv_bias.emplace_back(nn::Tensor({cout}));
  }
  const auto dims = head_dims(cfg);
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    p.head_weight.emplace_back(he_uniform({dims[i + 1], dims[i]}, dims[i], rng));
    p.head_bias.emplace_back(nn::Tensor({dims[i + 1]}));
  }
  return p;
}

template <typename T>
void check_params(const BasicModelParams<T>& p, const ModelConfig& cfg) {
  cfg.validate();
  if (p.conv_weight.size() != cfg.num_blocks() || p.conv_bias.size() != cfg.num_blocks()) {
    throw ShapeError("model params: expected " + std::to_string(cfg.num_blocks()) + " conv blocks");
  }
  for (std::size_t b = 0; b < cfg.num_blocks(); ++b) {
    const std::size_t cin = cfg.block_in_channels(b), cout = cfg.block_widths[b];
    nn::expect_shape(p.conv_weight[b].value, {cout, cin, cfg.kernel, cfg.kernel}, "conv weight");
    nn::expect_shape(p.conv_bias[b].value, {cout}, "conv bias");
  }
  const auto dims = head_dims(cfg);
  if (p.head_weight.size() != dims.size() - 1 || p.head_bias.size() != dims.size() - 1) {
    throw ShapeError("model params: head layer count does not match config");
  }
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    nn::expect_shape(p.head_weight[i].value, {dims[i + 1], dims[i]}, "head weight");
    nn::expect_shape(p.head_bias[i].value, {dims[i + 1]}, "head bias");
  }
}

template void check_params(const BasicModelParams<float>&, const ModelConfig&);
template void check_params(const BasicModelParams<double>&, const ModelConfig&);

std::vector<nn::NamedTensor> to_named_tensors(const ModelParams& params) {
  auto& mut = const_cast<ModelParams&>(params);
  const auto names = params.names();
  const auto ptrs = mut.all();
  std::vector<nn::NamedTensor> out;
  for (std::size_t i = 0; i < ptrs.size(); ++i) out.push_back({names[i], ptrs[i]->value});
  return out;
}

ModelParams from_named_tensors(const std::vector<nn::NamedTensor>& tensors, const ModelConfig& cfg) {
  ModelParams p = init_params(cfg, 0);
  const auto names = p.names();
  const auto ptrs = p.all();
  if (tensors.size() != ptrs.size()) {
    throw FormatError("checkpoint holds " + std::to_string(tensors.size()) + " tensors, model needs " +
                      std::to_string(ptrs.size()));
  }
  for (std::size_t i = 0; i < ptrs.size(); ++i) {
    if (tensors[i].name != names[i]) {
      throw FormatError("checkpoint tensor " + std::to_string(i) + " is '" + tensors[i].name + "', expected '" +
                        names[i] + "'");
    }
    if (tensors[i].tensor.shape() != ptrs[i]->value.shape()) {
      throw ShapeError("checkpoint tensor '" + names[i] + "' has shape " + nn::shape_string(tensors[i].tensor.shape()));
    }
    *ptrs[i] = nn::Parameter(tensors[i].tensor);
  }
  return p;
}

// --- temporal shift -------------------------------------------------------------

namespace {

std::size_t shift_count(std::size_t channels, double frac) {
  const auto n = static_cast<std::size_t>(std::floor(frac * static_cast<double>(channels)));
  if (frac < 0.0 || 2 * n > channels) {
    throw ConfigError("temporal_shift: 2*floor(frac*C) exceeds C=" + std::to_string(channels));
  }
  return n;
}

// direction = +1: forward op (out[t] pulls channel block A from t-1, block B from t+1)
// direction = -1: adjoint (out[t] pulls block A from t+1, block B from t-1)
template <typename T>
BasicTensor<T> shift_impl(const BasicTensor<T>& x, double frac, int direction) {
  if (x.rank() != 4) throw ShapeError("temporal_shift: expected [T,C,H,W], got " + nn::shape_string(x.shape()));
  const std::size_t segs = x.dim(0), c = x.dim(1), hw = x.dim(2) * x.dim(3);
  const std::size_t n = shift_count(c, frac);
  if (segs == 1 || n == 0) return x;
  BasicTensor<T> out(x.shape());
  const T* src = x.data().data();
  T* dst = out.data().data();
  const std::size_t seg_size = c * hw;
  for (std::size_t t = 0; t < segs; ++t) {
    T* o = dst + t * seg_size;
    const bool has_prev = t > 0, has_next = t + 1 < segs;
    const T* prev = has_prev ? src + (t - 1) * seg_size : nullptr;
    const T* next = has_next ? src + (t + 1) * seg_size : nullptr;
    const T* from_a = direction > 0 ? prev : next;
    const T* from_b = direction > 0 ? next : prev;
    if (from_a) std::copy(from_a, from_a + n * hw, o);
    if (from_b) std::copy(from_b + n * hw, from_b + 2 * n * hw, o + n * hw);
    const T* self = src + t * seg_size;
    std::copy(self + 2 * n * hw, self + seg_size, o + 2 * n * hw);
  }
  return out;
}

}  // namespace

template <typename T>
BasicTensor<T> temporal_shift(const BasicTensor<T>& features, double frac) {
  return shift_impl(features, frac, +1);
}

template <typename T>
BasicTensor<T> temporal_shift_backward(const BasicTensor<T>& grad_output, double frac) {
  return shift_impl(grad_output, frac, -1);
}

// --- backbone -------------------------------------------------------------------

namespace {

nn::Conv2dGeometry block_geometry(const ModelConfig& cfg, std::size_t b) {
  nn::Conv2dGeometry g;
  g.in_channels = cfg.block_in_channels(b);
  g.in_height = g.in_width = cfg.spatial_size(b);
  g.out_channels = cfg.block_widths[b];
  g.kernel = cfg.kernel;
  g.stride = cfg.stride;
  g.pad = cfg.pad;
  return g;
}

}  // namespace

template <typename T>
BasicTensor<T> backbone_forward(const BasicTensor<T>& segments, const BasicModelParams<T>& params,
                                const ModelConfig& cfg, BackboneCache<T>* cache) {
  const std::size_t segs = cfg.segments;
  nn::expect_shape(segments, {segs, cfg.input_channels, cfg.input_size, cfg.input_size}, "backbone input");
  if (cache) {
    cache->block_inputs.clear();
    cache->block_outputs.clear();
  }
  BasicTensor<T> x = segments;
  for (std::size_t b = 0; b < cfg.num_blocks(); ++b) {
    if (b > 0) x = temporal_shift(x, cfg.shift_fraction);
    const nn::Conv2dGeometry g = block_geometry(cfg, b);
    BasicTensor<T> y({segs, g.out_channels, g.out_height(), g.out_width()});
    for (std::size_t t = 0; t < segs; ++t) {
      nn::kernels::conv2d_forward<T>(g, std::span<const T>(x.data()).subspan(t * g.input_size(), g.input_size()),
                                     params.conv_weight[b].value.data(), params.conv_bias[b].value.data(),
                                     y.data().subspan(t * g.output_size(), g.output_size()));
    }
    for (T& v : y.data()) v = v > T{0} ? v : T{0};
    if (cache) {
      cache->block_inputs.push_back(std::move(x));
      cache->block_outputs.push_back(y);
    }
    x = std::move(y);
  }
  // Global average pool per segment: [T, F, h, w] -> [T, F].
  const std::size_t f = cfg.feature_dim, hw = x.dim(2) * x.dim(3);
  BasicTensor<T> features({segs, f});
  for (std::size_t t = 0; t < segs; ++t) {
    for (std::size_t ch = 0; ch < f; ++ch) {
      const T* p = x.data().data() + (t * f + ch) * hw;
      T acc{0};
      for (std::size_t i = 0; i < hw; ++i) acc += p[i];
      features[t * f + ch] = acc / static_cast<T>(hw);
    }
  }
  return features;
}

template <typename T>
BasicTensor<T> backbone_backward(const BasicTensor<T>& grad_features, const BackboneCache<T>& cache,
                                 BasicModelParams<T>& params, const ModelConfig& cfg, bool want_input_grad) {
  const std::size_t segs = cfg.segments;
  nn::expect_shape(grad_features, {segs, cfg.feature_dim}, "backbone grad");
  if (cache.block_outputs.size() != cfg.num_blocks()) throw ShapeError("backbone_backward: cache is incomplete");

  // Pool backward.
  const BasicTensor<T>& last = cache.block_outputs.back();
  const std::size_t f = cfg.feature_dim, hw = last.dim(2) * last.dim(3);
  BasicTensor<T> grad(last.shape());
  for (std::size_t t = 0; t < segs; ++t) {
    for (std::size_t ch = 0; ch < f; ++ch) {
      const T v = grad_features[t * f + ch] / static_cast<T>(hw);
      std::fill_n(grad.data().begin() + static_cast<std::ptrdiff_t>((t * f + ch) * hw), hw, v);
    }
  }

  for (std::size_t b = cfg.num_blocks(); b-- > 0;) {
    const BasicTensor<T>& out = cache.block_outputs[b];
    for (std::size_t i = 0; i < grad.size(); ++i) {
      if (!(out[i] > T{0})) grad[i] = T{0};
    }
    const nn::Conv2dGeometry g = block_geometry(cfg, b);
    const bool need_input = b > 0 || want_input_grad;
    const BasicTensor<T>& in = cache.block_inputs[b];
    BasicTensor<T> grad_in = need_input ? BasicTensor<T>(in.shape()) : BasicTensor<T>();
    for (std::size_t t = 0; t < segs; ++t) {
      std::span<T> gi = need_input ? grad_in.data().subspan(t * g.input_size(), g.input_size()) : std::span<T>();
      nn::kernels::conv2d_backward<T>(g, std::span<const T>(in.data()).subspan(t * g.input_size(), g.input_size()),
                                      params.conv_weight[b].value.data(),
                                      std::span<const T>(grad.data()).subspan(t * g.output_size(), g.output_size()),
                                      gi, params.conv_weight[b].grad.data(), params.conv_bias[b].grad.data());
    }
    if (!need_input) return {};
    grad = b > 0 ? temporal_shift_backward(grad_in, cfg.shift_fraction) : std::move(grad_in);
  }
  return grad;
}

template <typename T>
BasicTensor<T> consensus(const BasicTensor<T>& per_segment) {
  if (per_segment.rank() != 2 || per_segment.dim(0) == 0) {
    throw ShapeError("consensus: expected [T,F] with T >= 1, got " + nn::shape_string(per_segment.shape()));
  }
  const std::size_t segs = per_segment.dim(0), f = per_segment.dim(1);
  BasicTensor<T> out({f});
  for (std::size_t t = 0; t < segs; ++t) {
    for (std::size_t i = 0; i < f; ++i) out[i] += per_segment[t * f + i];
  }
  for (T& v : out.data()) v /= static_cast<T>(segs);
  return out;
}

template <typename T>
BasicTensor<T> consensus_backward(const BasicTensor<T>& grad_output, std::size_t segments) {
  const std::size_t f = grad_output.size();
  BasicTensor<T> out({segments, f});
  for (std::size_t t = 0; t < segments; ++t) {
    for (std::size_t i = 0; i < f; ++i) out[t * f + i] = grad_output[i] / static_cast<T>(segments);
  }
  return out;
}

// --- head -----------------------------------------------------------------------

template <typename T>
BasicTensor<T> head_forward(const BasicTensor<T>& feature, const BasicModelParams<T>& params, HeadCache<T>* cache) {
  if (cache) cache->inputs.clear();
  BasicTensor<T> x = feature;
  const std::size_t layers = params.head_weight.size();
  for (std::size_t i = 0; i < layers; ++i) {
    if (cache) cache->inputs.push_back(x);
    x = nn::linear(x, params.head_weight[i].value, params.head_bias[i].value);
    if (i + 1 < layers) x = nn::relu(x);
  }
  return x;
}

template <typename T>
BasicTensor<T> head_backward(const BasicTensor<T>& grad_logits, const HeadCache<T>& cache, BasicModelParams<T>& params) {
  BasicTensor<T> grad = grad_logits;
  for (std::size_t i = params.head_weight.size(); i-- > 0;) {
    const auto g = nn::linear_backward(cache.inputs[i], params.head_weight[i].value, grad);
    auto gw = params.head_weight[i].grad.data();
    for (std::size_t k = 0; k < gw.size(); ++k) gw[k] += g.weight[k];
    auto gb = params.head_bias[i].grad.data();
    for (std::size_t k = 0; k < gb.size(); ++k) gb[k] += g.bias[k];
    grad = g.input;
    // The input of layer i > 0 is a ReLU output; mask where it was inactive.
    if (i > 0) {
      for (std::size_t k = 0; k < grad.size(); ++k) {
        if (!(cache.inputs[i][k] > T{0})) grad[k] = T{0};
      }
    }
  }
  return grad;
}

template <typename T>
BasicTensor<T> classify(const BasicTensor<T>& feature, const BasicModelParams<T>& params) {
  return nn::softmax(head_forward(feature, params));
}

#define MOTION_INSTANTIATE_NETWORK(T)                                                                   \
  template BasicTensor<T> temporal_shift(const BasicTensor<T>&, double);                               \
  template BasicTensor<T> temporal_shift_backward(const BasicTensor<T>&, double);                      \
  template BasicTensor<T> backbone_forward(const BasicTensor<T>&, const BasicModelParams<T>&,          \
                                           const ModelConfig&, BackboneCache<T>*);                     \
  template BasicTensor<T> backbone_backward(const BasicTensor<T>&, const BackboneCache<T>&,            \
                                            BasicModelParams<T>&, const ModelConfig&, bool);           \
  template BasicTensor<T> consensus(const BasicTensor<T>&);                                            \
  template BasicTensor<T> consensus_backward(const BasicTensor<T>&, std::size_t);                      \
  template BasicTensor<T> head_forward(const BasicTensor<T>&, const BasicModelParams<T>&, HeadCache<T>*); \
  template BasicTensor<T> head_backward(const BasicTensor<T>&, const HeadCache<T>&, BasicModelParams<T>&); \
  template BasicTensor<T> classify(const BasicTensor<T>&, const BasicModelParams<T>&);

MOTION_INSTANTIATE_NETWORK(float)
MOTION_INSTANTIATE_NETWORK(double)

#undef MOTION_INSTANTIATE_NETWORK

}  // namespace motion::model
