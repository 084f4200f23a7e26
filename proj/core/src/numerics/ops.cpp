#include "motion/numerics/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace motion::nn {

void Conv2dGeometry::validate() const {
  if (stride == 0) throw ConfigError("conv2d: stride must be positive");
  if (kernel == 0) throw ConfigError("conv2d: kernel must be positive");
  if (kernel > in_height + 2 * pad || kernel > in_width + 2 * pad) {
    throw ShapeError("conv2d: kernel " + std::to_string(kernel) + " larger than padded input " +
                     std::to_string(in_height + 2 * pad) + "x" + std::to_string(in_width + 2 * pad));
  }
}

namespace kernels {
namespace {

// Rows of the unrolled input: row p holds the C_in*k*k receptive field of
// output pixel p (zero where the window hangs over the padding).
template <typename T>
void im2row(const Conv2dGeometry& g, const T* input, std::vector<T>& rows) {
  const std::size_t oh = g.out_height(), ow = g.out_width(), k = g.kernel;
  const std::size_t width = g.in_channels * k * k;
  rows.assign(oh * ow * width, T{0});
  for (std::size_t oy = 0; oy < oh; ++oy) {
    for (std::size_t ox = 0; ox < ow; ++ox) {
      T* row = rows.data() + (oy * ow + ox) * width;
      for (std::size_t ci = 0; ci < g.in_channels; ++ci) {
        const T* in = input + ci * g.in_height * g.in_width;
        for (std::size_t ky = 0; ky < k; ++ky) {
          const std::size_t y = oy * g.stride + ky;
          if (y < g.pad || y - g.pad >= g.in_height) continue;
          const T* in_row = in + (y - g.pad) * g.in_width;
          T* dst = row + (ci * k + ky) * k;
          for (std::size_t kx = 0; kx < k; ++kx) {
            const std::size_t x = ox * g.stride + kx;
            if (x >= g.pad && x - g.pad < g.in_width) dst[kx] = in_row[x - g.pad];
          }
        }
      }
    }
  }
}

// Adjoint of im2row: scatter-adds unrolled rows back onto the input grid.
template <typename T>
void row2im(const Conv2dGeometry& g, const std::vector<T>& rows, T* input) {
  const std::size_t oh = g.out_height(), ow = g.out_width(), k = g.kernel;
  const std::size_t width = g.in_channels * k * k;
  std::fill(input, input + g.input_size(), T{0});
  for (std::size_t oy = 0; oy < oh; ++oy) {
    for (std::size_t ox = 0; ox < ow; ++ox) {
      const T* row = rows.data() + (oy * ow + ox) * width;
      for (std::size_t ci = 0; ci < g.in_channels; ++ci) {
        T* in = input + ci * g.in_height * g.in_width;
        for (std::size_t ky = 0; ky < k; ++ky) {
          const std::size_t y = oy * g.stride + ky;
          if (y < g.pad || y - g.pad >= g.in_height) continue;
          T* in_row = in + (y - g.pad) * g.in_width;
          const T* src = row + (ci * k + ky) * k;
          for (std::size_t kx = 0; kx < k; ++kx) {
            const std::size_t x = ox * g.stride + kx;
            if (x >= g.pad && x - g.pad < g.in_width) in_row[x - g.pad] += src[kx];
          }
        }
      }
    }
  }
}

template <typename T>
T dot(const T* a, const T* b, std::size_t n) {
  T acc{0};
#pragma omp simd reduction(+ : acc)
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

template <typename T>
void axpy(T alpha, const T* x, T* y, std::size_t n) {
#pragma omp simd
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

template <typename T>
std::vector<T>& scratch() {
  thread_local std::vector<T> buffer;
  return buffer;
}

template <typename T>
std::vector<T>& scratch2() {
  thread_local std::vector<T> buffer;
  return buffer;
}

}  // namespace

template <typename T>
void conv2d_forward(const Conv2dGeometry& g, std::span<const T> input, std::span<const T> weight,
                    std::span<const T> bias, std::span<T> output) {
  const std::size_t pixels = g.out_height() * g.out_width();
  const std::size_t width = g.in_channels * g.kernel * g.kernel;
  auto& rows = scratch<T>();
  im2row(g, input.data(), rows);
  for (std::size_t co = 0; co < g.out_channels; ++co) {
    const T* w = weight.data() + co * width;
    T* out = output.data() + co * pixels;
    for (std::size_t p = 0; p < pixels; ++p) out[p] = bias[co] + dot(w, rows.data() + p * width, width);
  }
}

template <typename T>
void conv2d_backward(const Conv2dGeometry& g, std::span<const T> input, std::span<const T> weight,
                     std::span<const T> grad_output, std::span<T> grad_input,
                     std::span<T> grad_weight, std::span<T> grad_bias) {
  const std::size_t pixels = g.out_height() * g.out_width();
  const std::size_t width = g.in_channels * g.kernel * g.kernel;
  auto& rows = scratch<T>();
  im2row(g, input.data(), rows);
  for (std::size_t co = 0; co < g.out_channels; ++co) {
    const T* go = grad_output.data() + co * pixels;
    T* gw = grad_weight.data() + co * width;
    T bsum{0};
    for (std::size_t p = 0; p < pixels; ++p) {
      bsum += go[p];
      axpy(go[p], rows.data() + p * width, gw, width);
    }
    grad_bias[co] += bsum;
  }
  if (grad_input.empty()) return;
  auto& grad_rows = scratch2<T>();
  grad_rows.assign(pixels * width, T{0});
  for (std::size_t p = 0; p < pixels; ++p) {
    T* gr = grad_rows.data() + p * width;
    for (std::size_t co = 0; co < g.out_channels; ++co) {
      axpy(grad_output[co * pixels + p], weight.data() + co * width, gr, width);
    }
  }
  row2im(g, grad_rows, grad_input.data());
}

template void conv2d_forward<float>(const Conv2dGeometry&, std::span<const float>,
                                    std::span<const float>, std::span<const float>,
                                    std::span<float>);
template void conv2d_forward<double>(const Conv2dGeometry&, std::span<const double>,
                                     std::span<const double>, std::span<const double>,
                                     std::span<double>);
template void conv2d_backward<float>(const Conv2dGeometry&, std::span<const float>,
                                     std::span<const float>, std::span<const float>,
                                     std::span<float>, std::span<float>, std::span<float>);
template void conv2d_backward<double>(const Conv2dGeometry&, std::span<const double>,
                                      std::span<const double>, std::span<const double>,
                                      std::span<double>, std::span<double>, std::span<double>);

}  // namespace kernels

namespace {

template <typename T>
Conv2dGeometry conv_geometry(const BasicTensor<T>& input, const BasicTensor<T>& weight,
                             std::size_t stride, std::size_t pad) {
  if (input.rank() != 3) throw ShapeError("conv2d: input must be [C,H,W], got " + shape_string(input.shape()));
  if (weight.rank() != 4 || weight.dim(2) != weight.dim(3)) {
    throw ShapeError("conv2d: weight must be [C_out,C_in,k,k], got " + shape_string(weight.shape()));
  }
  if (weight.dim(1) != input.dim(0)) {
    throw ShapeError("conv2d: weight expects " + std::to_string(weight.dim(1)) +
                     " input channels, input has " + std::to_string(input.dim(0)));
  }
  Conv2dGeometry g;
  g.in_channels = input.dim(0);
  g.in_height = input.dim(1);
  g.in_width = input.dim(2);
  g.out_channels = weight.dim(0);
  g.kernel = weight.dim(2);
  g.stride = stride;
  g.pad = pad;
  g.validate();
  return g;
}

}  // namespace

template <typename T>
BasicTensor<T> conv2d(const BasicTensor<T>& input, const BasicTensor<T>& weight,
                      const BasicTensor<T>& bias, std::size_t stride, std::size_t pad) {
  const Conv2dGeometry g = conv_geometry(input, weight, stride, pad);
  expect_shape(bias, {g.out_channels}, "conv2d bias");
  BasicTensor<T> out({g.out_channels, g.out_height(), g.out_width()});
  kernels::conv2d_forward<T>(g, input.data(), weight.data(), bias.data(), out.data());
  return out;
}

template <typename T>
Conv2dGrads<T> conv2d_backward(const BasicTensor<T>& input, const BasicTensor<T>& weight,
                               const BasicTensor<T>& grad_output, std::size_t stride,
                               std::size_t pad) {
  const Conv2dGeometry g = conv_geometry(input, weight, stride, pad);
  expect_shape(grad_output, {g.out_channels, g.out_height(), g.out_width()}, "conv2d grad_output");
  Conv2dGrads<T> grads{BasicTensor<T>(input.shape()), BasicTensor<T>(weight.shape()),
                       BasicTensor<T>({g.out_channels})};
  kernels::conv2d_backward<T>(g, input.data(), weight.data(), grad_output.data(),
                              grads.input.data(), grads.weight.data(), grads.bias.data());
  return grads;
}

template <typename T>
BasicTensor<T> relu(const BasicTensor<T>& input) {
  BasicTensor<T> out(input.shape());
  for (std::size_t i = 0; i < input.size(); ++i) out[i] = input[i] > T{0} ? input[i] : T{0};
  return out;
}

template <typename T>
BasicTensor<T> relu_backward(const BasicTensor<T>& input, const BasicTensor<T>& grad_output) {
  expect_shape(grad_output, input.shape(), "relu grad_output");
  BasicTensor<T> out(input.shape());
  for (std::size_t i = 0; i < input.size(); ++i) out[i] = input[i] > T{0} ? grad_output[i] : T{0};
  return out;
}

template <typename T>
BasicTensor<T> linear(const BasicTensor<T>& input, const BasicTensor<T>& weight,
                      const BasicTensor<T>& bias) {
  if (input.rank() != 1 || weight.rank() != 2 || weight.dim(1) != input.dim(0)) {
    throw ShapeError("linear: incompatible input " + shape_string(input.shape()) + " and weight " +
                     shape_string(weight.shape()));
  }
  const std::size_t fin = weight.dim(1), fout = weight.dim(0);
  expect_shape(bias, {fout}, "linear bias");
  BasicTensor<T> out({fout});
  for (std::size_t o = 0; o < fout; ++o) {
    const T* w = weight.data().data() + o * fin;
    T acc = bias[o];
    for (std::size_t i = 0; i < fin; ++i) acc += w[i] * input[i];
    out[o] = acc;
  }
  return out;
}

template <typename T>
LinearGrads<T> linear_backward(const BasicTensor<T>& input, const BasicTensor<T>& weight,
                               const BasicTensor<T>& grad_output) {
  if (input.rank() != 1 || weight.rank() != 2 || weight.dim(1) != input.dim(0)) {
    throw ShapeError("linear_backward: incompatible input and weight");
  }
  const std::size_t fin = weight.dim(1), fout = weight.dim(0);
  expect_shape(grad_output, {fout}, "linear grad_output");
  LinearGrads<T> g{BasicTensor<T>({fin}), BasicTensor<T>(weight.shape()), grad_output};
  for (std::size_t o = 0; o < fout; ++o) {
    const T go = grad_output[o];
    const T* w = weight.data().data() + o * fin;
    T* gw = g.weight.data().data() + o * fin;
    for (std::size_t i = 0; i < fin; ++i) {
      gw[i] = go * input[i];
      g.input[i] += go * w[i];
    }
  }
  return g;
}

template <typename T>
BasicTensor<T> global_avg_pool(const BasicTensor<T>& input) {
  if (input.rank() != 3 || input.dim(1) == 0 || input.dim(2) == 0) {
    throw ShapeError("global_avg_pool: input must be [C,H,W] with H,W >= 1, got " +
                     shape_string(input.shape()));
  }
  const std::size_t c = input.dim(0), hw = input.dim(1) * input.dim(2);
  BasicTensor<T> out({c});
  for (std::size_t ch = 0; ch < c; ++ch) {
    T acc{0};
    for (std::size_t i = 0; i < hw; ++i) acc += input[ch * hw + i];
    out[ch] = acc / static_cast<T>(hw);
  }
  return out;
}

template <typename T>
BasicTensor<T> global_avg_pool_backward(const Shape& input_shape, const BasicTensor<T>& grad_output) {
  if (input_shape.size() != 3) throw ShapeError("global_avg_pool_backward: input shape must be rank 3");
  expect_shape(grad_output, {input_shape[0]}, "global_avg_pool grad_output");
  const std::size_t hw = input_shape[1] * input_shape[2];
  BasicTensor<T> out(input_shape);
  for (std::size_t ch = 0; ch < input_shape[0]; ++ch) {
    const T v = grad_output[ch] / static_cast<T>(hw);
    std::fill_n(out.data().begin() + static_cast<std::ptrdiff_t>(ch * hw), hw, v);
  }
  return out;
}

template <typename T>
DropoutResult<T> dropout(const BasicTensor<T>& input, double p, Rng& rng, bool training) {
  if (!(p >= 0.0 && p < 1.0)) throw ConfigError("dropout: p must be in [0,1), got " + std::to_string(p));
  DropoutResult<T> r{input, BasicTensor<T>(input.shape(), T{1})};
  if (!training || p == 0.0) return r;
  const T keep_scale = static_cast<T>(1.0 / (1.0 - p));
  for (std::size_t i = 0; i < input.size(); ++i) {
    const T m = rng.bernoulli(p) ? T{0} : keep_scale;
    r.mask[i] = m;
    r.output[i] = input[i] * m;
  }
  return r;
}

template <typename T>
BasicTensor<T> dropout_backward(const BasicTensor<T>& mask, const BasicTensor<T>& grad_output) {
  expect_shape(grad_output, mask.shape(), "dropout grad_output");
  BasicTensor<T> out(mask.shape());
  for (std::size_t i = 0; i < mask.size(); ++i) out[i] = mask[i] * grad_output[i];
  return out;
}

template <typename T>
BasicTensor<T> softmax(const BasicTensor<T>& logits) {
  if (logits.rank() != 1 || logits.empty()) throw ShapeError("softmax: logits must be a non-empty vector");
  const T mx = *std::max_element(logits.data().begin(), logits.data().end());
  BasicTensor<T> probs(logits.shape());
  T sum{0};
  for (std::size_t i = 0; i < logits.size(); ++i) {
    probs[i] = std::exp(logits[i] - mx);
    sum += probs[i];
  }
  for (std::size_t i = 0; i < logits.size(); ++i) probs[i] /= sum;
  return probs;
}

template <typename T>
CrossEntropy<T> softmax_cross_entropy(const BasicTensor<T>& logits, std::size_t target_class) {
  if (logits.rank() != 1 || logits.empty()) throw ShapeError("softmax_cross_entropy: logits must be a non-empty vector");
  if (target_class >= logits.size()) {
    throw LabelError("softmax_cross_entropy: target " + std::to_string(target_class) +
                     " out of range for " + std::to_string(logits.size()) + " classes");
  }
  const T mx = *std::max_element(logits.data().begin(), logits.data().end());
  T sum{0};
  for (T v : logits.data()) sum += std::exp(v - mx);
  const T log_z = mx + std::log(sum);
  CrossEntropy<T> r;
  r.loss = log_z - logits[target_class];
  r.probs = BasicTensor<T>(logits.shape());
  for (std::size_t i = 0; i < logits.size(); ++i) r.probs[i] = std::exp(logits[i] - log_z);
  return r;
}

template <typename T>
BasicTensor<T> softmax_cross_entropy_backward(const BasicTensor<T>& probs, std::size_t target_class) {
  if (target_class >= probs.size()) throw LabelError("softmax_cross_entropy_backward: target out of range");
  BasicTensor<T> g = probs;
  g[target_class] -= T{1};
  return g;
}

template <typename T>
std::size_t argmax(std::span<const T> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

#define MOTION_INSTANTIATE_OPS(T)                                                                 \
  template BasicTensor<T> conv2d(const BasicTensor<T>&, const BasicTensor<T>&,                   \
                                 const BasicTensor<T>&, std::size_t, std::size_t);               \
  template Conv2dGrads<T> conv2d_backward(const BasicTensor<T>&, const BasicTensor<T>&,          \
                                          const BasicTensor<T>&, std::size_t, std::size_t);      \
  template BasicTensor<T> relu(const BasicTensor<T>&);                                           \
  template BasicTensor<T> relu_backward(const BasicTensor<T>&, const BasicTensor<T>&);           \
  template BasicTensor<T> linear(const BasicTensor<T>&, const BasicTensor<T>&,                   \
                                 const BasicTensor<T>&);                                         \
  template LinearGrads<T> linear_backward(const BasicTensor<T>&, const BasicTensor<T>&,          \
                                          const BasicTensor<T>&);                                \
  template BasicTensor<T> global_avg_pool(const BasicTensor<T>&);                                \
  template BasicTensor<T> global_avg_pool_backward(const Shape&, const BasicTensor<T>&);         \
  template DropoutResult<T> dropout(const BasicTensor<T>&, double, Rng&, bool);                  \
  template BasicTensor<T> dropout_backward(const BasicTensor<T>&, const BasicTensor<T>&);        \
  template BasicTensor<T> softmax(const BasicTensor<T>&);                                        \
  template CrossEntropy<T> softmax_cross_entropy(const BasicTensor<T>&, std::size_t);            \
  template BasicTensor<T> softmax_cross_entropy_backward(const BasicTensor<T>&, std::size_t);    \
  template std::size_t argmax(std::span<const T>);

MOTION_INSTANTIATE_OPS(float)
MOTION_INSTANTIATE_OPS(double)

#undef MOTION_INSTANTIATE_OPS

}  // namespace motion::nn
