#include "motion/baseline/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "motion/error.hpp"
#include "motion/numerics/checkpoint.hpp"
#include "motion/numerics/ops.hpp"
#include "motion/numerics/rng.hpp"
#include "motion/video/image_ops.hpp"

namespace motion::baseline {

namespace {

std::size_t clampi(std::ptrdiff_t i, std::size_t n) {
  return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(n) - 1));
}

}  // namespace

FlowField estimate_flow(const Plane& frame_a, const Plane& frame_b, const FlowConfig& cfg) {
  if (frame_a.height != frame_b.height || frame_a.width != frame_b.width) {
    throw ShapeError("estimate_flow: frames differ in size");
  }
  if (!(cfg.alpha > 0.0)) throw ConfigError("estimate_flow: alpha must be positive");
  const std::size_t h = frame_a.height, w = frame_a.width;
  const double s = cfg.intensity_scale;
  auto a = [&](std::ptrdiff_t y, std::ptrdiff_t x) { return s * frame_a.at(clampi(y, h), clampi(x, w)); };
  auto b = [&](std::ptrdiff_t y, std::ptrdiff_t x) { return s * frame_b.at(clampi(y, h), clampi(x, w)); };

  Plane ex(h, w), ey(h, w), et(h, w), denom(h, w);
  for (std::size_t yy = 0; yy < h; ++yy) {
    for (std::size_t xx = 0; xx < w; ++xx) {
      const auto y = static_cast<std::ptrdiff_t>(yy), x = static_cast<std::ptrdiff_t>(xx);
      ex.at(yy, xx) = 0.25 * (a(y, x + 1) - a(y, x) + a(y + 1, x + 1) - a(y + 1, x) + b(y, x + 1) - b(y, x) +
                              b(y + 1, x + 1) - b(y + 1, x));
      ey.at(yy, xx) = 0.25 * (a(y + 1, x) - a(y, x) + a(y + 1, x + 1) - a(y, x + 1) + b(y + 1, x) - b(y, x) +
                              b(y + 1, x + 1) - b(y, x + 1));
      et.at(yy, xx) = 0.25 * (b(y, x) - a(y, x) + b(y + 1, x) - a(y + 1, x) + b(y, x + 1) - a(y, x + 1) +
                              b(y + 1, x + 1) - a(y + 1, x + 1));
      denom.at(yy, xx) = cfg.alpha * cfg.alpha + ex.at(yy, xx) * ex.at(yy, xx) + ey.at(yy, xx) * ey.at(yy, xx);
    }
  }

  FlowField f{Plane(h, w), Plane(h, w)};
  Plane u_next(h, w), v_next(h, w);
  auto average = [&](const Plane& p, std::size_t yy, std::size_t xx) {
    const auto y = static_cast<std::ptrdiff_t>(yy), x = static_cast<std::ptrdiff_t>(xx);
    auto at = [&](std::ptrdiff_t dy, std::ptrdiff_t dx) { return p.at(clampi(y + dy, h), clampi(x + dx, w)); };
    return (at(-1, 0) + at(1, 0) + at(0, -1) + at(0, 1)) / 6.0 +
           (at(-1, -1) + at(-1, 1) + at(1, -1) + at(1, 1)) / 12.0;
  };
  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        const double ub = average(f.u, y, x), vb = average(f.v, y, x);
        const double t = (ex.at(y, x) * ub + ey.at(y, x) * vb + et.at(y, x)) / denom.at(y, x);
        u_next.at(y, x) = ub - ex.at(y, x) * t;
        v_next.at(y, x) = vb - ey.at(y, x) * t;
      }
    }
    std::swap(f.u, u_next);
    std::swap(f.v, v_next);
  }
  return f;
}

namespace {

double dx(const Plane& p, std::size_t y, std::size_t x) {
  if (p.width < 2) return 0.0;
  if (x == 0) return p.at(y, 1) - p.at(y, 0);
  if (x + 1 == p.width) return p.at(y, x) - p.at(y, x - 1);
  return 0.5 * (p.at(y, x + 1) - p.at(y, x - 1));
}

double dy(const Plane& p, std::size_t y, std::size_t x) {
  if (p.height < 2) return 0.0;
  if (y == 0) return p.at(1, x) - p.at(0, x);
  if (y + 1 == p.height) return p.at(y, x) - p.at(y - 1, x);
  return 0.5 * (p.at(y + 1, x) - p.at(y - 1, x));
}

}  // namespace

Plane motion_boundaries(const FlowField& flow) {
  const Plane& u = flow.u;
  const Plane& v = flow.v;
  if (u.height != v.height || u.width != v.width) throw ShapeError("motion_boundaries: u and v differ in size");
  Plane mb(u.height, u.width);
  for (std::size_t y = 0; y < u.height; ++y) {
    for (std::size_t x = 0; x < u.width; ++x) {
      const double ux = dx(u, y, x), uy = dy(u, y, x), vx = dx(v, y, x), vy = dy(v, y, x);
      mb.at(y, x) = std::sqrt(ux * ux + uy * uy + vx * vx + vy * vy);
    }
  }
  return mb;
}

std::vector<double> cell_std(const Plane& map, std::size_t grid) {
  if (grid == 0 || map.height < grid || map.width < grid) {
    throw ShapeError("cell_std: map smaller than the cell grid");
  }
  const std::size_t ch = map.height / grid, cw = map.width / grid;
  std::vector<double> out;
  out.reserve(grid * grid);
  for (std::size_t gy = 0; gy < grid; ++gy) {
    const std::size_t y0 = gy * ch, y1 = gy + 1 == grid ? map.height : y0 + ch;
    for (std::size_t gx = 0; gx < grid; ++gx) {
      const std::size_t x0 = gx * cw, x1 = gx + 1 == grid ? map.width : x0 + cw;
      double sum = 0.0;
      for (std::size_t y = y0; y < y1; ++y)
        for (std::size_t x = x0; x < x1; ++x) sum += map.at(y, x);
      const double n = static_cast<double>((y1 - y0) * (x1 - x0));
      const double mean = sum / n;
      double ss = 0.0;
      for (std::size_t y = y0; y < y1; ++y)
        for (std::size_t x = x0; x < x1; ++x) ss += (map.at(y, x) - mean) * (map.at(y, x) - mean);
      out.push_back(std::sqrt(ss / n));
    }
  }
  return out;
}

void BaselineConfig::validate() const {
  if (grid == 0 || hidden == 0 || num_classes == 0) throw ConfigError("baseline: sizes must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("baseline: dropout must lie in [0, 1)");
  if (epochs == 0 || batch_size == 0) throw ConfigError("baseline: epochs and batch_size must be positive");
  if (!(learning_rate > 0.0)) throw ConfigError("baseline: learning_rate must be positive");
}

std::vector<double> baseline_features(const video::Clip& clip, const BaselineConfig& cfg) {
  if (clip.frame_count < 2) {
    throw InsufficientFramesError("baseline features need at least 2 frames, clip has " +
                                  std::to_string(clip.frame_count));
  }
  auto gray = [&](std::size_t t) {
    const video::ImageF g = video::to_grayscale(clip.frame_view(t));
    Plane p(g.height, g.width);
    for (std::size_t i = 0; i < p.values.size(); ++i) p.values[i] = g.pixels[i] / 255.0;
    return p;
  };
  Plane mean(clip.height, clip.width);
  Plane prev = gray(0);
  for (std::size_t t = 1; t < clip.frame_count; ++t) {
    Plane next = gray(t);
    const Plane mb = motion_boundaries(estimate_flow(prev, next, cfg.flow));
    for (std::size_t i = 0; i < mean.values.size(); ++i) mean.values[i] += mb.values[i];
    prev = std::move(next);
  }
  const double pairs = static_cast<double>(clip.frame_count - 1);
  for (double& v : mean.values) v /= pairs;
  return cell_std(mean, cfg.grid);
}

std::vector<nn::Parameter*> BaselineModel::parameters() { return {&fc0_weight, &fc0_bias, &fc1_weight, &fc1_bias}; }

std::vector<LabeledFeatures> feature_set(std::span<const synth::LabeledClip> clips, const BaselineConfig& cfg) {
  std::vector<LabeledFeatures> out;
  out.reserve(clips.size());
  for (const auto& lc : clips) out.push_back({baseline_features(lc.clip, cfg), lc.label});
  return out;
}

namespace {

nn::Tensor he_uniform(nn::Shape shape, std::size_t fan_in, Rng& rng) {
  nn::Tensor t(std::move(shape));
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
  for (float& v : t.data()) v = static_cast<float>(rng.uniform(-bound, bound));
  return t;
}

nn::Tensor normalized(std::span<const double> features, const BaselineModel& m) {
  if (features.size() != m.feature_mean.size()) {
    throw ShapeError("baseline: expected " + std::to_string(m.feature_mean.size()) + " features, got " +
                     std::to_string(features.size()));
  }
  nn::Tensor x({features.size()});
  for (std::size_t i = 0; i < features.size(); ++i) {
    x[i] = static_cast<float>((features[i] - m.feature_mean[i]) / m.feature_scale[i]);
  }
  return x;
}

}  // namespace

BaselineModel train_baseline(std::span<const LabeledFeatures> train, const BaselineConfig& cfg) {
  cfg.validate();
  if (train.empty()) throw DatasetError("baseline train split is empty");
  const std::size_t f = cfg.feature_dim();
  for (const auto& s : train) {
    if (s.features.size() != f) throw ShapeError("baseline: feature length mismatch");
  }

  Rng init_rng(mix_seed(cfg.seed, 11));
  BaselineModel m;
  m.fc0_weight = nn::Parameter(he_uniform({cfg.hidden, f}, f, init_rng));
  m.fc0_bias = nn::Parameter(nn::Tensor({cfg.hidden}));
  m.fc1_weight = nn::Parameter(he_uniform({cfg.num_classes, cfg.hidden}, cfg.hidden, init_rng));
  m.fc1_bias = nn::Parameter(nn::Tensor({cfg.num_classes}));
  m.feature_mean = nn::Tensor({f});
  m.feature_scale = nn::Tensor({f}, 1.0f);
  if (cfg.standardize) {
    for (std::size_t i = 0; i < f; ++i) {
      double sum = 0.0, ss = 0.0;
      for (const auto& s : train) sum += s.features[i];
      const double mean = sum / static_cast<double>(train.size());
      for (const auto& s : train) ss += (s.features[i] - mean) * (s.features[i] - mean);
      const double sd = std::sqrt(ss / static_cast<double>(train.size()));
      m.feature_mean[i] = static_cast<float>(mean);
      m.feature_scale[i] = sd > 1e-12 ? static_cast<float>(sd) : 1.0f;
    }
  }

  const nn::SgdConfig sgd{cfg.learning_rate, 0.0, 0.0};
  auto params = m.parameters();
  Rng shuffle_rng(mix_seed(cfg.seed, 12));
  Rng dropout_rng(mix_seed(cfg.seed, 13));
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[shuffle_rng.uniform_index(i)]);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const float scale = 1.0f / static_cast<float>(end - start);
      for (auto* p : params) p->zero_grad();
      for (std::size_t j = start; j < end; ++j) {
        const auto& s = train[order[j]];
        const std::size_t target = code(s.label);
        const nn::Tensor x = normalized(s.features, m);
        const nn::Tensor h = nn::linear(x, m.fc0_weight.value, m.fc0_bias.value);
        const nn::Tensor a = nn::relu(h);
        const auto drop = nn::dropout(a, cfg.dropout, dropout_rng, true);
        const auto ce = nn::softmax_cross_entropy(nn::linear(drop.output, m.fc1_weight.value, m.fc1_bias.value), target);
        if (!std::isfinite(ce.loss)) {
          throw DivergenceError("baseline: non-finite loss at epoch " + std::to_string(epoch));
        }
        nn::Tensor dlogits = nn::softmax_cross_entropy_backward(ce.probs, target);
        for (float& v : dlogits.data()) v *= scale;
        const auto g1 = nn::linear_backward(drop.output, m.fc1_weight.value, dlogits);
        const auto g0 = nn::linear_backward(x, m.fc0_weight.value,
                                            nn::relu_backward(h, nn::dropout_backward(drop.mask, g1.input)));
        auto acc = [](nn::Tensor& dst, const nn::Tensor& src) {
          for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
        };
        acc(m.fc1_weight.grad, g1.weight);
        acc(m.fc1_bias.grad, g1.bias);
        acc(m.fc0_weight.grad, g0.weight);
        acc(m.fc0_bias.grad, g0.bias);
      }
      nn::sgd_step<float>(params, sgd);
    }
  }
  for (auto* p : params) {
    p->zero_grad();
    p->momentum_buffer.fill(0.0f);
  }
  return m;
}

BaselineModel train_baseline(std::span<const synth::LabeledClip> train, const BaselineConfig& cfg) {
  const auto features = feature_set(train, cfg);
  return train_baseline(std::span<const LabeledFeatures>(features), cfg);
}

BaselinePrediction predict_features(std::span<const double> features, const BaselineModel& m) {
  const nn::Tensor x = normalized(features, m);
  const nn::Tensor a = nn::relu(nn::linear(x, m.fc0_weight.value, m.fc0_bias.value));
  BaselinePrediction p;
  p.probs = nn::softmax(nn::linear(a, m.fc1_weight.value, m.fc1_bias.value));
  p.motion = static_cast<MotionType>(nn::argmax<float>(p.probs.data()));
  return p;
}

BaselinePrediction predict_baseline(const video::Clip& clip, const BaselineModel& model, const BaselineConfig& cfg) {
  const auto f = baseline_features(clip, cfg);
  return predict_features(f, model);
}

namespace {
constexpr const char* kNames[] = {"baseline.fc0.weight", "baseline.fc0.bias",     "baseline.fc1.weight",
                                  "baseline.fc1.bias",   "baseline.feature_mean", "baseline.feature_scale"};
}

void save_baseline(const std::filesystem::path& path, const BaselineModel& m) {
  const std::vector<nn::NamedTensor> tensors = {
      {kNames[0], m.fc0_weight.value}, {kNames[1], m.fc0_bias.value}, {kNames[2], m.fc1_weight.value},
      {kNames[3], m.fc1_bias.value},   {kNames[4], m.feature_mean},   {kNames[5], m.feature_scale}};
  nn::save_checkpoint(path, tensors);
}

BaselineModel load_baseline(const std::filesystem::path& path) {
  const auto tensors = nn::load_checkpoint(path);
  if (tensors.size() != 6) throw FormatError(path.string() + ": not a baseline checkpoint");
  for (std::size_t i = 0; i < 6; ++i) {
    if (tensors[i].name != kNames[i]) {
      throw FormatError(path.string() + ": expected tensor '" + kNames[i] + "', found '" + tensors[i].name + "'");
    }
  }
  BaselineModel m;
  m.fc0_weight = nn::Parameter(tensors[0].tensor);
  m.fc0_bias = nn::Parameter(tensors[1].tensor);
  m.fc1_weight = nn::Parameter(tensors[2].tensor);
  m.fc1_bias = nn::Parameter(tensors[3].tensor);
  m.feature_mean = tensors[4].tensor;
  m.feature_scale = tensors[5].tensor;
  const std::size_t f = m.feature_mean.size(), hidden = m.fc0_bias.value.size(), classes = m.fc1_bias.value.size();
  if (m.fc0_weight.value.shape() != nn::Shape{hidden, f} || m.fc1_weight.value.shape() != nn::Shape{classes, hidden} ||
      m.feature_scale.size() != f) {
    throw ShapeError(path.string() + ": inconsistent baseline tensor shapes");
  }
  return m;
}

}  // namespace motion::baseline
