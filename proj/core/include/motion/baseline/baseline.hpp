#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "motion/numerics/sgd.hpp"
#include "motion/numerics/tensor.hpp"
#include "motion/synth/dataset.hpp"
#include "motion/synth/motion_type.hpp"
#include "motion/video/clip.hpp"

namespace motion::baseline {

/// Single-channel H x W grid of reals, row-major.
struct Plane {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> values;

  Plane() = default;
  Plane(std::size_t h, std::size_t w, double fill = 0.0) : height(h), width(w), values(h * w, fill) {}

  double& at(std::size_t y, std::size_t x) { return values[y * width + x]; }
  double at(std::size_t y, std::size_t x) const { return values[y * width + x]; }
};

struct FlowField {
  Plane u;  // horizontal displacement, pixels per frame
  Plane v;  // vertical displacement
};

struct FlowConfig {
  /// Smoothness weight, expressed in 8-bit grey levels.
  double alpha = 10.0;
  std::size_t iterations = 100;
  /// Inputs in [0, 1] are multiplied by this before estimation so that alpha
  /// keeps its usual meaning for 0..255 intensities.
  double intensity_scale = 255.0;
};

/// Horn-Schunck: 2x2x2 cube derivative stencils, Jacobi iterations with the
/// 1/6 (edge) + 1/12 (corner) neighbour average, replicated borders.
FlowField estimate_flow(const Plane& frame_a, const Plane& frame_b, const FlowConfig& cfg = {});

/// sqrt(u_x^2 + u_y^2 + v_x^2 + v_y^2); central differences, one-sided at borders.
Plane motion_boundaries(const FlowField& flow);

/// Population std of `map` inside each cell of a grid x grid partition,
/// row-major. Cells are floor(H/grid) x floor(W/grid); the last row and
/// column of cells absorb the remainder.
std::vector<double> cell_std(const Plane& map, std::size_t grid = 4);

struct BaselineConfig {
  std::size_t grid = 4;
  std::size_t hidden = 128;
  std::size_t num_classes = 5;
  double dropout = 0.2;
  std::size_t epochs = 5;
  double learning_rate = 0.001;
  std::size_t batch_size = 1;
  /// z-score features with train-split statistics before the MLP.
  bool standardize = true;
  std::uint64_t seed = 0;
  FlowConfig flow;

  std::size_t feature_dim() const { return grid * grid; }
  void validate() const;
};

/// Time-mean of the motion-boundary maps of consecutive frame pairs, reduced
/// to grid*grid cell standard deviations.
std::vector<double> baseline_features(const video::Clip& clip, const BaselineConfig& cfg = {});

struct BaselineModel {
  nn::Parameter fc0_weight;  // [hidden, features]
  nn::Parameter fc0_bias;
  nn::Parameter fc1_weight;  // [classes, hidden]
  nn::Parameter fc1_bias;
  nn::Tensor feature_mean;   // [features]
  nn::Tensor feature_scale;  // [features], divisor

  std::vector<nn::Parameter*> parameters();
};

struct LabeledFeatures {
  std::vector<double> features;
  MotionType label = MotionType::Linear;
};

std::vector<LabeledFeatures> feature_set(std::span<const synth::LabeledClip> clips, const BaselineConfig& cfg);

/// Plain SGD (no momentum, no weight decay) on mean batch cross-entropy.
BaselineModel train_baseline(std::span<const LabeledFeatures> train, const BaselineConfig& cfg);
BaselineModel train_baseline(std::span<const synth::LabeledClip> train, const BaselineConfig& cfg);

struct BaselinePrediction {
  MotionType motion = MotionType::Linear;
  nn::Tensor probs;
};

BaselinePrediction predict_features(std::span<const double> features, const BaselineModel& model);
BaselinePrediction predict_baseline(const video::Clip& clip, const BaselineModel& model,
                                    const BaselineConfig& cfg = {});

/// MTCK checkpoint; every tensor name carries the "baseline." prefix.
void save_baseline(const std::filesystem::path& path, const BaselineModel& model);
BaselineModel load_baseline(const std::filesystem::path& path);

}  // namespace motion::baseline
