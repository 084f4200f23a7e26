#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "motion/numerics/rng.hpp"
#include "motion/numerics/tensor.hpp"
#include "motion/video/clip.hpp"

namespace motion::video {

enum class PreprocessMode { Train, Eval };

struct PreprocessConfig {
  std::size_t canonical_size = 32;
  /// Descending crop side lengths, each <= canonical_size.
  std::vector<std::size_t> crop_sides = {32, 28, 24, 21};
  double hflip_prob = 0.0;
  PreprocessMode mode = PreprocessMode::Eval;

  /// Crop sides in the ratio 256:224:192:169 of S, rounded to nearest.
  static std::vector<std::size_t> scaled_crop_sides(std::size_t canonical_size);
  static PreprocessConfig train(std::size_t canonical_size);
  static PreprocessConfig eval(std::size_t canonical_size);

  void validate() const;
};

/// Augmentation decisions drawn once per clip and shared by all its frames.
struct AugmentDecision {
  std::size_t crop_side = 0;
  std::size_t offset_y = 0;
  std::size_t offset_x = 0;
  bool flip = false;
};

/// Maps frames to a [T, C, S, S] tensor with values in [0, 1].
/// Train: shorter side to S, random square crop of a random side, optional
/// horizontal flip, resize to S x S. Eval: shorter side to S, centre crop.
nn::Tensor preprocess(std::span<const ImageView<std::uint8_t>> frames, const PreprocessConfig& cfg,
                      Rng& rng, AugmentDecision* decision = nullptr);

/// Convenience: preprocess the given frame indices of a clip.
nn::Tensor preprocess_clip(const Clip& clip, std::span<const std::size_t> frame_indices,
                           const PreprocessConfig& cfg, Rng& rng);

}  // namespace motion::video
