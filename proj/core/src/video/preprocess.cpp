#include "motion/video/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "motion/error.hpp"
#include "motion/video/image_ops.hpp"

namespace motion::video {

std::vector<std::size_t> PreprocessConfig::scaled_crop_sides(std::size_t canonical_size) {
  std::vector<std::size_t> sides;
  for (double ratio : {256.0, 224.0, 192.0, 169.0}) {
    sides.push_back(static_cast<std::size_t>(std::lround(ratio / 256.0 * static_cast<double>(canonical_size))));
  }
  return sides;
}

PreprocessConfig PreprocessConfig::train(std::size_t canonical_size) {
  return {canonical_size, scaled_crop_sides(canonical_size), 0.5, PreprocessMode::Train};
}

PreprocessConfig PreprocessConfig::eval(std::size_t canonical_size) {
  return {canonical_size, scaled_crop_sides(canonical_size), 0.0, PreprocessMode::Eval};
}

void PreprocessConfig::validate() const {
  if (canonical_size < 8) throw ConfigError("preprocess: canonical size must be at least 8");
  if (mode == PreprocessMode::Train) {
    if (crop_sides.empty()) throw ConfigError("preprocess: crop_sides must not be empty");
    for (std::size_t d : crop_sides) {
      if (d < 8 || d > canonical_size) {
        throw ConfigError("preprocess: crop side " + std::to_string(d) + " outside [8, " +
                          std::to_string(canonical_size) + "]");
      }
    }
    if (!(hflip_prob >= 0.0 && hflip_prob <= 1.0)) throw ConfigError("preprocess: hflip_prob outside [0,1]");
  }
}

namespace {

ImageF crop(const ImageF& src, std::size_t y0, std::size_t x0, std::size_t side, bool flip) {
  ImageF out(side, side, src.channels);
  for (std::size_t y = 0; y < side; ++y) {
    for (std::size_t x = 0; x < side; ++x) {
      const std::size_t sx = flip ? x0 + side - 1 - x : x0 + x;
      for (std::size_t c = 0; c < src.channels; ++c) out.at(y, x, c) = src.at(y0 + y, sx, c);
    }
  }
  return out;
}

}  // namespace

nn::Tensor preprocess(std::span<const ImageView<std::uint8_t>> frames, const PreprocessConfig& cfg,
                      Rng& rng, AugmentDecision* decision) {
  cfg.validate();
  if (frames.empty()) throw EmptyClipError("preprocess: no frames selected");
  const std::size_t h = frames[0].height, w = frames[0].width, c = frames[0].channels;
  if (h < 8 || w < 8) {
    throw FormatError("preprocess: frame " + std::to_string(h) + "x" + std::to_string(w) +
                      " is smaller than 8x8");
  }
  for (const auto& f : frames) {
    if (f.height != h || f.width != w || f.channels != c) throw FormatError("preprocess: frames differ in size");
  }

  const std::size_t s = cfg.canonical_size;
  std::size_t sh = s, sw = s;
  if (h <= w) {
    sw = static_cast<std::size_t>(std::lround(static_cast<double>(w) * static_cast<double>(s) / static_cast<double>(h)));
  } else {
    sh = static_cast<std::size_t>(std::lround(static_cast<double>(h) * static_cast<double>(s) / static_cast<double>(w)));
  }

  AugmentDecision d;
  if (cfg.mode == PreprocessMode::Train) {
    d.crop_side = cfg.crop_sides[rng.uniform_index(cfg.crop_sides.size())];
    d.offset_y = rng.uniform_index(sh - d.crop_side + 1);
    d.offset_x = rng.uniform_index(sw - d.crop_side + 1);
    d.flip = rng.bernoulli(cfg.hflip_prob);
  } else {
    d.crop_side = s;
    d.offset_y = (sh - s) / 2;
    d.offset_x = (sw - s) / 2;
  }
  if (decision) *decision = d;

  nn::Tensor out({frames.size(), c, s, s});
  const std::size_t plane = s * s;
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const ImageF scaled = resize_bilinear(frames[t], sh, sw);
    ImageF patch = crop(scaled, d.offset_y, d.offset_x, d.crop_side, d.flip);
    if (d.crop_side != s) patch = resize_bilinear(patch.view(), s, s);
    float* dst = out.data().data() + t * c * plane;
    for (std::size_t ch = 0; ch < c; ++ch) {
      for (std::size_t i = 0; i < plane; ++i) {
        dst[ch * plane + i] = std::clamp(patch.pixels[i * c + ch] / 255.0f, 0.0f, 1.0f);
      }
    }
  }
  return out;
}

nn::Tensor preprocess_clip(const Clip& clip, std::span<const std::size_t> frame_indices,
                           const PreprocessConfig& cfg, Rng& rng) {
  std::vector<ImageView<std::uint8_t>> views;
  views.reserve(frame_indices.size());
  for (std::size_t idx : frame_indices) {
    if (idx >= clip.frame_count) throw InsufficientFramesError("preprocess: frame index out of range");
    views.push_back(clip.frame_view(idx));
  }
  return preprocess(views, cfg, rng);
}

}  // namespace motion::video
