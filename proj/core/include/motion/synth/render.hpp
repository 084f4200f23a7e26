#pragma once

#include <cstdint>
#include <span>

#include "motion/numerics/rng.hpp"
#include "motion/synth/trajectory.hpp"
#include "motion/video/clip.hpp"

namespace motion::synth {

enum class Background { Plain, Textured };

struct SynthConfig {
  std::size_t clips_per_class = 300;
  std::size_t height = 32;
  std::size_t width = 32;
  std::size_t frames = 30;
  double sprite_radius = 2.0;
  Background background = Background::Textured;
  std::uint64_t master_seed = 0;
  SynthRanges ranges;

  /// Textured backgrounds draw i.i.d. grey levels in [texture_min, texture_max].
  std::uint8_t texture_min = 0;
  std::uint8_t texture_max = 64;
  std::uint8_t plain_level = 128;
  std::uint8_t sprite_level = 255;

  void validate() const;
  FrameBounds bounds() const { return FrameBounds::for_sprite(height, width, sprite_radius); }
};

/// Renders a single-channel clip: a static background (plain grey or one seeded
/// noise texture shared by all frames) with a filled disc at each position.
/// Pixel (y, x) is lit when (x - round(px))^2 + (y - round(py))^2 <= radius^2.
video::Clip render_clip(std::span<const Point> positions, const SynthConfig& cfg, Rng& rng);

}  // namespace motion::synth
