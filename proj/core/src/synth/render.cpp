#include "motion/synth/render.hpp"

#include <algorithm>
#include <cmath>

#include "motion/error.hpp"

namespace motion::synth {

void SynthConfig::validate() const {
  if (height < 8 || width < 8) throw ConfigError("synth: frames must be at least 8x8");
  if (frames < 2) throw ConfigError("synth: clips need at least 2 frames");
  if (!(sprite_radius >= 0.0) || sprite_radius >= static_cast<double>(std::min(height, width)) / 2.0) {
    throw ConfigError("synth: sprite radius must be in [0, min(H,W)/2)");
  }
  if (texture_min > texture_max) throw ConfigError("synth: texture_min exceeds texture_max");
}

video::Clip render_clip(std::span<const Point> positions, const SynthConfig& cfg, Rng& rng) {
  cfg.validate();
  if (positions.size() != cfg.frames) {
    throw ShapeError("render_clip: got " + std::to_string(positions.size()) + " positions for " +
                     std::to_string(cfg.frames) + " frames");
  }
  video::Clip clip = video::Clip::blank({}, cfg.frames, cfg.height, cfg.width, 1);

  std::vector<std::uint8_t> background(cfg.height * cfg.width, cfg.plain_level);
  if (cfg.background == Background::Textured) {
    const std::uint64_t levels = static_cast<std::uint64_t>(cfg.texture_max - cfg.texture_min) + 1;
    for (auto& px : background) px = static_cast<std::uint8_t>(cfg.texture_min + rng.uniform_index(levels));
  }

  const double r2 = cfg.sprite_radius * cfg.sprite_radius;
  const auto reach = static_cast<long>(std::ceil(cfg.sprite_radius));
  const long h = static_cast<long>(cfg.height), w = static_cast<long>(cfg.width);
  for (std::size_t t = 0; t < cfg.frames; ++t) {
    auto frame = clip.frame(t);
    std::copy(background.begin(), background.end(), frame.begin());
    const long cx = std::lround(positions[t].x);
    const long cy = std::lround(positions[t].y);
    for (long y = std::max(0L, cy - reach); y <= std::min(h - 1, cy + reach); ++y) {
      for (long x = std::max(0L, cx - reach); x <= std::min(w - 1, cx + reach); ++x) {
        const double dx = static_cast<double>(x - cx), dy = static_cast<double>(y - cy);
        if (dx * dx + dy * dy <= r2) frame[static_cast<std::size_t>(y * w + x)] = cfg.sprite_level;
      }
    }
  }
  return clip;
}

}  // namespace motion::synth
