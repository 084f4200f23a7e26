#include "motion/recommender/recommender.hpp"

#include <algorithm>

#include "motion/error.hpp"
#include "motion/model/inference.hpp"
#include "motion/numerics/rng.hpp"

namespace motion::recommender {

std::string_view to_string(PlaybackStyle s) noexcept {
  switch (s) {
    case PlaybackStyle::Reverse: return "reverse";
    case PlaybackStyle::Loop: return "loop";
    case PlaybackStyle::Boomerang: return "boomerang";
  }
  return "?";
}

std::optional<PlaybackStyle> parse_style(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  for (auto s : kAllStyles) {
    if (to_string(s) == lower) return s;
  }
  return std::nullopt;
}

PlaybackStyle recommend(MotionType motion, std::uint64_t seed) {
  switch (motion) {
    case MotionType::Linear: return PlaybackStyle::Reverse;
    case MotionType::Projectile: return PlaybackStyle::Boomerang;
    case MotionType::Oscillatory:
    case MotionType::Local: return PlaybackStyle::Loop;
    case MotionType::Random: break;
  }
  Rng rng(seed);
  return kAllStyles[rng.uniform_index(3)];
}

video::Clip apply_style(const video::Clip& clip, PlaybackStyle style, std::size_t loop_count) {
  clip.validate();
  std::vector<std::size_t> order;
  const std::size_t n = clip.frame_count;
  switch (style) {
    case PlaybackStyle::Reverse:
      for (std::size_t i = n; i-- > 0;) order.push_back(i);
      break;
    case PlaybackStyle::Loop:
      if (loop_count < 2) throw ConfigError("loop_count must be at least 2, got " + std::to_string(loop_count));
      for (std::size_t r = 0; r < loop_count; ++r)
        for (std::size_t i = 0; i < n; ++i) order.push_back(i);
      break;
    case PlaybackStyle::Boomerang:
      for (std::size_t i = 0; i < n; ++i) order.push_back(i);
      for (std::size_t i = n - 1; i-- > 0;) order.push_back(i);
      break;
  }
  video::Clip out = video::Clip::blank(clip.id, order.size(), clip.height, clip.width, clip.channels);
  out.fps = clip.fps;
  for (std::size_t t = 0; t < order.size(); ++t) {
    const auto src = clip.frame(order[t]);
    std::copy(src.begin(), src.end(), out.frame(t).begin());
  }
  return out;
}

Recommendation recommend_for_clip(const video::Clip& clip, const model::ModelParams& params,
                                  const model::ModelConfig& cfg, std::uint64_t seed, std::size_t loop_count) {
  Recommendation r;
  r.motion = model::predict(clip, params, cfg).motion;
  r.style = recommend(r.motion, seed);
  r.styled = apply_style(clip, r.style, loop_count);
  return r;
}

}  // namespace motion::recommender
