#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "motion/model/config.hpp"
#include "motion/model/network.hpp"
#include "motion/synth/motion_type.hpp"
#include "motion/video/clip.hpp"

namespace motion::recommender {

enum class PlaybackStyle : std::uint8_t { Reverse, Loop, Boomerang };

inline constexpr PlaybackStyle kAllStyles[] = {PlaybackStyle::Reverse, PlaybackStyle::Loop, PlaybackStyle::Boomerang};

std::string_view to_string(PlaybackStyle s) noexcept;
std::optional<PlaybackStyle> parse_style(std::string_view name);

/// Linear -> Reverse, Projectile -> Boomerang, Local and Oscillatory -> Loop.
/// Random draws uniformly among the three styles from `seed`.
PlaybackStyle recommend(MotionType motion, std::uint64_t seed);

inline constexpr std::size_t kDefaultLoopCount = 2;

/// Reverse: frames backwards. Loop: the frames `loop_count` times (>= 2).
/// Boomerang: forward then backward without repeating the last frame (2L - 1).
video::Clip apply_style(const video::Clip& clip, PlaybackStyle style, std::size_t loop_count = kDefaultLoopCount);

struct Recommendation {
  MotionType motion = MotionType::Linear;
  PlaybackStyle style = PlaybackStyle::Reverse;
  video::Clip styled;
};

/// predict -> recommend -> apply_style.
Recommendation recommend_for_clip(const video::Clip& clip, const model::ModelParams& params,
                                  const model::ModelConfig& cfg, std::uint64_t seed,
                                  std::size_t loop_count = kDefaultLoopCount);

}  // namespace motion::recommender
