#pragma once

#include <cstddef>
#include <vector>

#include "motion/video/clip.hpp"

namespace motion::video {

/// Splits [0, total_frames) into `segments` chunks [floor(kL/T), floor((k+1)L/T))
/// and returns the central index start + floor(len / 2) of each.
/// Throws InsufficientFramesError when total_frames < segments.
std::vector<std::size_t> sample_segments(std::size_t total_frames, std::size_t segments);

inline std::vector<std::size_t> sample_segments(const Clip& clip, std::size_t segments) {
  return sample_segments(clip.frame_count, segments);
}

}  // namespace motion::video
