#include "motion/video/segments.hpp"

#include <string>

#include "motion/error.hpp"

namespace motion::video {

std::vector<std::size_t> sample_segments(std::size_t total_frames, std::size_t segments) {
  if (segments == 0) throw ConfigError("sample_segments: segment count must be positive");
  if (total_frames < segments) {
    throw InsufficientFramesError("clip has " + std::to_string(total_frames) + " frames, need at least " +
                                  std::to_string(segments));
  }
  std::vector<std::size_t> indices;
  indices.reserve(segments);
  for (std::size_t k = 0; k < segments; ++k) {
    const std::size_t begin = k * total_frames / segments;
    const std::size_t end = (k + 1) * total_frames / segments;
    indices.push_back(begin + (end - begin) / 2);
  }
  return indices;
}

}  // namespace motion::video
