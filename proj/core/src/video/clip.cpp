#include "motion/video/clip.hpp"

#include <string>

#include "motion/error.hpp"

namespace motion::video {

Clip Clip::blank(std::string id, std::size_t frames, std::size_t h, std::size_t w, std::size_t c) {
  Clip clip;
  clip.id = std::move(id);
  clip.frame_count = frames;
  clip.height = h;
  clip.width = w;
  clip.channels = c;
  clip.pixels.assign(frames * h * w * c, 0);
  return clip;
}

void Clip::validate() const {
  if (frame_count == 0) throw EmptyClipError("clip '" + id + "' has no frames");
  if (height == 0 || width == 0) throw FormatError("clip '" + id + "' has an empty frame size");
  if (channels != 1 && channels != 3) {
    throw FormatError("clip '" + id + "' has " + std::to_string(channels) + " channels; expected 1 or 3");
  }
  if (pixels.size() != frame_count * frame_size()) {
    throw FormatError("clip '" + id + "' pixel buffer does not match its dimensions");
  }
}

bool Clip::same_frames(const Clip& other) const {
  return frame_count == other.frame_count && height == other.height && width == other.width &&
         channels == other.channels && pixels == other.pixels;
}

}  // namespace motion::video
