#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace motion::video {

/// Read-only view of one interleaved H x W x C image.
template <typename P>
struct ImageView {
  std::span<const P> pixels;
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 1;

  P at(std::size_t y, std::size_t x, std::size_t c) const { return pixels[(y * width + x) * channels + c]; }
};

/// Owning interleaved H x W x C image.
template <typename P>
struct Image {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 1;
  std::vector<P> pixels;

  Image() = default;
  Image(std::size_t h, std::size_t w, std::size_t c, P fill = P{})
      : height(h), width(w), channels(c), pixels(h * w * c, fill) {}

  P& at(std::size_t y, std::size_t x, std::size_t c = 0) { return pixels[(y * width + x) * channels + c]; }
  P at(std::size_t y, std::size_t x, std::size_t c = 0) const { return pixels[(y * width + x) * channels + c]; }

  ImageView<P> view() const { return {pixels, height, width, channels}; }

  bool operator==(const Image&) const = default;
};

using ImageU8 = Image<std::uint8_t>;
using ImageF = Image<float>;

/// A raw clip: frame-major stack of row-major, channel-interleaved u8 frames.
struct Clip {
  std::string id;
  std::size_t frame_count = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 1;
  std::optional<double> fps;
  std::vector<std::uint8_t> pixels;

  std::size_t frame_size() const noexcept { return height * width * channels; }

  std::span<const std::uint8_t> frame(std::size_t t) const {
    return std::span(pixels).subspan(t * frame_size(), frame_size());
  }
  std::span<std::uint8_t> frame(std::size_t t) {
    return std::span(pixels).subspan(t * frame_size(), frame_size());
  }
  ImageView<std::uint8_t> frame_view(std::size_t t) const { return {frame(t), height, width, channels}; }

  /// Empty clip with zeroed pixels.
  static Clip blank(std::string id, std::size_t frames, std::size_t h, std::size_t w, std::size_t c);

  /// Throws EmptyClipError / FormatError when the structural invariants fail.
  void validate() const;

  /// Pixel-wise equality; id and fps are metadata and not compared.
  bool same_frames(const Clip& other) const;
};

}  // namespace motion::video
