#include "motion/video/image_ops.hpp"

#include <algorithm>
#include <cmath>

#include "motion/error.hpp"

namespace motion::video {
namespace {

struct Tap {
  std::size_t i0;
  std::size_t i1;
  double w1;
};

std::vector<Tap> taps(std::size_t in_extent, std::size_t out_extent) {
  std::vector<Tap> t(out_extent);
  const double scale = static_cast<double>(in_extent) / static_cast<double>(out_extent);
  const double max_coord = static_cast<double>(in_extent - 1);
  for (std::size_t i = 0; i < out_extent; ++i) {
    double src = (static_cast<double>(i) + 0.5) * scale - 0.5;
    src = std::clamp(src, 0.0, max_coord);
    const auto i0 = static_cast<std::size_t>(std::floor(src));
    t[i] = {i0, std::min(i0 + 1, in_extent - 1), src - static_cast<double>(i0)};
  }
  return t;
}

}  // namespace

template <typename P>
ImageF resize_bilinear(const ImageView<P>& src, std::size_t out_height, std::size_t out_width) {
  if (out_height == 0 || out_width == 0) throw ConfigError("resize_bilinear: output size must be positive");
  if (src.height == 0 || src.width == 0) throw ShapeError("resize_bilinear: empty source image");
  const auto ty = taps(src.height, out_height);
  const auto tx = taps(src.width, out_width);
  ImageF out(out_height, out_width, src.channels);
  for (std::size_t y = 0; y < out_height; ++y) {
    const Tap& a = ty[y];
    for (std::size_t x = 0; x < out_width; ++x) {
      const Tap& b = tx[x];
      for (std::size_t c = 0; c < src.channels; ++c) {
        const double top = (1.0 - b.w1) * src.at(a.i0, b.i0, c) + b.w1 * src.at(a.i0, b.i1, c);
        const double bottom = (1.0 - b.w1) * src.at(a.i1, b.i0, c) + b.w1 * src.at(a.i1, b.i1, c);
        out.at(y, x, c) = static_cast<float>((1.0 - a.w1) * top + a.w1 * bottom);
      }
    }
  }
  return out;
}

template ImageF resize_bilinear(const ImageView<std::uint8_t>&, std::size_t, std::size_t);
template ImageF resize_bilinear(const ImageView<float>&, std::size_t, std::size_t);

ImageF to_grayscale(const ImageView<std::uint8_t>& src) {
  ImageF out(src.height, src.width, 1);
  for (std::size_t y = 0; y < src.height; ++y) {
    for (std::size_t x = 0; x < src.width; ++x) {
      if (src.channels == 3) {
        out.at(y, x) = static_cast<float>(0.299 * src.at(y, x, 0) + 0.587 * src.at(y, x, 1) +
                                          0.114 * src.at(y, x, 2));
      } else {
        out.at(y, x) = src.at(y, x, 0);
      }
    }
  }
  return out;
}

}  // namespace motion::video
