#pragma once

#include "motion/video/clip.hpp"

namespace motion::video {

/// Bilinear resampling with the half-pixel (align-corners = false) convention:
/// source coordinate = (i + 0.5) * H / H' - 0.5, clamped to the image.
template <typename P>
ImageF resize_bilinear(const ImageView<P>& src, std::size_t out_height, std::size_t out_width);

/// Luma = 0.299 R + 0.587 G + 0.114 B for 3-channel input; copy for 1 channel.
ImageF to_grayscale(const ImageView<std::uint8_t>& src);

}  // namespace motion::video
