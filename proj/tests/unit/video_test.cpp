#include <gtest/gtest.h>

#include <filesystem>

#include "motion/error.hpp"
#include "motion/numerics/rng.hpp"
#include "motion/video/clip_io.hpp"
#include "motion/video/image_ops.hpp"
#include "motion/video/preprocess.hpp"
#include "motion/video/segments.hpp"
#include "test_util.hpp"

using namespace motion;
using namespace motion::video;
using test_support::TempDir;

namespace {

Clip random_clip(std::size_t t, std::size_t h, std::size_t w, std::size_t c, std::uint64_t seed) {
  Clip clip = Clip::blank("rand", t, h, w, c);
  Rng rng(seed);
  for (auto& p : clip.pixels) p = static_cast<std::uint8_t>(rng.uniform_index(256));
  return clip;
}

}  // namespace

TEST(ClipIo, RoundTripIsBitwise) {
  TempDir dir;
  for (std::size_t c : {1u, 3u}) {
    const Clip clip = random_clip(5, 9, 7, c, c);
    save_clip(clip, dir / "c.mtc1");
    const Clip back = load_clip(dir / "c.mtc1");
    EXPECT_TRUE(back.same_frames(clip));
    EXPECT_EQ(back.id, "c");
  }
}

TEST(ClipIo, SingleFrameFileSize) {
  TempDir dir;
  const Clip clip = random_clip(1, 6, 5, 3, 1);
  save_clip(clip, dir / "one.mtc1");
  // "MTC1" + four u32 fields, then the pixels.
  EXPECT_EQ(std::filesystem::file_size(dir / "one.mtc1"), kClipHeaderBytes + 6u * 5u * 3u);
  EXPECT_EQ(kClipHeaderBytes, 4u + 4u * 4u);
}

TEST(ClipIo, HeaderFields) {
  const auto bytes = encode_clip(random_clip(2, 3, 4, 1, 2));
  ASSERT_GE(bytes.size(), kClipHeaderBytes);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "MTC1");
  auto u32 = [&](std::size_t off) {
    return bytes[off] | (bytes[off + 1] << 8) | (bytes[off + 2] << 16) | (bytes[off + 3] << 24);
  };
  EXPECT_EQ(u32(4), 2);
  EXPECT_EQ(u32(8), 3);
  EXPECT_EQ(u32(12), 4);
  EXPECT_EQ(u32(16), 1);
}

TEST(ClipIo, Errors) {
  TempDir dir;
  EXPECT_THROW(load_clip(dir / "missing.mtc1"), IoError);

  auto bytes = encode_clip(random_clip(2, 3, 4, 1, 2));
  bytes.pop_back();
  EXPECT_THROW(decode_clip(bytes), FormatError);
  bytes = encode_clip(random_clip(2, 3, 4, 1, 2));
  bytes[0] = 'Z';
  EXPECT_THROW(decode_clip(bytes), FormatError);

  std::filesystem::create_directories(dir / "empty");
  EXPECT_THROW(load_clip(dir / "empty"), EmptyClipError);
}

TEST(ClipIo, FailedSaveLeavesNoFile) {
  TempDir dir;
  const auto target = dir / "no_such_dir" / "x.mtc1";
  EXPECT_THROW(save_clip(random_clip(1, 2, 2, 1, 0), target), IoError);
  EXPECT_FALSE(std::filesystem::exists(target));
  EXPECT_FALSE(std::filesystem::exists(dir / "no_such_dir"));
}

TEST(ClipIo, FrameDirectoriesPgmAndPng) {
  TempDir dir;
  const Clip clip = random_clip(3, 5, 6, 1, 3);
  std::filesystem::create_directories(dir / "pgm");
  for (std::size_t t = 0; t < 3; ++t) {
    ImageU8 img(5, 6, 1);
    std::copy(clip.frame(t).begin(), clip.frame(t).end(), img.pixels.begin());
    write_pgm(img, dir / "pgm" / ("f" + std::to_string(t) + ".pgm"));
  }
  EXPECT_TRUE(load_clip(dir / "pgm").same_frames(clip));

  save_png_sequence(clip, dir / "png");
  EXPECT_TRUE(load_clip(dir / "png").same_frames(clip));

  const Clip rgb = random_clip(2, 4, 4, 3, 4);
  save_png_sequence(rgb, dir / "rgb");
  EXPECT_TRUE(load_clip(dir / "rgb").same_frames(rgb));
}

TEST(ResizeBilinear, HalfPixelUpsampleKeepsCorners) {
  ImageU8 src(2, 2, 1);
  src.pixels = {0, 2, 4, 6};
  const ImageF out = resize_bilinear(src.view(), 4, 4);
  EXPECT_FLOAT_EQ(out.at(0, 0), 0.0f);
  EXPECT_FLOAT_EQ(out.at(0, 3), 2.0f);
  EXPECT_FLOAT_EQ(out.at(3, 0), 4.0f);
  EXPECT_FLOAT_EQ(out.at(3, 3), 6.0f);
  // Source coordinate (0.25, 0.25): 0.75*0.75*0 + 0.75*0.25*2 + 0.25*0.75*4 + 0.25*0.25*6.
  EXPECT_FLOAT_EQ(out.at(1, 1), 1.5f);
}

TEST(ResizeBilinear, IdentitySize) {
  const Clip c = random_clip(1, 5, 7, 1, 9);
  const ImageF out = resize_bilinear(c.frame_view(0), 5, 7);
  for (std::size_t i = 0; i < out.pixels.size(); ++i) EXPECT_FLOAT_EQ(out.pixels[i], c.pixels[i]);
}

TEST(Segments, CentralFrames) {
  EXPECT_EQ(sample_segments(30, 3), (std::vector<std::size_t>{5, 15, 25}));
  EXPECT_EQ(sample_segments(7, 3), (std::vector<std::size_t>{1, 3, 5}));
  EXPECT_EQ(sample_segments(30, 1), (std::vector<std::size_t>{15}));
  EXPECT_THROW(sample_segments(2, 3), InsufficientFramesError);
  for (std::size_t l = 1; l < 40; ++l)
    for (std::size_t t = 1; t <= l; ++t) {
      const auto idx = sample_segments(l, t);
      ASSERT_EQ(idx.size(), t);
      for (std::size_t i = 0; i < t; ++i) {
        EXPECT_LT(idx[i], l);
        if (i) {
          EXPECT_LT(idx[i - 1], idx[i]);
        }
      }
    }
}

TEST(Preprocess, OutputRangeAndShape) {
  Rng rng(5);
  const auto cfg = PreprocessConfig::train(32);
  for (int i = 0; i < 100; ++i) {
    const std::size_t h = 8 + rng.uniform_index(40), w = 8 + rng.uniform_index(40);
    const std::size_t c = rng.bernoulli(0.5) ? 1 : 3;
    const Clip clip = random_clip(4, h, w, c, static_cast<std::uint64_t>(i));
    const std::vector<std::size_t> idx = {0, 2, 3};
    const auto x = preprocess_clip(clip, idx, cfg, rng);
    ASSERT_EQ(x.shape(), (nn::Shape{3, c, 32, 32}));
    for (float v : x.data()) {
      EXPECT_GE(v, 0.0f);
      EXPECT_LE(v, 1.0f);
    }
  }
}

TEST(Preprocess, CropAndFlipSharedAcrossFrames) {
  // Identical frames must stay identical after augmentation.
  Clip clip = random_clip(1, 40, 48, 1, 2);
  Clip three = Clip::blank("x", 3, 40, 48, 1);
  for (std::size_t t = 0; t < 3; ++t) std::copy(clip.pixels.begin(), clip.pixels.end(), three.frame(t).begin());
  Rng rng(8);
  auto cfg = PreprocessConfig::train(32);
  for (int i = 0; i < 20; ++i) {
    const std::vector<std::size_t> idx = {0, 1, 2};
    const auto x = preprocess_clip(three, idx, cfg, rng);
    const std::size_t plane = 32 * 32;
    for (std::size_t j = 0; j < plane; ++j) {
      ASSERT_EQ(x[j], x[plane + j]);
      ASSERT_EQ(x[j], x[2 * plane + j]);
    }
  }
}

TEST(Preprocess, EvalIsCentreCropAndDeterministic) {
  const Clip clip = random_clip(2, 32, 40, 1, 3);
  Rng a(1), b(2);
  const std::vector<std::size_t> idx = {0, 1};
  const auto cfg = PreprocessConfig::eval(32);
  const auto xa = preprocess_clip(clip, idx, cfg, a);
  EXPECT_EQ(xa, preprocess_clip(clip, idx, cfg, b));
  // Height already equals S, so the centre crop is columns [4, 36) unscaled.
  EXPECT_FLOAT_EQ(xa[0], clip.frame_view(0).at(0, 4, 0) / 255.0f);
  EXPECT_FLOAT_EQ(xa[31], clip.frame_view(0).at(0, 35, 0) / 255.0f);
}

TEST(Preprocess, TinyFramesRejected) {
  Rng rng(0);
  const std::vector<std::size_t> idx = {0};
  EXPECT_THROW(preprocess_clip(random_clip(1, 7, 20, 1, 0), idx, PreprocessConfig::eval(32), rng), FormatError);
}

TEST(Preprocess, ScaledCropSides) {
  EXPECT_EQ(PreprocessConfig::scaled_crop_sides(256), (std::vector<std::size_t>{256, 224, 192, 169}));
  EXPECT_EQ(PreprocessConfig::scaled_crop_sides(32), (std::vector<std::size_t>{32, 28, 24, 21}));
}
