#include <gtest/gtest.h>

#include <map>

#include "motion/error.hpp"
#include "motion/recommender/recommender.hpp"

using namespace motion;
using namespace motion::recommender;

namespace {

// One pixel per frame holding the frame index.
video::Clip indexed(std::size_t frames) {
  video::Clip c = video::Clip::blank("c", frames, 1, 1, 1);
  for (std::size_t t = 0; t < frames; ++t) c.pixels[t] = static_cast<std::uint8_t>(t);
  return c;
}

std::vector<int> order(const video::Clip& c) { return {c.pixels.begin(), c.pixels.end()}; }

}  // namespace

TEST(Recommend, FixedMapping) {
  for (std::uint64_t seed : {0u, 1u, 99u}) {
    EXPECT_EQ(recommend(MotionType::Linear, seed), PlaybackStyle::Reverse);
    EXPECT_EQ(recommend(MotionType::Projectile, seed), PlaybackStyle::Boomerang);
    EXPECT_EQ(recommend(MotionType::Local, seed), PlaybackStyle::Loop);
    EXPECT_EQ(recommend(MotionType::Oscillatory, seed), PlaybackStyle::Loop);
  }
}

TEST(Recommend, RandomIsSeededAndRoughlyUniform) {
  EXPECT_EQ(recommend(MotionType::Random, 17), recommend(MotionType::Random, 17));
  std::map<PlaybackStyle, int> hist;
  for (std::uint64_t s = 0; s < 3000; ++s) ++hist[recommend(MotionType::Random, s)];
  for (auto style : kAllStyles) {
    const double f = hist[style] / 3000.0;
    EXPECT_GE(f, 0.28) << to_string(style);
    EXPECT_LE(f, 0.39) << to_string(style);
  }
}

TEST(ApplyStyle, HandExamples) {
  EXPECT_EQ(order(apply_style(indexed(3), PlaybackStyle::Reverse)), (std::vector<int>{2, 1, 0}));
  EXPECT_EQ(order(apply_style(indexed(2), PlaybackStyle::Loop, 2)), (std::vector<int>{0, 1, 0, 1}));
  EXPECT_EQ(order(apply_style(indexed(3), PlaybackStyle::Boomerang)), (std::vector<int>{0, 1, 2, 1, 0}));
  EXPECT_THROW(apply_style(indexed(3), PlaybackStyle::Loop, 1), ConfigError);
}

TEST(ApplyStyle, LengthsAndReverseInvolution) {
  for (std::size_t l = 1; l < 12; ++l) {
    const auto c = indexed(l);
    EXPECT_EQ(apply_style(c, PlaybackStyle::Reverse).frame_count, l);
    EXPECT_EQ(apply_style(c, PlaybackStyle::Loop).frame_count, 2 * l);
    EXPECT_EQ(apply_style(c, PlaybackStyle::Loop, 3).frame_count, 3 * l);
    EXPECT_EQ(apply_style(c, PlaybackStyle::Boomerang).frame_count, 2 * l - 1);
    const auto twice = apply_style(apply_style(c, PlaybackStyle::Reverse), PlaybackStyle::Reverse);
    EXPECT_EQ(twice.pixels, c.pixels);
  }
}

TEST(PlaybackStyle, NamesRoundTrip) {
  for (auto s : kAllStyles) EXPECT_EQ(parse_style(to_string(s)), s);
  EXPECT_EQ(parse_style("BOOMERANG"), PlaybackStyle::Boomerang);
  EXPECT_FALSE(parse_style("shuffle").has_value());
}
