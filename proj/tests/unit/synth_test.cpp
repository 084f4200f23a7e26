#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <set>

#include "motion/error.hpp"
#include "motion/synth/dataset.hpp"
#include "motion/synth/label_map.hpp"
#include "motion/synth/render.hpp"
#include "motion/synth/trajectory.hpp"
#include "motion/util/csv.hpp"
#include "test_util.hpp"

using namespace motion;
using namespace motion::synth;
using test_support::TempDir;

namespace {

FrameBounds roomy() { return FrameBounds::for_sprite(64, 64, 1.0); }

SynthConfig small_config(std::size_t per_class, std::uint64_t seed = 0) {
  SynthConfig cfg;
  cfg.clips_per_class = per_class;
  cfg.frames = 6;
  cfg.master_seed = seed;
  return cfg;
}

}  // namespace

TEST(Trajectory, ProjectileHandExample) {
  TrajectoryParams p;
  p.p0 = {2, 28};
  p.v0 = {1, -3};
  p.gravity = {0, 0.5};
  Rng rng(0);
  const auto pts = gen_trajectory(MotionType::Projectile, p, 3, roomy(), rng);
  EXPECT_DOUBLE_EQ(pts[2].x, 4.0);
  EXPECT_DOUBLE_EQ(pts[2].y, 23.0);
}

TEST(Trajectory, SampledLinearIsCollinearAndProjectileHasConstantSecondDifference) {
  SynthConfig cfg;
  const auto bounds = cfg.bounds();
  for (std::uint64_t s = 0; s < 50; ++s) {
    Rng rng(s);
    auto lp = sample_trajectory_params(MotionType::Linear, cfg.ranges, bounds, 30, rng);
    const auto line = gen_trajectory(MotionType::Linear, lp, 30, bounds, rng);
    for (std::size_t t = 1; t + 1 < line.size(); ++t) {
      EXPECT_NEAR(line[t + 1].x - 2 * line[t].x + line[t - 1].x, 0.0, 1e-9);
      EXPECT_NEAR(line[t + 1].y - 2 * line[t].y + line[t - 1].y, 0.0, 1e-9);
    }

    auto pp = sample_trajectory_params(MotionType::Projectile, cfg.ranges, bounds, 30, rng);
    pp.floor_bounce = false;
    const auto arc = gen_trajectory(MotionType::Projectile, pp, 30, bounds, rng);
    for (std::size_t t = 1; t + 1 < arc.size(); ++t) {
      EXPECT_NEAR(arc[t + 1].y - 2 * arc[t].y + arc[t - 1].y, pp.gravity.y, 1e-9);
    }
  }
}

TEST(Trajectory, AllClassesStayInBounds) {
  SynthConfig cfg;
  const auto bounds = cfg.bounds();
  for (auto type : kAllMotionTypes)
    for (std::uint64_t s = 0; s < 30; ++s) {
      Rng rng(s * 31 + code(type));
      const auto p = sample_trajectory_params(type, cfg.ranges, bounds, 30, rng);
      for (const auto& pt : gen_trajectory(type, p, 30, bounds, rng)) EXPECT_TRUE(bounds.contains(pt));
    }
}

TEST(Render, TexturedBackgroundSharedAcrossFrames) {
  SynthConfig cfg;
  cfg.frames = 2;
  const std::vector<Point> pts = {{5, 5}, {20, 20}};
  Rng rng(3);
  const auto clip = render_clip(pts, cfg, rng);
  ASSERT_EQ(clip.frame_count, 2u);
  // Pixels far from both sprites agree across frames.
  std::size_t compared = 0;
  for (std::size_t y = 0; y < 32; ++y)
    for (std::size_t x = 0; x < 32; ++x) {
      const bool near = std::hypot(x - 5.0, y - 5.0) <= 3 || std::hypot(x - 20.0, y - 20.0) <= 3;
      if (near) continue;
      ++compared;
      EXPECT_EQ(clip.frame_view(0).at(y, x, 0), clip.frame_view(1).at(y, x, 0));
    }
  EXPECT_GT(compared, 900u);
  EXPECT_EQ(clip.frame_view(0).at(5, 5, 0), cfg.sprite_level);
  EXPECT_EQ(clip.frame_view(1).at(20, 20, 0), cfg.sprite_level);
}

TEST(Render, RadiusTooLarge) {
  SynthConfig cfg;
  cfg.frames = 1;
  cfg.sprite_radius = 16;
  const std::vector<Point> pts = {{16, 16}};
  Rng rng(0);
  EXPECT_THROW(render_clip(pts, cfg, rng), ConfigError);
}

TEST(Dataset, ClassBalanceAndDeterminism) {
  const auto cfg = small_config(10);
  const auto a = generate_dataset(cfg, {});
  std::array<int, kNumMotionTypes> hist{};
  std::size_t total = 0;
  for (auto s : {Split::Train, Split::Val, Split::Test})
    for (const auto& lc : a.split(s)) {
      ++hist[code(lc.label)];
      ++total;
    }
  EXPECT_EQ(total, 50u);
  for (int h : hist) EXPECT_EQ(h, 10);

  const auto b = generate_dataset(cfg, {}, 3);
  for (auto s : {Split::Train, Split::Val, Split::Test}) {
    ASSERT_EQ(a.split(s).size(), b.split(s).size());
    for (std::size_t i = 0; i < a.split(s).size(); ++i) {
      EXPECT_EQ(a.split(s)[i].clip.id, b.split(s)[i].clip.id);
      EXPECT_TRUE(a.split(s)[i].clip.same_frames(b.split(s)[i].clip));
    }
  }
}

TEST(Dataset, SplitSizes) {
  const auto cfg = small_config(100);
  const auto d = generate_dataset(cfg, {0.7, 0.1, 0.2});
  EXPECT_NEAR(static_cast<double>(d.train.size()), 350.0, 2.0);
  EXPECT_NEAR(static_cast<double>(d.val.size()), 50.0, 2.0);
  EXPECT_NEAR(static_cast<double>(d.test.size()), 100.0, 2.0);
  EXPECT_THROW((SplitFractions{0.5, 0.5, 0.5}.validate()), ConfigError);
}

TEST(Dataset, SplitDependsOnSeedButIsStable) {
  const auto a = assign_splits(small_config(30, 1), MotionType::Local, {});
  EXPECT_EQ(a, assign_splits(small_config(30, 1), MotionType::Local, {}));
  EXPECT_NE(a, assign_splits(small_config(30, 2), MotionType::Local, {}));
}

TEST(Dataset, WriteAndReload) {
  TempDir dir;
  const auto cfg = small_config(3);
  const auto d = gen_dataset(cfg, {}, dir.path());
  std::ifstream in(dir / "labels.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "path,label");

  const auto back = load_dataset(dir.path());
  for (auto s : {Split::Train, Split::Val, Split::Test}) {
    ASSERT_EQ(back.split(s).size(), d.split(s).size());
    for (std::size_t i = 0; i < d.split(s).size(); ++i) {
      EXPECT_EQ(back.split(s)[i].label, d.split(s)[i].label);
      EXPECT_TRUE(back.split(s)[i].clip.same_frames(d.split(s)[i].clip));
    }
  }
}

TEST(LabelMap, ParseAndErrors) {
  const auto m = parse_label_map("action,motion_type\nwalk,Linear\ndive,projectile\n");
  EXPECT_EQ(m.find("walk"), MotionType::Linear);
  EXPECT_EQ(m.find("dive"), MotionType::Projectile);
  EXPECT_FALSE(m.find("fly").has_value());
  EXPECT_THROW(parse_label_map("action,motion_type\nwalk,Sideways\n"), FormatError);
  EXPECT_THROW(parse_label_map("action,motion_type\nwalk,Linear\nwalk,Random\n"), FormatError);
}

TEST(LabelMap, ShippedTableCounts) {
  const auto m = load_label_map(std::filesystem::path(MOTION_DATA_DIR) / "mhmdb51.csv");
  EXPECT_EQ(m.size(), 51u);
  std::set<std::string> unique;
  for (const auto& [a, t] : m.entries) unique.insert(a);
  EXPECT_EQ(unique.size(), 51u);
  const auto h = m.histogram();
  EXPECT_EQ(h[code(MotionType::Linear)], 10u);
  EXPECT_EQ(h[code(MotionType::Projectile)], 12u);
  EXPECT_EQ(h[code(MotionType::Local)], 12u);
  EXPECT_EQ(h[code(MotionType::Oscillatory)], 5u);
  EXPECT_EQ(h[code(MotionType::Random)], 12u);
}
