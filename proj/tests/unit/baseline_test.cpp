#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "motion/baseline/baseline.hpp"
#include "motion/error.hpp"
#include "motion/numerics/checkpoint.hpp"
#include "motion/numerics/rng.hpp"
#include "test_util.hpp"

using namespace motion;
using namespace motion::baseline;

namespace {

// Smooth periodic texture, shifted right by `dx` with wraparound.
Plane wave(std::size_t n, int dx) {
  Plane p(n, n);
  const double k = 2.0 * std::numbers::pi / static_cast<double>(n);
  for (std::size_t y = 0; y < n; ++y)
    for (std::size_t x = 0; x < n; ++x) {
      const double xs = static_cast<double>(x) - dx;
      p.at(y, x) = 0.5 + 0.2 * std::sin(k * xs) + 0.2 * std::cos(k * (xs + 2.0 * y));
    }
  return p;
}

double mean(const Plane& p) {
  double s = 0;
  for (double v : p.values) s += v;
  return s / static_cast<double>(p.values.size());
}

std::vector<LabeledFeatures> toy_features() {
  std::vector<LabeledFeatures> out;
  Rng rng(1);
  for (int i = 0; i < 50; ++i)
    for (auto t : kAllMotionTypes) {
      std::vector<double> f(16);
      for (std::size_t j = 0; j < 16; ++j) f[j] = rng.uniform(0, 0.1) + (j == code(t) ? 1.0 : 0.0);
      out.push_back({f, t});
    }
  return out;
}

}  // namespace

TEST(Flow, IdenticalFramesGiveZeroFlow) {
  const Plane a = wave(16, 0);
  const auto f = estimate_flow(a, a);
  for (double v : f.u.values) EXPECT_NEAR(v, 0.0, 1e-12);
  for (double v : f.v.values) EXPECT_NEAR(v, 0.0, 1e-12);
  EXPECT_THROW(estimate_flow(a, Plane(16, 15)), ShapeError);
}

TEST(Flow, RecoversUnitHorizontalShift) {
  const auto f = estimate_flow(wave(32, 0), wave(32, 1));
  EXPECT_NEAR(mean(f.u), 1.0, 0.3);
  EXPECT_NEAR(mean(f.v), 0.0, 0.3);
}

TEST(Flow, FirstIterationMatchesUpdateRule) {
  Rng rng(2);
  Plane a(6, 6), b(6, 6);
  for (double& v : a.values) v = rng.uniform();
  for (double& v : b.values) v = rng.uniform();
  FlowConfig cfg;
  cfg.iterations = 1;
  const auto f = estimate_flow(a, b, cfg);

  // Starting from zero flow, one update reduces to -E_x E_t / (alpha^2 + E_x^2 + E_y^2).
  const std::size_t i = 2, j = 3;
  auto A = [&](std::size_t y, std::size_t x) { return 255.0 * a.at(y, x); };
  auto B = [&](std::size_t y, std::size_t x) { return 255.0 * b.at(y, x); };
  const double ex = (A(i, j + 1) - A(i, j) + A(i + 1, j + 1) - A(i + 1, j) + B(i, j + 1) - B(i, j) +
                     B(i + 1, j + 1) - B(i + 1, j)) / 4;
  const double ey = (A(i + 1, j) - A(i, j) + A(i + 1, j + 1) - A(i, j + 1) + B(i + 1, j) - B(i, j) +
                     B(i + 1, j + 1) - B(i, j + 1)) / 4;
  const double et = (B(i, j) + B(i + 1, j) + B(i, j + 1) + B(i + 1, j + 1) - A(i, j) - A(i + 1, j) -
                     A(i, j + 1) - A(i + 1, j + 1)) / 4;
  const double d = cfg.alpha * cfg.alpha + ex * ex + ey * ey;
  EXPECT_NEAR(f.u.at(i, j), -ex * et / d, 1e-12);
  EXPECT_NEAR(f.v.at(i, j), -ey * et / d, 1e-12);
}

TEST(MotionBoundaries, LinearFieldHasUnitMagnitude) {
  FlowField f{Plane(5, 7), Plane(5, 7)};
  for (std::size_t y = 0; y < 5; ++y)
    for (std::size_t x = 0; x < 7; ++x) f.u.at(y, x) = static_cast<double>(x);
  for (double v : motion_boundaries(f).values) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(CellStd, OnlyTexturedCellIsNonZero) {
  Plane m(8, 8, 3.0);
  m.at(0, 0) = 0;
  m.at(0, 1) = 2;
  m.at(1, 0) = 2;
  m.at(1, 1) = 0;
  const auto s = cell_std(m, 4);
  ASSERT_EQ(s.size(), 16u);
  EXPECT_DOUBLE_EQ(s[0], 1.0);
  for (std::size_t i = 1; i < 16; ++i) EXPECT_DOUBLE_EQ(s[i], 0.0);
  EXPECT_THROW(cell_std(Plane(3, 8), 4), ShapeError);
}

TEST(BaselineFeatures, StaticClipIsZeroAndShortClipRejected) {
  video::Clip c = video::Clip::blank("s", 3, 16, 16, 1);
  for (std::size_t i = 0; i < 256; ++i) c.pixels[i] = c.pixels[256 + i] = c.pixels[512 + i] = static_cast<std::uint8_t>(i);
  const auto f = baseline_features(c);
  ASSERT_EQ(f.size(), 16u);
  for (double v : f) EXPECT_NEAR(v, 0.0, 1e-9);
  EXPECT_THROW(baseline_features(video::Clip::blank("one", 1, 16, 16, 1)), InsufficientFramesError);
}

TEST(BaselineModel, LearnsToyFeaturesDeterministically) {
  BaselineConfig cfg;
  cfg.epochs = 10;
  cfg.learning_rate = 0.01;
  const auto data = toy_features();
  const auto m = train_baseline(std::span<const LabeledFeatures>(data), cfg);
  std::size_t correct = 0;
  for (const auto& lf : data) {
    const auto p = predict_features(lf.features, m);
    double sum = 0;
    for (float v : p.probs.data()) sum += v;
    EXPECT_NEAR(sum, 1.0, 1e-5);
    correct += p.motion == lf.label;
  }
  EXPECT_GT(correct, data.size() * 9 / 10);

  const auto again = train_baseline(std::span<const LabeledFeatures>(data), cfg);
  EXPECT_EQ(again.fc0_weight.value, m.fc0_weight.value);
  EXPECT_EQ(again.fc1_bias.value, m.fc1_bias.value);
}

TEST(BaselineModel, CheckpointNamesArePrefixed) {
  BaselineConfig cfg;
  cfg.epochs = 1;
  const auto data = toy_features();
  const auto m = train_baseline(std::span<const LabeledFeatures>(data), cfg);
  test_support::TempDir dir;
  save_baseline(dir / "b.mtck", m);
  for (const auto& t : nn::load_checkpoint(dir / "b.mtck")) EXPECT_EQ(t.name.rfind("baseline.", 0), 0u) << t.name;
  const auto back = load_baseline(dir / "b.mtck");
  EXPECT_EQ(back.fc0_weight.value, m.fc0_weight.value);
  EXPECT_EQ(back.feature_scale, m.feature_scale);
  EXPECT_EQ(predict_features(data[0].features, back).probs, predict_features(data[0].features, m).probs);
}
