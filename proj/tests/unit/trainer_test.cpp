#include <gtest/gtest.h>

#include <sstream>

#include "motion/error.hpp"
#include "motion/model/inference.hpp"
#include "motion/synth/dataset.hpp"
#include "motion/trainer/trainer.hpp"

using namespace motion;
using namespace motion::trainer;

namespace {

synth::LabeledClip flat_clip(const std::string& id, std::uint8_t level, MotionType label) {
  video::Clip c = video::Clip::blank(id, 4, 16, 16, 1);
  std::fill(c.pixels.begin(), c.pixels.end(), level);
  return {c, label};
}

model::ModelConfig small_model() {
  model::ModelConfig cfg;
  cfg.segments = 2;
  cfg.input_size = 16;
  cfg.block_widths = {8, 16};
  cfg.feature_dim = 16;
  cfg.head_widths = {16};
  return cfg;
}

synth::Dataset separable() {
  synth::Dataset d;
  for (int i = 0; i < 8; ++i) {
    d.train.push_back(flat_clip("dark" + std::to_string(i), 10, MotionType::Linear));
    d.train.push_back(flat_clip("bright" + std::to_string(i), 240, MotionType::Local));
  }
  d.val = {d.train[0], d.train[1]};
  return d;
}

}  // namespace

TEST(LearningRate, StepSchedule) {
  const TrainConfig cfg;
  EXPECT_DOUBLE_EQ(lr_at_epoch(cfg, 0), 0.001);
  EXPECT_DOUBLE_EQ(lr_at_epoch(cfg, 20), 0.001);
  EXPECT_DOUBLE_EQ(lr_at_epoch(cfg, 21), 0.0005);
  EXPECT_DOUBLE_EQ(lr_at_epoch(cfg, 40), 0.0005);
  EXPECT_DOUBLE_EQ(lr_at_epoch(cfg, 41), 0.00025);
  EXPECT_DOUBLE_EQ(lr_at_epoch(cfg, 59), 0.00025);
}

TEST(Summarize, KnownAccuracies) {
  std::vector<MotionType> labels;
  for (auto t : kAllMotionTypes)
    for (int i = 0; i < 4; ++i) labels.push_back(t);
  const std::vector<MotionType> constant(labels.size(), MotionType::Local);
  const auto c = summarize(labels, constant);
  EXPECT_DOUBLE_EQ(c.accuracy, 0.2);
  EXPECT_EQ(c.count, 20u);
  EXPECT_DOUBLE_EQ(summarize(labels, labels).accuracy, 1.0);
}

TEST(Summarize, ConfusionMatchesRecount) {
  Rng rng(3);
  std::vector<MotionType> labels, preds;
  for (int i = 0; i < 200; ++i) {
    labels.push_back(static_cast<MotionType>(rng.uniform_index(5)));
    preds.push_back(static_cast<MotionType>(rng.uniform_index(5)));
  }
  const auto r = summarize(labels, preds);
  std::uint64_t diag = 0, total = 0;
  for (std::size_t t = 0; t < 5; ++t)
    for (std::size_t p = 0; p < 5; ++p) {
      std::uint64_t n = 0;
      for (std::size_t i = 0; i < labels.size(); ++i) n += code(labels[i]) == t && code(preds[i]) == p;
      EXPECT_EQ(r.confusion[t][p], n);
      total += n;
      if (t == p) diag += n;
    }
  EXPECT_DOUBLE_EQ(r.accuracy, static_cast<double>(diag) / total);
}

TEST(Train, SeparablePairIsLearnedQuickly) {
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.base_lr = 0.01;
  const auto res = train(small_model(), separable(), cfg);
  ASSERT_EQ(res.metrics.epochs.size(), 5u);
  EXPECT_DOUBLE_EQ(res.metrics.epochs.back().train_acc, 1.0);
  EXPECT_DOUBLE_EQ(res.metrics.best_val.accuracy, 1.0);
}

TEST(Train, LossFallsOnSyntheticClips) {
  synth::SynthConfig sc;
  sc.clips_per_class = 8;
  sc.frames = 8;
  const auto data = synth::generate_dataset(sc, {});
  TrainConfig cfg;
  cfg.epochs = 10;
  model::ModelConfig mc;
  const auto res = train(mc, data, cfg);
  EXPECT_LT(res.metrics.epochs.back().train_loss, res.metrics.epochs.front().train_loss);
}

TEST(Train, DeterministicAndCallbackPerEpoch) {
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.seed = 4;
  std::size_t calls = 0;
  const auto a = train(small_model(), separable(), cfg, [&](const EpochMetrics&) { ++calls; });
  const auto b = train(small_model(), separable(), cfg);
  EXPECT_EQ(calls, 2u);
  EXPECT_EQ(model::to_named_tensors(a.params), model::to_named_tensors(b.params));
}

TEST(Train, EmptySplitsRejected) {
  synth::Dataset d = separable();
  d.val.clear();
  EXPECT_THROW(train(small_model(), d, {}), DatasetError);
  d = separable();
  d.train.clear();
  EXPECT_THROW(train(small_model(), d, {}), DatasetError);
}

TEST(Metrics, CsvHeaderAndRows) {
  Metrics m;
  m.epochs.push_back({0, 0.001, 1.5, 0.25, 0.5});
  std::istringstream in(metrics_csv(m));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "epoch,lr,train_loss,train_acc,val_acc");
  std::getline(in, line);
  EXPECT_EQ(line.substr(0, 2), "0,");
}
