#include <gtest/gtest.h>

#include <algorithm>

#include "motion/error.hpp"
#include "motion/model/inference.hpp"
#include "motion/numerics/rng.hpp"
#include "motion/retrieval/retrieval.hpp"
#include "motion/synth/dataset.hpp"
#include "test_util.hpp"

using namespace motion;
using namespace motion::retrieval;

namespace {

FeatureStore four_points() {
  FeatureStore s(2);
  s.add({"A", {0, 0}, MotionType::Linear});
  s.add({"B", {1, 0}, MotionType::Local});
  s.add({"C", {0, 2}, MotionType::Linear});
  s.add({"D", {3, 3}, std::nullopt});
  return s;
}

std::vector<std::string> ids(const std::vector<Neighbor>& n) {
  std::vector<std::string> out;
  for (const auto& x : n) out.push_back(x.id);
  return out;
}

}  // namespace

TEST(Knn, HandExample) {
  const std::vector<float> q = {0.0f, 0.1f};
  const auto n = knn(four_points(), q, 3);
  EXPECT_EQ(ids(n), (std::vector<std::string>{"A", "B", "C"}));
  EXPECT_NEAR(n[0].distance, 0.1, 1e-6);
  EXPECT_NEAR(n[1].distance, std::sqrt(1.01), 1e-6);
  EXPECT_NEAR(n[2].distance, 1.9, 1e-6);
}

TEST(Knn, LargeKReturnsEverythingSortedAndExcludes) {
  const std::vector<float> q = {0.0f, 0.1f};
  const auto all = knn(four_points(), q, 10);
  EXPECT_EQ(ids(all), (std::vector<std::string>{"A", "B", "C", "D"}));
  const auto loo = knn(four_points(), q, 10, Metric::L2, "A");
  EXPECT_EQ(ids(loo), (std::vector<std::string>{"B", "C", "D"}));
  for (std::size_t i = 1; i < loo.size(); ++i) EXPECT_LE(loo[i - 1].distance, loo[i].distance);
}

TEST(Knn, TiesBrokenByIdRegardlessOfInsertionOrder) {
  FeatureStore a(1), b(1);
  for (const char* id : {"z", "m", "a"}) a.add({id, {1.0f}, std::nullopt});
  for (const char* id : {"a", "z", "m"}) b.add({id, {1.0f}, std::nullopt});
  const std::vector<float> q = {0.0f};
  EXPECT_EQ(ids(knn(a, q, 3)), (std::vector<std::string>{"a", "m", "z"}));
  EXPECT_EQ(ids(knn(a, q, 3)), ids(knn(b, q, 3)));
}

TEST(Knn, CosineIgnoresQueryScale) {
  const std::vector<float> q = {1.0f, 2.0f}, q5 = {5.0f, 10.0f};
  const auto a = knn(four_points(), q, 4, Metric::Cosine);
  const auto b = knn(four_points(), q5, 4, Metric::Cosine);
  EXPECT_EQ(ids(a), ids(b));
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i].distance, b[i].distance, 1e-9);
}

TEST(Knn, Errors) {
  const std::vector<float> wrong = {1, 2, 3};
  EXPECT_THROW(knn(four_points(), wrong, 1), ShapeError);
  FeatureStore one(2);
  one.add({"only", {0, 0}, std::nullopt});
  const std::vector<float> q = {0, 0};
  EXPECT_THROW(knn(one, q, 1, Metric::L2, "only"), EmptyStoreError);
  EXPECT_THROW(knn(FeatureStore(2), q, 1), EmptyStoreError);
}

TEST(FeatureStore, RejectsBadRecords) {
  FeatureStore s(2);
  s.add({"a", {1, 2}, std::nullopt});
  EXPECT_THROW(s.add({"a", {3, 4}, std::nullopt}), ConfigError);
  EXPECT_THROW(s.add({"b", {1}, std::nullopt}), ShapeError);
  ASSERT_NE(s.find("a"), nullptr);
  EXPECT_EQ(s.find("zz"), nullptr);
}

TEST(FeatureStore, FileRoundTrip) {
  test_support::TempDir dir;
  const auto s = four_points();
  save_store(dir / "f.mtfs", s);
  EXPECT_EQ(load_store(dir / "f.mtfs"), s);
  auto bytes = encode_store(s);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "MTFS");
  bytes.pop_back();
  EXPECT_THROW(decode_store(bytes), FormatError);
}

TEST(RetrievalAccuracy, RandomVectorsNearChance) {
  Rng rng(11);
  FeatureStore s(16);
  for (std::size_t i = 0; i < 500; ++i) {
    std::vector<float> v(16);
    for (float& x : v) x = static_cast<float>(rng.uniform(-1.0, 1.0));
    s.add({"r" + std::to_string(i), v, static_cast<MotionType>(i % 5)});
  }
  EXPECT_NEAR(retrieval_accuracy(s, 3), 0.2, 0.05);
}

TEST(RetrievalAccuracy, SeparatedClassesAndDuplicates) {
  FeatureStore s(2);
  for (auto t : kAllMotionTypes)
    for (int i = 0; i < 4; ++i) s.add({std::to_string(code(t)) + "_" + std::to_string(i), {10.0f * code(t), 0}, t});
  EXPECT_DOUBLE_EQ(retrieval_accuracy(s, 3), 1.0);
  EXPECT_DOUBLE_EQ(retrieval_accuracy(s, 1), 1.0);
  EXPECT_THROW(retrieval_accuracy(s, 20), ConfigError);
  EXPECT_THROW(retrieval_accuracy(four_points(), 1), LabelError);
}

TEST(ExtractFeatures, OrderAndThreadIndependence) {
  synth::SynthConfig sc;
  sc.clips_per_class = 2;
  sc.frames = 6;
  const auto data = synth::generate_dataset(sc, {});
  model::ModelConfig mc;
  const auto params = model::init_params(mc, 1);
  const auto one = extract_features(data.train, params, mc, 1);
  const auto two = extract_features(data.train, params, mc, 2);
  EXPECT_TRUE(one.failures.empty());
  EXPECT_EQ(one.store, two.store);
  ASSERT_EQ(one.store.size(), data.train.size());
  EXPECT_EQ(one.store.dim(), mc.feature_dim);
  for (std::size_t i = 0; i < data.train.size(); ++i) EXPECT_EQ(one.store.records()[i].id, data.train[i].clip.id);

  std::vector<video::Clip> clips = {data.train[0].clip, video::Clip::blank("short", 1, 32, 32, 1)};
  std::vector<std::optional<MotionType>> labels(2);
  const auto partial = extract_features(clips, labels, params, mc);
  EXPECT_EQ(partial.store.size(), 1u);
  ASSERT_EQ(partial.failures.size(), 1u);
  EXPECT_EQ(partial.failures[0].id, "short");
}
