// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <chrono>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "motion/baseline/baseline.hpp"
#include "motion/model/gradient_suite.hpp"
#include "motion/model/inference.hpp"
#include "motion/model/macs.hpp"
#include "motion/recommender/recommender.hpp"
#include "motion/retrieval/retrieval.hpp"
#include "motion/synth/dataset.hpp"
#include "motion/synth/label_map.hpp"
#include "motion/trainer/trainer.hpp"
#include "test_util.hpp"

using namespace motion;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void gradient_suite() {
  const auto t0 = Clock::now();
  const auto results = model::run_gradient_suite();
  const double secs = seconds_since(t0);
  double worst = 0;
  std::string worst_op;
  for (const auto& r : results)
    if (r.max_rel_error >= worst) {
      worst = r.max_rel_error;
      worst_op = r.name;
    }
  report(1, worst <= 1e-5 && secs < 60.0,
         fmt("%zu ops, worst %s %.3g (<= 1e-5), %.2fs (< 60s)", results.size(), worst_op.c_str(), worst, secs));
}

void mac_accounting() {
  model::ModelConfig one;
  one.segments = 1;
  const auto base = model::count_macs(one).backbone;
  bool linear = true;
  std::string detail;
  for (std::size_t t : {1u, 2u, 3u, 8u}) {
    model::ModelConfig cfg;
    cfg.segments = t;
    const auto m = model::count_macs(cfg).backbone;
    linear = linear && m == t * base;
    detail += fmt("T%zu=%llu ", t, static_cast<unsigned long long>(m));
  }
  model::ModelConfig single;
  single.segments = 1;
  single.input_size = 64;
  single.input_channels = 3;
  single.block_widths = {8};
  single.feature_dim = 8;
  const auto hand = model::count_macs(single).backbone;
  report(5, linear && hand == 221184,
         detail + fmt("linear=%s single-conv=%llu (221184)", linear ? "yes" : "no", static_cast<unsigned long long>(hand)));
}

void recommender_checks() {
  using recommender::PlaybackStyle;
  bool mapping = true;
  for (std::uint64_t s = 0; s < 100; ++s) {
    mapping = mapping && recommender::recommend(MotionType::Linear, s) == PlaybackStyle::Reverse &&
              recommender::recommend(MotionType::Projectile, s) == PlaybackStyle::Boomerang &&
              recommender::recommend(MotionType::Local, s) == PlaybackStyle::Loop &&
              recommender::recommend(MotionType::Oscillatory, s) == PlaybackStyle::Loop;
  }
  synth::SynthConfig sc;
  const auto clip = synth::generate_clip(sc, MotionType::Random, 0).clip;
  const auto twice = recommender::apply_style(recommender::apply_style(clip, PlaybackStyle::Reverse), PlaybackStyle::Reverse);
  const bool involution = twice.pixels == clip.pixels && twice.frame_count == clip.frame_count;
  const bool boomerang = recommender::apply_style(clip, PlaybackStyle::Boomerang).frame_count == 2 * clip.frame_count - 1;
  std::map<PlaybackStyle, int> hist;
  for (std::uint64_t s = 0; s < 3000; ++s) ++hist[recommender::recommend(MotionType::Random, s)];
  bool uniform = true;
  std::string freqs;
  for (auto st : recommender::kAllStyles) {
    const double f = hist[st] / 3000.0;
    uniform = uniform && f >= 0.28 && f <= 0.39;
    freqs += fmt(" %s=%.3f", std::string(recommender::to_string(st)).c_str(), f);
  }
  report(7, mapping && involution && boomerang && uniform,
         fmt("mapping=%s reverse^2=%s boomerang_len=%s random:", mapping ? "ok" : "bad", involution ? "ok" : "bad",
             boomerang ? "ok" : "bad") + freqs + " (each in [0.28, 0.39])");
}

void label_map() {
  const auto m = synth::load_label_map(std::filesystem::path(MOTION_DATA_DIR) / "mhmdb51.csv");
  const auto h = m.histogram();
  const bool ok = m.size() == 51 && h[code(MotionType::Linear)] == 10 && h[code(MotionType::Projectile)] == 12 &&
                  h[code(MotionType::Local)] == 12 && h[code(MotionType::Oscillatory)] == 5 &&
                  h[code(MotionType::Random)] == 12;
  report(8, ok,
         fmt("%zu actions, linear %zu projectile %zu local %zu oscillatory %zu random %zu", m.size(),
             h[code(MotionType::Linear)], h[code(MotionType::Projectile)], h[code(MotionType::Local)],
             h[code(MotionType::Oscillatory)], h[code(MotionType::Random)]));
}

void schedule() {
  const trainer::TrainConfig cfg;
  const double a = trainer::lr_at_epoch(cfg, 0), b = trainer::lr_at_epoch(cfg, 21), c = trainer::lr_at_epoch(cfg, 41);
  report(10, a == 0.001 && b == 0.0005 && c == 0.00025, fmt("lr(0)=%g lr(21)=%g lr(41)=%g", a, b, c));
}

int cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(std::move(args), out, err);
  if (code != 0) std::fprintf(stderr, "%s", err.str().c_str());
  return code;
}

void determinism() {
  test_support::TempDir dir;
  auto p = [&](const char* name) { return (dir / name).string(); };
  const std::vector<std::string> gen = {"--clips-per-class", "12", "--frames", "12", "--seed", "5"};
  auto with = [](std::vector<std::string> head, const std::vector<std::string>& tail) {
    head.insert(head.end(), tail.begin(), tail.end());
    return head;
  };
  const bool gen_ok = cli(with({"synthgen", "--out", p("d1")}, gen)) == 0 &&
                      cli(with({"synthgen", "--out", p("d2"), "--threads", "2"}, gen)) == 0;
  const bool same_data = gen_ok && test_support::same_tree(dir / "d1", dir / "d2");

  const std::vector<std::string> tr = {"--data", p("d1"), "--epochs", "2", "--seed", "3"};
  const bool train_ok = cli(with({"train", "--out", p("a.mtck")}, tr)) == 0 &&
                        cli(with({"train", "--out", p("b.mtck")}, tr)) == 0;
  const bool same_ckpt = train_ok && test_support::slurp(dir / "a.mtck") == test_support::slurp(dir / "b.mtck") &&
                         !test_support::slurp(dir / "a.mtck").empty() &&
                         test_support::slurp(dir / "a.mtck.json") == test_support::slurp(dir / "b.mtck.json");
  report(9, same_data && same_ckpt,
         fmt("synthgen identical=%s, train checkpoints identical=%s", same_data ? "yes" : "no", same_ckpt ? "yes" : "no"));
}

double accuracy_of(const model::ModelParams& params, const synth::Dataset& data, const model::ModelConfig& cfg) {
  return trainer::evaluate(params, data.test, cfg).accuracy;
}

}  // namespace

int main() {
  std::printf("motion-type acceptance suite\n");
  gradient_suite();
  mac_accounting();
  recommender_checks();
  label_map();
  schedule();
  determinism();

  auto t0 = Clock::now();
  const synth::SynthConfig sc;
  const auto data = synth::generate_dataset(sc, {});
  std::printf("corpus: %zu train / %zu val / %zu test, %zux%zux%zu, %.1fs\n", data.train.size(), data.val.size(),
              data.test.size(), sc.height, sc.width, sc.frames, seconds_since(t0));

  std::map<std::size_t, double> acc;
  std::map<std::size_t, double> train_secs;
  model::ModelParams t3_params;
  model::ModelConfig t3_cfg;
  for (std::size_t t : {3u, 2u, 1u}) {
    model::ModelConfig mc;
    mc.segments = t;
    const trainer::TrainConfig tc;
    t0 = Clock::now();
    auto res = trainer::train(mc, data, tc);
    train_secs[t] = seconds_since(t0);
    acc[t] = accuracy_of(res.params, data, mc);
    std::printf("T=%zu: test accuracy %.4f (best epoch %zu, val %.4f), trained in %.1fs\n", t, acc[t],
                res.metrics.best_epoch, res.metrics.best_val.accuracy, train_secs[t]);
    std::fflush(stdout);
    if (t == 3) {
      t3_params = std::move(res.params);
      t3_cfg = mc;
    }
  }
  report(2, acc[3] >= 0.85 && train_secs[3] <= 900.0,
         fmt("T=3 test accuracy %.4f (>= 0.85), training %.1fs (<= 900s)", acc[3], train_secs[3]));
  report(3, acc[3] >= acc[2] && acc[2] >= acc[1] && acc[1] <= 0.45,
         fmt("acc T3 %.4f >= T2 %.4f >= T1 %.4f, T1 <= 0.45", acc[3], acc[2], acc[1]));

  t0 = Clock::now();
  const baseline::BaselineConfig bc;
  const auto train_features = baseline::feature_set(data.train, bc);
  const auto test_features = baseline::feature_set(data.test, bc);
  const auto bm = baseline::train_baseline(std::span<const baseline::LabeledFeatures>(train_features), bc);
  std::size_t hits = 0;
  for (const auto& f : test_features) hits += baseline::predict_features(f.features, bm).motion == f.label;
  const double base_acc = static_cast<double>(hits) / static_cast<double>(test_features.size());
  report(4, base_acc > 0.30 && base_acc <= acc[3] - 0.15,
         fmt("baseline test accuracy %.4f (> 0.30, <= T3 - 0.15 = %.4f), %.1fs", base_acc, acc[3] - 0.15,
             seconds_since(t0)));

  const auto store = retrieval::extract_features(data.test, t3_params, t3_cfg).store;
  const double loo = retrieval::retrieval_accuracy(store, 3);
  retrieval::FeatureStore hand(2);
  hand.add({"A", {0, 0}, std::nullopt});
  hand.add({"B", {1, 0}, std::nullopt});
  hand.add({"C", {0, 2}, std::nullopt});
  hand.add({"D", {3, 3}, std::nullopt});
  const std::vector<float> q = {0.0f, 0.1f};
  std::string order;
  for (const auto& n : retrieval::knn(hand, q, 3)) order += n.id;
  report(6, loo >= 0.75 && order == "ABC",
         fmt("LOO top-3 agreement %.4f on %zu test features (>= 0.75), hand kNN %s (ABC)", loo, store.size(),
             order.c_str()));

  std::printf("%s: %d criteria failed\n", failures ? "FAILED" : "PASSED", failures);
  return failures ? 1 : 0;
}
