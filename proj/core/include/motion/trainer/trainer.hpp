#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "motion/model/config.hpp"
#include "motion/model/network.hpp"
#include "motion/synth/dataset.hpp"

namespace motion::trainer {

struct TrainConfig {
  double base_lr = 0.001;
  /// The rate halves after each listed epoch (0-based epochs, so a drop listed
  /// as 20 takes effect from epoch 21).
  std::vector<std::size_t> halve_epochs = {20, 40};
  std::size_t epochs = 60;
  double momentum = 0.9;
  double weight_decay = 5e-5;
  std::size_t batch_size = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

double lr_at_epoch(const TrainConfig& cfg, std::size_t epoch);

inline constexpr std::size_t kNumClasses = 5;
using Confusion = std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses>;  // [true][predicted]

struct EpochMetrics {
  std::size_t epoch = 0;
  double lr = 0.0;
  double train_loss = 0.0;
  double train_acc = 0.0;
  double val_acc = 0.0;
};

struct EvalResult {
  double accuracy = 0.0;
  Confusion confusion{};
  std::size_t count = 0;
};

struct Metrics {
  std::vector<EpochMetrics> epochs;
  std::size_t best_epoch = 0;
  /// Validation confusion of the returned (best-epoch) parameters.
  EvalResult best_val;
};

struct TrainResult {
  model::ModelParams params;
  Metrics metrics;
};

using EpochCallback = std::function<void(const EpochMetrics&)>;

/// SGD with momentum over seeded shuffles of the train split, train-mode
/// augmentation, and selection of the best validation epoch (later epoch on ties).
TrainResult train(const model::ModelConfig& model_cfg, const synth::Dataset& data, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {});

/// accuracy = trace / sum of the confusion matrix built from the two label lists.
EvalResult summarize(std::span<const MotionType> labels, std::span<const MotionType> predictions);

/// Eval-mode predictions over a split.
EvalResult evaluate(const model::ModelParams& params, std::span<const synth::LabeledClip> split,
                    const model::ModelConfig& cfg);

/// epoch,lr,train_loss,train_acc,val_acc
std::string metrics_csv(const Metrics& m);
std::string eval_json(const EvalResult& r);
void write_metrics(const Metrics& m, const std::filesystem::path& csv_path);

}  // namespace motion::trainer
