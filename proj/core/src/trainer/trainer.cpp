#include "motion/trainer/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "motion/error.hpp"
#include "motion/model/inference.hpp"
#include "motion/numerics/ops.hpp"
#include "motion/util/binary_io.hpp"

namespace motion::trainer {

void TrainConfig::validate() const {
  if (!(base_lr > 0.0) || !std::isfinite(base_lr)) throw ConfigError("base_lr must be positive");
  if (!std::is_sorted(halve_epochs.begin(), halve_epochs.end())) throw ConfigError("halve_epochs must be sorted");
  if (epochs == 0) throw ConfigError("epochs must be positive");
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  nn::SgdConfig{base_lr, momentum, weight_decay}.validate();
}

double lr_at_epoch(const TrainConfig& cfg, std::size_t epoch) {
  const auto drops = std::count_if(cfg.halve_epochs.begin(), cfg.halve_epochs.end(),
                                   [epoch](std::size_t e) { return e < epoch; });
  return cfg.base_lr * std::ldexp(1.0, -static_cast<int>(drops));
}

EvalResult summarize(std::span<const MotionType> labels, std::span<const MotionType> predictions) {
  if (labels.size() != predictions.size()) throw ShapeError("summarize: label and prediction counts differ");
  if (labels.empty()) throw DatasetError("cannot evaluate an empty split");
  EvalResult r;
  r.count = labels.size();
  std::uint64_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    ++r.confusion[code(labels[i])][code(predictions[i])];
    hits += labels[i] == predictions[i];
  }
  r.accuracy = static_cast<double>(hits) / static_cast<double>(r.count);
  return r;
}

namespace {

// Eval inputs never change, so each split is preprocessed once.
std::vector<nn::Tensor> eval_inputs(std::span<const synth::LabeledClip> split, const model::ModelConfig& cfg) {
  const auto pp = video::PreprocessConfig::eval(cfg.input_size);
  Rng unused(0);
  std::vector<nn::Tensor> out;
  out.reserve(split.size());
  for (const auto& lc : split) out.push_back(model::prepare_segments(lc.clip, cfg, pp, unused));
  return out;
}

EvalResult evaluate_inputs(const model::ModelParams& params, std::span<const nn::Tensor> inputs,
                           std::span<const MotionType> labels, const model::ModelConfig& cfg) {
  std::vector<MotionType> preds;
  preds.reserve(inputs.size());
  for (const auto& x : inputs) {
    preds.push_back(model::argmax_motion(model::classify(model::consensus(model::backbone_forward(x, params, cfg)), params)));
  }
  return summarize(labels, preds);
}

std::vector<MotionType> labels_of(std::span<const synth::LabeledClip> split) {
  std::vector<MotionType> out;
  for (const auto& lc : split) out.push_back(lc.label);
  return out;
}

}  // namespace

EvalResult evaluate(const model::ModelParams& params, std::span<const synth::LabeledClip> split,
                    const model::ModelConfig& cfg) {
  if (split.empty()) throw DatasetError("cannot evaluate an empty split");
  const auto inputs = eval_inputs(split, cfg);
  return evaluate_inputs(params, inputs, labels_of(split), cfg);
}

TrainResult train(const model::ModelConfig& model_cfg, const synth::Dataset& data, const TrainConfig& cfg,
                  const EpochCallback& on_epoch) {
  model_cfg.validate();
  cfg.validate();
  if (data.train.empty()) throw DatasetError("train split is empty");
  if (data.val.empty()) throw DatasetError("val split is empty");

  const auto val_inputs = eval_inputs(data.val, model_cfg);
  const auto val_labels = labels_of(data.val);
  const auto train_pp = video::PreprocessConfig::train(model_cfg.input_size);

  model::ModelParams params = model::init_params(model_cfg, mix_seed(cfg.seed, 1));
  auto param_ptrs = params.all();
  Rng shuffle_rng(mix_seed(cfg.seed, 2));
  Rng augment_rng(mix_seed(cfg.seed, 3));

  TrainResult result;
  result.params = params;
  double best_acc = -1.0;

  std::vector<std::size_t> order(data.train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = lr_at_epoch(cfg, epoch);
    const nn::SgdConfig sgd{lr, cfg.momentum, cfg.weight_decay};

    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[shuffle_rng.uniform_index(i)]);
    }

    double loss_sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const float scale = 1.0f / static_cast<float>(end - start);
      params.zero_grad();
      for (std::size_t j = start; j < end; ++j) {
        const auto& sample = data.train[order[j]];
        const nn::Tensor x = model::prepare_segments(sample.clip, model_cfg, train_pp, augment_rng);
        model::BackboneCache<float> bc;
        model::HeadCache<float> hc;
        const nn::Tensor feats = model::backbone_forward(x, params, model_cfg, &bc);
        const nn::Tensor logits = model::head_forward(model::consensus(feats), params, &hc);
        const auto ce = nn::softmax_cross_entropy(logits, code(sample.label));
        if (!std::isfinite(ce.loss)) {
          throw DivergenceError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                                std::to_string(start / cfg.batch_size));
        }
        loss_sum += ce.loss;
        hits += nn::argmax<float>(ce.probs.data()) == code(sample.label);

        nn::Tensor dlogits = nn::softmax_cross_entropy_backward(ce.probs, code(sample.label));
        for (float& v : dlogits.data()) v *= scale;
        const nn::Tensor dfeat = model::head_backward(dlogits, hc, params);
        model::backbone_backward(model::consensus_backward(dfeat, model_cfg.segments), bc, params, model_cfg);
      }
      nn::sgd_step<float>(param_ptrs, sgd);
    }

    EpochMetrics em;
    em.epoch = epoch;
    em.lr = lr;
    em.train_loss = loss_sum / static_cast<double>(order.size());
    em.train_acc = static_cast<double>(hits) / static_cast<double>(order.size());
    const EvalResult val = evaluate_inputs(params, val_inputs, val_labels, model_cfg);
    em.val_acc = val.accuracy;
    if (val.accuracy >= best_acc) {
      best_acc = val.accuracy;
      result.params = params;
      result.metrics.best_epoch = epoch;
      result.metrics.best_val = val;
    }
    result.metrics.epochs.push_back(em);
    if (on_epoch) on_epoch(em);
  }
  // Momentum buffers and gradients are training state, not part of the model.
  for (auto* p : result.params.all()) {
    p->grad.fill(0.0f);
    p->momentum_buffer.fill(0.0f);
  }
  return result;
}

std::string metrics_csv(const Metrics& m) {
  std::ostringstream os;
  os.precision(9);
  os << "epoch,lr,train_loss,train_acc,val_acc\n";
  for (const auto& e : m.epochs) {
    os << e.epoch << ',' << e.lr << ',' << e.train_loss << ',' << e.train_acc << ',' << e.val_acc << '\n';
  }
  return os.str();
}

std::string eval_json(const EvalResult& r) {
  nlohmann::ordered_json j;
  j["accuracy"] = r.accuracy;
  j["count"] = r.count;
  j["classes"] = nlohmann::json::array();
  for (auto t : kAllMotionTypes) j["classes"].push_back(std::string(to_string(t)));
  j["confusion"] = r.confusion;
  return j.dump(2);
}

void write_metrics(const Metrics& m, const std::filesystem::path& csv_path) {
  io::write_text_atomic(csv_path, metrics_csv(m));
}

}  // namespace motion::trainer
