#pragma once

#include <filesystem>

#include "motion/model/config.hpp"
#include "motion/model/network.hpp"
#include "motion/numerics/rng.hpp"
#include "motion/synth/motion_type.hpp"
#include "motion/video/clip.hpp"
#include "motion/video/preprocess.hpp"

namespace motion::model {

struct Prediction {
  MotionType motion = MotionType::Linear;
  nn::Tensor probs;
};

/// Samples one central frame per segment, preprocesses them and adapts the
/// channel count to the model (RGB -> luma, or grey replicated to RGB).
nn::Tensor prepare_segments(const video::Clip& clip, const ModelConfig& cfg, const video::PreprocessConfig& pp,
                            Rng& rng);

/// Post-consensus, pre-head feature of a clip under eval preprocessing.
nn::Tensor extract_feature(const video::Clip& clip, const ModelParams& params, const ModelConfig& cfg);

/// Full pipeline: segments -> backbone -> consensus -> head -> softmax -> argmax
/// (ties resolve to the lowest class code). `pp` should be an eval config.
Prediction predict(const video::Clip& clip, const ModelParams& params, const ModelConfig& cfg,
                   const video::PreprocessConfig& pp);
Prediction predict(const video::Clip& clip, const ModelParams& params, const ModelConfig& cfg);

MotionType argmax_motion(const nn::Tensor& probs);

/// A trained model together with the architecture it was built for.
struct Model {
  ModelConfig config;
  ModelParams params;
};

/// Writes the MTCK checkpoint at `path` and the config sidecar at `path` + ".json".
void save_model(const std::filesystem::path& path, const ModelParams& params, const ModelConfig& cfg);
Model load_model(const std::filesystem::path& path);

std::filesystem::path sidecar_path(const std::filesystem::path& checkpoint);

}  // namespace motion::model
