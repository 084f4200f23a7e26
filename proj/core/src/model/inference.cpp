#include "motion/model/inference.hpp"

#include "motion/numerics/checkpoint.hpp"
#include "motion/numerics/ops.hpp"
#include "motion/util/binary_io.hpp"
#include "motion/video/segments.hpp"

namespace motion::model {

namespace fs = std::filesystem;

nn::Tensor prepare_segments(const video::Clip& clip, const ModelConfig& cfg, const video::PreprocessConfig& pp,
                            Rng& rng) {
  if (pp.canonical_size != cfg.input_size) {
    throw ConfigError("preprocess size " + std::to_string(pp.canonical_size) + " differs from model input size " +
                      std::to_string(cfg.input_size));
  }
  const auto indices = video::sample_segments(clip, cfg.segments);
  nn::Tensor x = video::preprocess_clip(clip, indices, pp, rng);
  const std::size_t c = x.dim(1);
  if (c == cfg.input_channels) return x;

  const std::size_t segs = x.dim(0), plane = cfg.input_size * cfg.input_size;
  nn::Tensor out({segs, cfg.input_channels, cfg.input_size, cfg.input_size});
  for (std::size_t t = 0; t < segs; ++t) {
    const float* src = x.data().data() + t * c * plane;
    float* dst = out.data().data() + t * cfg.input_channels * plane;
    for (std::size_t i = 0; i < plane; ++i) {
      if (c == 3) {
        dst[i] = 0.299f * src[i] + 0.587f * src[plane + i] + 0.114f * src[2 * plane + i];
      } else {
        for (std::size_t ch = 0; ch < cfg.input_channels; ++ch) dst[ch * plane + i] = src[i];
      }
    }
  }
  return out;
}

nn::Tensor extract_feature(const video::Clip& clip, const ModelParams& params, const ModelConfig& cfg) {
  Rng unused(0);
  const nn::Tensor x = prepare_segments(clip, cfg, video::PreprocessConfig::eval(cfg.input_size), unused);
  return consensus(backbone_forward(x, params, cfg));
}

MotionType argmax_motion(const nn::Tensor& probs) {
  return static_cast<MotionType>(nn::argmax<float>(probs.data()));
}

Prediction predict(const video::Clip& clip, const ModelParams& params, const ModelConfig& cfg,
                   const video::PreprocessConfig& pp) {
  Rng rng(0);
  const nn::Tensor x = prepare_segments(clip, cfg, pp, rng);
  const nn::Tensor feature = consensus(backbone_forward(x, params, cfg));
  Prediction p;
  p.probs = classify(feature, params);
  p.motion = argmax_motion(p.probs);
  return p;
}

Prediction predict(const video::Clip& clip, const ModelParams& params, const ModelConfig& cfg) {
  return predict(clip, params, cfg, video::PreprocessConfig::eval(cfg.input_size));
}

fs::path sidecar_path(const fs::path& checkpoint) {
  fs::path p = checkpoint;
  p += ".json";
  return p;
}

void save_model(const fs::path& path, const ModelParams& params, const ModelConfig& cfg) {
  check_params(params, cfg);
  nn::save_checkpoint(path, to_named_tensors(params));
  io::write_text_atomic(sidecar_path(path), cfg.to_json() + "\n");
}

Model load_model(const fs::path& path) {
  const auto json = io::read_file(sidecar_path(path));
  Model m;
  m.config = ModelConfig::from_json(std::string_view(reinterpret_cast<const char*>(json.data()), json.size()));
  m.params = from_named_tensors(nn::load_checkpoint(path), m.config);
  return m;
}

}  // namespace motion::model
