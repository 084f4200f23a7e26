#include "motion/model/config.hpp"

#include <cmath>
#include "json.hpp"

#include "motion/error.hpp"

namespace motion::model {

std::size_t ModelConfig::spatial_size(std::size_t block) const {
  std::size_t s = input_size;
  for (std::size_t b = 0; b < block; ++b) s = (s + 2 * pad - kernel) / stride + 1;
  return s;
}

std::size_t ModelConfig::shifted_channels(std::size_t block) const {
  if (block == 0) return 0;
  return static_cast<std::size_t>(std::floor(shift_fraction * static_cast<double>(block_widths[block - 1])));
}

void ModelConfig::validate() const {
  if (segments == 0) throw ConfigError("model: segments must be >= 1");
  if (input_channels != 1 && input_channels != 3) throw ConfigError("model: input_channels must be 1 or 3");
  if (block_widths.empty()) throw ConfigError("model: at least one conv block is required");
  for (std::size_t w : block_widths) {
    if (w == 0) throw ConfigError("model: block widths must be positive");
  }
  if (block_widths.back() != feature_dim) throw ConfigError("model: last block width must equal feature_dim");
  if (num_classes != 5) throw ConfigError("model: num_classes must be 5");
  if (kernel == 0 || stride == 0) throw ConfigError("model: kernel and stride must be positive");
  if (!(shift_fraction >= 0.0 && shift_fraction <= 0.5)) throw ConfigError("model: shift_fraction must be in [0, 0.5]");
  // Every stride-2 stage must see at least `stride` pixels so no stage collapses.
  std::size_t need = 1;
  for (std::size_t b = 0; b < num_blocks(); ++b) need *= stride;
  if (input_size < need || input_size + 2 * pad < kernel) {
    throw ConfigError("model: input size " + std::to_string(input_size) + " too small for " +
                      std::to_string(num_blocks()) + " stride-" + std::to_string(stride) + " blocks");
  }
  if (segments > 1 && shift_fraction > 0.0) {
    for (std::size_t b = 1; b < num_blocks(); ++b) {
      if (shifted_channels(b) < 1) {
        throw ConfigError("model: shift_fraction moves no channel before block " + std::to_string(b));
      }
    }
  }
  for (std::size_t w : head_widths) {
    if (w == 0) throw ConfigError("model: head widths must be positive");
  }
}

std::string ModelConfig::to_json() const {
  nlohmann::json j = {{"segments", segments},         {"input_size", input_size},
                      {"input_channels", input_channels}, {"block_widths", block_widths},
                      {"feature_dim", feature_dim},   {"shift_fraction", shift_fraction},
                      {"head_widths", head_widths},   {"num_classes", num_classes},
                      {"kernel", kernel},             {"stride", stride},
                      {"pad", pad}};
  return j.dump(2);
}

ModelConfig ModelConfig::from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("model config JSON: ") + e.what());
  }
  ModelConfig c;
  try {
    c.segments = j.value("segments", c.segments);
    c.input_size = j.value("input_size", c.input_size);
    c.input_channels = j.value("input_channels", c.input_channels);
    c.block_widths = j.value("block_widths", c.block_widths);
    c.feature_dim = j.value("feature_dim", c.feature_dim);
    c.shift_fraction = j.value("shift_fraction", c.shift_fraction);
    c.head_widths = j.value("head_widths", c.head_widths);
    c.num_classes = j.value("num_classes", c.num_classes);
    c.kernel = j.value("kernel", c.kernel);
    c.stride = j.value("stride", c.stride);
    c.pad = j.value("pad", c.pad);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("model config JSON: ") + e.what());
  }
  c.validate();
  return c;
}

}  // namespace motion::model
