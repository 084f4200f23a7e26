#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace motion::model {

/// Architecture of the temporal-shift backbone and classifier head.
struct ModelConfig {
  std::size_t segments = 3;
  std::size_t input_size = 32;
  std::size_t input_channels = 1;
  /// Output channels of each stride-2 conv block; the last equals feature_dim.
  std::vector<std::size_t> block_widths = {16, 32, 64, 128};
  std::size_t feature_dim = 128;
  /// Fraction of channels shifted in each temporal direction.
  double shift_fraction = 0.125;
  std::vector<std::size_t> head_widths = {128, 64};
  std::size_t num_classes = 5;

  std::size_t kernel = 3;
  std::size_t stride = 2;
  std::size_t pad = 1;

  std::size_t num_blocks() const { return block_widths.size(); }
  std::size_t block_in_channels(std::size_t block) const {
    return block == 0 ? input_channels : block_widths[block - 1];
  }
  /// Spatial size of the input to `block` (block == num_blocks() gives the final map).
  std::size_t spatial_size(std::size_t block) const;
  /// Channels moved per direction before `block`; blocks after the first are shifted.
  std::size_t shifted_channels(std::size_t block) const;

  /// Throws ConfigError when the configuration is inconsistent.
  void validate() const;

  std::string to_json() const;
  static ModelConfig from_json(std::string_view text);

  bool operator==(const ModelConfig&) const = default;
};

}  // namespace motion::model
