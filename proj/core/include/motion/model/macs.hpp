#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "motion/model/config.hpp"

namespace motion::model {

struct LayerMacs {
  std::string name;
  std::size_t in_features = 0;  // channels for convs
  std::size_t out_features = 0;
  std::size_t kernel = 1;
  std::size_t out_height = 1;
  std::size_t out_width = 1;
  /// Backbone layers run once per segment; head layers run once per clip.
  bool per_segment = true;
  std::uint64_t macs_once = 0;
  std::uint64_t macs_total = 0;
};

struct MacReport {
  std::vector<LayerMacs> layers;
  std::uint64_t backbone = 0;
  std::uint64_t head = 0;
  std::uint64_t total = 0;
};

/// Conv layers cost C_out * C_in * k^2 * H_out * W_out per segment; linear
/// layers F_out * F_in once. Shifts, ReLU, pooling and consensus cost 0.
MacReport count_macs(const ModelConfig& cfg);

}  // namespace motion::model
