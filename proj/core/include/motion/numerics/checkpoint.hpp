#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "motion/numerics/tensor.hpp"

namespace motion::nn {

struct NamedTensor {
  std::string name;
  Tensor tensor;

  bool operator==(const NamedTensor&) const = default;
};

inline constexpr std::uint16_t kCheckpointVersion = 1;

/// MTCK layout, little-endian:
///   "MTCK" | u16 version | u32 count |
///   count x ( u32 name_len | name bytes | u32 rank | rank x u32 extent | f32 data )
std::vector<std::uint8_t> encode_checkpoint(std::span<const NamedTensor> tensors);
std::vector<NamedTensor> decode_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const std::filesystem::path& path, std::span<const NamedTensor> tensors);
std::vector<NamedTensor> load_checkpoint(const std::filesystem::path& path);

}  // namespace motion::nn
