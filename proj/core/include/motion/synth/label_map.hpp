#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "motion/synth/motion_type.hpp"

namespace motion::synth {

/// Action-class name -> motion type (e.g. the 51 mHMDB51 actions).
struct LabelMap {
  std::vector<std::pair<std::string, MotionType>> entries;

  std::optional<MotionType> find(std::string_view action) const;
  std::array<std::size_t, kNumMotionTypes> histogram() const;
  std::size_t size() const noexcept { return entries.size(); }
};

/// Parses CSV text with header "action,motion_type".
/// Throws FormatError on unknown motion types or duplicate actions.
LabelMap parse_label_map(std::string_view csv);
LabelMap load_label_map(const std::filesystem::path& path);

}  // namespace motion::synth
