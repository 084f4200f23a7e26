#include "motion/synth/motion_type.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace motion {

std::string_view to_string(MotionType m) noexcept {
  switch (m) {
    case MotionType::Linear: return "linear";
    case MotionType::Projectile: return "projectile";
    case MotionType::Oscillatory: return "oscillatory";
    case MotionType::Local: return "local";
    case MotionType::Random: return "random";
  }
  return "unknown";
}

std::optional<MotionType> parse_motion_type(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  for (MotionType m : kAllMotionTypes) {
    if (lower == to_string(m)) return m;
  }
  return std::nullopt;
}

std::optional<MotionType> motion_type_from_code(std::size_t code) {
  if (code >= kNumMotionTypes) return std::nullopt;
  return static_cast<MotionType>(code);
}

}  // namespace motion
