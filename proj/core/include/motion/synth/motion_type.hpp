#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace motion {

/// The five primitive motion classes; integer codes are stable (0..4).
enum class MotionType : std::uint8_t { Linear = 0, Projectile = 1, Oscillatory = 2, Local = 3, Random = 4 };

inline constexpr std::size_t kNumMotionTypes = 5;

inline constexpr std::array<MotionType, kNumMotionTypes> kAllMotionTypes = {
    MotionType::Linear, MotionType::Projectile, MotionType::Oscillatory, MotionType::Local,
    MotionType::Random};

constexpr std::size_t code(MotionType m) noexcept { return static_cast<std::size_t>(m); }

/// Lower-case name used in CSV files and JSON ("linear", "projectile", ...).
std::string_view to_string(MotionType m) noexcept;

/// Case-insensitive parse of a motion type name.
std::optional<MotionType> parse_motion_type(std::string_view name);

std::optional<MotionType> motion_type_from_code(std::size_t code);

}  // namespace motion
