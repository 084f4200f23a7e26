#pragma once

#include <cstddef>
#include <vector>

#include "motion/numerics/rng.hpp"
#include "motion/synth/motion_type.hpp"

namespace motion::synth {

struct Point {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point&) const = default;
};

/// Admissible sprite-centre rectangle (inclusive), i.e. the frame shrunk by the
/// sprite radius so the whole disc stays visible.
struct FrameBounds {
  double min_x = 0.0;
  double max_x = 0.0;
  double min_y = 0.0;
  double max_y = 0.0;
  std::size_t frame_height = 0;
  std::size_t frame_width = 0;

  static FrameBounds for_sprite(std::size_t height, std::size_t width, double sprite_radius);
  Point clamp(Point p) const;
  bool contains(Point p) const;
};

/// Per-clip trajectory parameters. Units are pixels and frames.
struct TrajectoryParams {
  Point p0;
  Point v0;
  Point gravity;
  double amplitude = 0.0;
  double angular_rate = 0.0;
  double jitter_radius = 0.0;
  double direction_change_prob = 0.0;
  double min_speed = 1.0;
  double max_speed = 3.0;
  /// Projectile only: reflect v_y once (damped) when the path reaches max_y.
  bool floor_bounce = false;
  double bounce_damping = 0.8;
};

/// Positions for t = 0 .. frames-1, clamped into `bounds`.
///   Linear       p0 + v0 t
///   Projectile   p0 + v0 t + g t^2 / 2 (optionally one damped floor bounce)
///   Oscillatory  p0 + A sin(w t) u, u a random unit direction drawn from rng
///   Local        p0 + per-frame jitter, each component uniform in [-r, r]
///   Random       random walk; with probability q per frame the velocity is
///                redrawn (speed uniform in [min_speed, max_speed], random heading)
std::vector<Point> gen_trajectory(MotionType type, const TrajectoryParams& params, std::size_t frames,
                                  const FrameBounds& bounds, Rng& rng);

/// Randomisation ranges used when drawing per-clip parameters. The defaults
/// are tuned to 32x32 frames and 30-frame clips.
struct SynthRanges {
  double linear_speed_min = 0.4, linear_speed_max = 0.8;
  double projectile_gravity_min = 0.04, projectile_gravity_max = 0.08;
  /// Apex time as a fraction of clip length.
  double projectile_apex_min = 0.4, projectile_apex_max = 0.6;
  double projectile_vx_min = 0.3, projectile_vx_max = 0.6;
  double oscillation_amplitude_min = 5.0, oscillation_amplitude_max = 9.0;
  double oscillation_period_min = 16.0, oscillation_period_max = 24.0;
  double jitter_radius_min = 1.0, jitter_radius_max = 2.0;
  double random_speed_min = 1.0, random_speed_max = 3.0;
  double random_direction_change_prob = 0.2;
};

/// Draws parameters for one clip, placing p0 so the unclamped path fits the frame.
TrajectoryParams sample_trajectory_params(MotionType type, const SynthRanges& ranges,
                                          const FrameBounds& bounds, std::size_t frames, Rng& rng);

}  // namespace motion::synth
