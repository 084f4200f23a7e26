#include "motion/synth/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "motion/error.hpp"

namespace motion::synth {

FrameBounds FrameBounds::for_sprite(std::size_t height, std::size_t width, double sprite_radius) {
  FrameBounds b;
  b.min_x = sprite_radius;
  b.min_y = sprite_radius;
  b.max_x = static_cast<double>(width) - 1.0 - sprite_radius;
  b.max_y = static_cast<double>(height) - 1.0 - sprite_radius;
  b.frame_height = height;
  b.frame_width = width;
  if (b.max_x < b.min_x || b.max_y < b.min_y) throw ConfigError("sprite does not fit inside the frame");
  return b;
}

Point FrameBounds::clamp(Point p) const {
  return {std::clamp(p.x, min_x, max_x), std::clamp(p.y, min_y, max_y)};
}

bool FrameBounds::contains(Point p) const {
  return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
}

namespace {

Point random_heading(Rng& rng, double speed) {
  const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
  return {speed * std::cos(theta), speed * std::sin(theta)};
}

bool finite(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }

void validate(const TrajectoryParams& p, const FrameBounds& bounds) {
  const bool ok = finite(p.p0) && finite(p.v0) && finite(p.gravity) && std::isfinite(p.amplitude) &&
                  std::isfinite(p.angular_rate) && std::isfinite(p.jitter_radius) &&
                  std::isfinite(p.min_speed) && std::isfinite(p.max_speed);
  if (!ok) throw ConfigError("trajectory parameters must be finite");
  const double limit = static_cast<double>(std::min(bounds.frame_height, bounds.frame_width)) / 4.0;
  if (p.jitter_radius < 0.0 || (bounds.frame_height > 0 && p.jitter_radius >= limit)) {
    throw ConfigError("jitter radius must be in [0, min(H,W)/4)");
  }
  if (!(p.direction_change_prob >= 0.0 && p.direction_change_prob <= 1.0)) {
    throw ConfigError("direction_change_prob must be in [0,1]");
  }
  if (p.min_speed < 0.0 || p.max_speed < p.min_speed) throw ConfigError("invalid random-walk speed range");
}

double projectile_y(const TrajectoryParams& p, double t, double floor_y) {
  const double g = p.gravity.y;
  const double free_y = p.p0.y + p.v0.y * t + 0.5 * g * t * t;
  if (!p.floor_bounce || g <= 0.0 || p.p0.y >= floor_y) return free_y;
  // First time the free path reaches the floor from above.
  const double disc = p.v0.y * p.v0.y - 2.0 * g * (p.p0.y - floor_y);
  const double hit = (-p.v0.y + std::sqrt(disc)) / g;
  if (t <= hit) return free_y;
  const double vy_after = -p.bounce_damping * (p.v0.y + g * hit);
  const double dt = t - hit;
  return floor_y + vy_after * dt + 0.5 * g * dt * dt;
}

}  // namespace

std::vector<Point> gen_trajectory(MotionType type, const TrajectoryParams& params, std::size_t frames,
                                  const FrameBounds& bounds, Rng& rng) {
  if (frames < 2) throw ConfigError("trajectory needs at least 2 frames");
  validate(params, bounds);
  std::vector<Point> out;
  out.reserve(frames);

  switch (type) {
    case MotionType::Linear:
      for (std::size_t i = 0; i < frames; ++i) {
        const double t = static_cast<double>(i);
        out.push_back({params.p0.x + params.v0.x * t, params.p0.y + params.v0.y * t});
      }
      break;
    case MotionType::Projectile:
      for (std::size_t i = 0; i < frames; ++i) {
        const double t = static_cast<double>(i);
        out.push_back({params.p0.x + params.v0.x * t + 0.5 * params.gravity.x * t * t,
                       projectile_y(params, t, bounds.max_y)});
      }
      break;
    case MotionType::Oscillatory: {
      const Point u = random_heading(rng, 1.0);
      for (std::size_t i = 0; i < frames; ++i) {
        const double s = params.amplitude * std::sin(params.angular_rate * static_cast<double>(i));
        out.push_back({params.p0.x + s * u.x, params.p0.y + s * u.y});
      }
      break;
    }
    case MotionType::Local: {
      const double r = params.jitter_radius;
      for (std::size_t i = 0; i < frames; ++i) {
        const double jx = rng.uniform(-r, r);
        const double jy = rng.uniform(-r, r);
        out.push_back({params.p0.x + jx, params.p0.y + jy});
      }
      break;
    }
    case MotionType::Random: {
      Point p = bounds.clamp(params.p0);
      Point v = random_heading(rng, rng.uniform(params.min_speed, params.max_speed));
      for (std::size_t i = 0; i < frames; ++i) {
        out.push_back(p);
        if (rng.bernoulli(params.direction_change_prob)) {
          v = random_heading(rng, rng.uniform(params.min_speed, params.max_speed));
        }
        p = {p.x + v.x, p.y + v.y};
        // Clamp to the frame; the blocked velocity component is reflected so the
        // walk does not stick to the border.
        if (p.x < bounds.min_x || p.x > bounds.max_x) v.x = -v.x;
        if (p.y < bounds.min_y || p.y > bounds.max_y) v.y = -v.y;
        p = bounds.clamp(p);
      }
      break;
    }
  }

  for (Point& p : out) p = bounds.clamp(p);
  return out;
}

namespace {

// Offset range that keeps [lo + rel_min, lo + rel_max] inside [min, max];
// falls back to centring when the path is wider than the frame.
double place(Rng& rng, double min, double max, double rel_min, double rel_max) {
  const double lo = min - rel_min;
  const double hi = max - rel_max;
  if (lo > hi) return 0.5 * (min + max) - 0.5 * (rel_min + rel_max);
  return rng.uniform(lo, hi);
}

}  // namespace

TrajectoryParams sample_trajectory_params(MotionType type, const SynthRanges& r, const FrameBounds& b,
                                          std::size_t frames, Rng& rng) {
  TrajectoryParams p;
  const double last = static_cast<double>(frames - 1);
  switch (type) {
    case MotionType::Linear: {
      p.v0 = random_heading(rng, rng.uniform(r.linear_speed_min, r.linear_speed_max));
      const double dx = p.v0.x * last, dy = p.v0.y * last;
      p.p0 = {place(rng, b.min_x, b.max_x, std::min(0.0, dx), std::max(0.0, dx)),
              place(rng, b.min_y, b.max_y, std::min(0.0, dy), std::max(0.0, dy))};
      break;
    }
    case MotionType::Projectile: {
      const double g = rng.uniform(r.projectile_gravity_min, r.projectile_gravity_max);
      const double apex = rng.uniform(r.projectile_apex_min, r.projectile_apex_max) * last;
      const double vx = rng.uniform(r.projectile_vx_min, r.projectile_vx_max) * (rng.bernoulli(0.5) ? 1.0 : -1.0);
      p.gravity = {0.0, g};
      p.v0 = {vx, -g * apex};
      p.floor_bounce = true;
      double ymin = 0.0, ymax = 0.0;
      for (std::size_t i = 0; i < frames; ++i) {
        const double t = static_cast<double>(i);
        const double y = p.v0.y * t + 0.5 * g * t * t;
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
      const double dx = vx * last;
      p.p0 = {place(rng, b.min_x, b.max_x, std::min(0.0, dx), std::max(0.0, dx)),
              place(rng, b.min_y, b.max_y, ymin, ymax)};
      break;
    }
    case MotionType::Oscillatory: {
      p.amplitude = rng.uniform(r.oscillation_amplitude_min, r.oscillation_amplitude_max);
      const double period = rng.uniform(r.oscillation_period_min, r.oscillation_period_max);
      p.angular_rate = 2.0 * std::numbers::pi / period;
      p.p0 = {place(rng, b.min_x, b.max_x, -p.amplitude, p.amplitude),
              place(rng, b.min_y, b.max_y, -p.amplitude, p.amplitude)};
      break;
    }
    case MotionType::Local: {
      p.jitter_radius = rng.uniform(r.jitter_radius_min, r.jitter_radius_max);
      p.p0 = {place(rng, b.min_x, b.max_x, -p.jitter_radius, p.jitter_radius),
              place(rng, b.min_y, b.max_y, -p.jitter_radius, p.jitter_radius)};
      break;
    }
    case MotionType::Random: {
      p.min_speed = r.random_speed_min;
      p.max_speed = r.random_speed_max;
      p.direction_change_prob = r.random_direction_change_prob;
      p.p0 = {rng.uniform(b.min_x, b.max_x), rng.uniform(b.min_y, b.max_y)};
      break;
    }
  }
  return p;
}

}  // namespace motion::synth
