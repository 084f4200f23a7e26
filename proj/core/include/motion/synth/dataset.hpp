#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "motion/synth/motion_type.hpp"
#include "motion/synth/render.hpp"
#include "motion/video/clip.hpp"

namespace motion::synth {

enum class Split { Train, Val, Test };

std::string_view to_string(Split s) noexcept;
std::optional<Split> parse_split(std::string_view name);

struct LabeledClip {
  video::Clip clip;
  MotionType label = MotionType::Linear;
};

struct Dataset {
  std::vector<LabeledClip> train;
  std::vector<LabeledClip> val;
  std::vector<LabeledClip> test;

  const std::vector<LabeledClip>& split(Split s) const;
  std::vector<LabeledClip>& split(Split s);
};

struct SplitFractions {
  double train = 2.0 / 3.0;
  double val = 1.0 / 6.0;
  double test = 1.0 / 6.0;

  /// Throws ConfigError unless all fractions are positive and sum to 1.
  void validate() const;
};

/// Per-class split sizes: train = round(f_train n), val = round(f_val n), test = rest.
std::array<std::size_t, 3> split_counts(std::size_t clips_per_class, const SplitFractions& f);

/// Stable clip id, e.g. "projectile_0007".
std::string clip_id(MotionType type, std::size_t index);

/// Per-clip seed derived from (master seed, class code, index).
std::uint64_t clip_seed(std::uint64_t master_seed, MotionType type, std::size_t index);

/// Draws parameters, trajectory and rendering for one clip.
LabeledClip generate_clip(const SynthConfig& cfg, MotionType type, std::size_t index);

/// Split assignment: within each class, clips are ordered by a hash of
/// (clip id, master seed) and cut into train / val / test by split_counts.
std::vector<Split> assign_splits(const SynthConfig& cfg, MotionType type, const SplitFractions& f);

/// Full in-memory dataset; a pure function of (cfg, fractions).
Dataset generate_dataset(const SynthConfig& cfg, const SplitFractions& f, unsigned threads = 1);

/// Writes <dir>/<split>/<id>.mtc1 and <dir>/labels.csv ("path,label").
void write_dataset(const Dataset& data, const std::filesystem::path& dir);

/// generate_dataset followed by write_dataset.
Dataset gen_dataset(const SynthConfig& cfg, const SplitFractions& f, const std::filesystem::path& dir,
                    unsigned threads = 1);

/// Reads labels.csv; the first path component names the split.
Dataset load_dataset(const std::filesystem::path& dir);

}  // namespace motion::synth
