#include "motion/synth/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <thread>

#include "motion/error.hpp"
#include "motion/numerics/rng.hpp"
#include "motion/util/binary_io.hpp"
#include "motion/util/csv.hpp"
#include "motion/video/clip_io.hpp"

namespace motion::synth {

namespace fs = std::filesystem;

std::string_view to_string(Split s) noexcept {
  switch (s) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
  }
  return "unknown";
}

std::optional<Split> parse_split(std::string_view name) {
  for (Split s : {Split::Train, Split::Val, Split::Test}) {
    if (name == to_string(s)) return s;
  }
  return std::nullopt;
}

const std::vector<LabeledClip>& Dataset::split(Split s) const {
  switch (s) {
    case Split::Train: return train;
    case Split::Val: return val;
    case Split::Test: return test;
  }
  return test;
}

std::vector<LabeledClip>& Dataset::split(Split s) {
  return const_cast<std::vector<LabeledClip>&>(std::as_const(*this).split(s));
}

void SplitFractions::validate() const {
  if (!(train > 0.0 && val > 0.0 && test > 0.0)) throw ConfigError("split fractions must be positive");
  if (std::abs(train + val + test - 1.0) > 1e-9) throw ConfigError("split fractions must sum to 1");
}

std::array<std::size_t, 3> split_counts(std::size_t n, const SplitFractions& f) {
  f.validate();
  const double dn = static_cast<double>(n);
  std::size_t tr = static_cast<std::size_t>(std::llround(f.train * dn));
  std::size_t va = static_cast<std::size_t>(std::llround(f.val * dn));
  tr = std::min(tr, n);
  va = std::min(va, n - tr);
  return {tr, va, n - tr - va};
}

std::string clip_id(MotionType type, std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "_%04zu", index);
  return std::string(to_string(type)) + buf;
}

std::uint64_t clip_seed(std::uint64_t master_seed, MotionType type, std::size_t index) {
  return mix_seed(master_seed, code(type), index);
}

LabeledClip generate_clip(const SynthConfig& cfg, MotionType type, std::size_t index) {
  cfg.validate();
  Rng rng(clip_seed(cfg.master_seed, type, index));
  const FrameBounds bounds = cfg.bounds();
  const TrajectoryParams params = sample_trajectory_params(type, cfg.ranges, bounds, cfg.frames, rng);
  const auto positions = gen_trajectory(type, params, cfg.frames, bounds, rng);
  LabeledClip lc{render_clip(positions, cfg, rng), type};
  lc.clip.id = clip_id(type, index);
  return lc;
}

std::vector<Split> assign_splits(const SynthConfig& cfg, MotionType type, const SplitFractions& f) {
  const auto counts = split_counts(cfg.clips_per_class, f);
  std::vector<std::pair<std::uint64_t, std::size_t>> order;
  order.reserve(cfg.clips_per_class);
  for (std::size_t i = 0; i < cfg.clips_per_class; ++i) {
    order.emplace_back(mix_seed(fnv1a(clip_id(type, i)), cfg.master_seed), i);
  }
  std::sort(order.begin(), order.end());
  std::vector<Split> splits(cfg.clips_per_class, Split::Test);
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    const std::size_t i = order[rank].second;
    if (rank < counts[0]) {
      splits[i] = Split::Train;
    } else if (rank < counts[0] + counts[1]) {
      splits[i] = Split::Val;
    }
  }
  return splits;
}

Dataset generate_dataset(const SynthConfig& cfg, const SplitFractions& f, unsigned threads) {
  cfg.validate();
  f.validate();
  const std::size_t n = cfg.clips_per_class;
  std::vector<LabeledClip> all(kNumMotionTypes * n);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) all[k] = generate_clip(cfg, kAllMotionTypes[k / n], k % n);
  };
  threads = std::max(1u, threads);
  if (threads == 1) {
    work(0, all.size());
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (all.size() + threads - 1) / threads;
    for (std::size_t b = 0; b < all.size(); b += chunk) pool.emplace_back(work, b, std::min(all.size(), b + chunk));
  }

  Dataset data;
  for (MotionType type : kAllMotionTypes) {
    const auto splits = assign_splits(cfg, type, f);
    for (std::size_t i = 0; i < n; ++i) data.split(splits[i]).push_back(std::move(all[code(type) * n + i]));
  }
  return data;
}

void write_dataset(const Dataset& data, const fs::path& dir) {
  std::error_code ec;
  std::ostringstream csv;
  csv << "path,label\n";
  for (Split s : {Split::Train, Split::Val, Split::Test}) {
    const fs::path sub = dir / to_string(s);
    fs::create_directories(sub, ec);
    if (ec) throw IoError("cannot create directory " + sub.string());
    for (const auto& lc : data.split(s)) {
      const std::string rel = std::string(to_string(s)) + "/" + lc.clip.id + ".mtc1";
      video::save_clip(lc.clip, dir / rel);
      csv << rel << ',' << to_string(lc.label) << '\n';
    }
  }
  io::write_text_atomic(dir / "labels.csv", csv.str());
}

Dataset gen_dataset(const SynthConfig& cfg, const SplitFractions& f, const fs::path& dir, unsigned threads) {
  Dataset data = generate_dataset(cfg, f, threads);
  write_dataset(data, dir);
  return data;
}

Dataset load_dataset(const fs::path& dir) {
  const auto bytes = io::read_file(dir / "labels.csv");
  const std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  const auto lines = io::split_lines(text);
  if (lines.empty() || io::split_csv_fields(lines[0]) != std::vector<std::string>{"path", "label"}) {
    throw FormatError("labels.csv: expected header \"path,label\"");
  }
  Dataset data;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto fields = io::split_csv_fields(lines[i]);
    if (fields.size() != 2) throw FormatError("labels.csv line " + std::to_string(i + 1) + ": expected two fields");
    const auto label = parse_motion_type(fields[1]);
    if (!label) throw FormatError("labels.csv line " + std::to_string(i + 1) + ": unknown label '" + fields[1] + "'");
    const fs::path rel(fields[0]);
    const auto split = parse_split(rel.begin()->string());
    if (!split) throw FormatError("labels.csv line " + std::to_string(i + 1) + ": path must start with train/, val/ or test/");
    data.split(*split).push_back({video::load_clip(dir / rel), *label});
  }
  return data;
}

}  // namespace motion::synth
