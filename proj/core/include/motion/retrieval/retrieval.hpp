#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "motion/model/config.hpp"
#include "motion/model/network.hpp"
#include "motion/synth/dataset.hpp"
#include "motion/synth/motion_type.hpp"

namespace motion::retrieval {

struct FeatureRecord {
  std::string id;
  std::vector<float> vector;
  std::optional<MotionType> label;

  bool operator==(const FeatureRecord&) const = default;
};

/// Fixed-dimension id -> feature records, in insertion order.
class FeatureStore {
 public:
  explicit FeatureStore(std::size_t dim = 0) : dim_(dim) {}

  /// Throws ShapeError on a length mismatch and ConfigError on a repeated id.
  void add(FeatureRecord record);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  const std::vector<FeatureRecord>& records() const noexcept { return records_; }
  const FeatureRecord* find(std::string_view id) const;

  bool operator==(const FeatureStore& o) const { return dim_ == o.dim_ && records_ == o.records_; }

 private:
  std::size_t dim_;
  std::vector<FeatureRecord> records_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline constexpr std::uint8_t kUnlabeled = 255;

/// "MTFS" | u32 F | u32 N | N x ( u32 id_len | id | u8 label | F x f32 )
std::vector<std::uint8_t> encode_store(const FeatureStore& store);
FeatureStore decode_store(std::span<const std::uint8_t> bytes);
void save_store(const std::filesystem::path& path, const FeatureStore& store);
FeatureStore load_store(const std::filesystem::path& path);

struct ExtractFailure {
  std::string id;
  std::string message;
};

struct ExtractResult {
  FeatureStore store;
  std::vector<ExtractFailure> failures;
};

/// Consensus features under eval preprocessing. A clip that fails is recorded
/// in `failures` and skipped. Output order follows input order for any thread count.
ExtractResult extract_features(std::span<const video::Clip> clips, std::span<const std::optional<MotionType>> labels,
                               const model::ModelParams& params, const model::ModelConfig& cfg,
                               unsigned threads = 1);
ExtractResult extract_features(std::span<const synth::LabeledClip> clips, const model::ModelParams& params,
                               const model::ModelConfig& cfg, unsigned threads = 1);

enum class Metric { L2, Cosine };

std::string_view to_string(Metric m) noexcept;
std::optional<Metric> parse_metric(std::string_view name);

/// Euclidean distance, or 1 - cosine similarity (0 similarity for a zero vector).
double distance(std::span<const float> a, std::span<const float> b, Metric metric);

struct Neighbor {
  std::string id;
  double distance = 0.0;
  std::optional<MotionType> label;
};

/// Exact k nearest records, ascending by distance then id.
std::vector<Neighbor> knn(const FeatureStore& store, std::span<const float> query, std::size_t k,
                          Metric metric = Metric::L2, std::optional<std::string_view> exclude_id = std::nullopt);

/// Mean over records of the fraction of their leave-one-out top-k neighbours
/// that share the record's label.
double retrieval_accuracy(const FeatureStore& store, std::size_t k, Metric metric = Metric::L2);

/// query_id,rank,neighbor_id,distance,neighbor_label
std::string neighbors_csv_header();
std::string neighbors_csv_rows(std::string_view query_id, std::span<const Neighbor> neighbors);

}  // namespace motion::retrieval
