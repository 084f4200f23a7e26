#include "motion/retrieval/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "motion/error.hpp"
#include "motion/model/inference.hpp"
#include "motion/util/binary_io.hpp"

namespace motion::retrieval {

void FeatureStore::add(FeatureRecord record) {
  if (record.vector.size() != dim_) {
    throw ShapeError("feature store holds " + std::to_string(dim_) + "-d vectors, got " +
                     std::to_string(record.vector.size()) + " for '" + record.id + "'");
  }
  if (index_.contains(record.id)) throw ConfigError("duplicate feature id '" + record.id + "'");
  index_.emplace(record.id, records_.size());
  records_.push_back(std::move(record));
}

const FeatureRecord* FeatureStore::find(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &records_[it->second];
}

std::vector<std::uint8_t> encode_store(const FeatureStore& store) {
  io::ByteWriter w;
  w.magic("MTFS");
  w.u32(static_cast<std::uint32_t>(store.dim()));
  w.u32(static_cast<std::uint32_t>(store.size()));
  for (const auto& r : store.records()) {
    w.string(r.id);
    w.u8(r.label ? code(*r.label) : kUnlabeled);
    for (float v : r.vector) w.f32(v);
  }
  return std::move(w.bytes());
}

FeatureStore decode_store(std::span<const std::uint8_t> bytes) {
  io::ByteReader r(bytes, "feature store");
  r.expect_magic("MTFS");
  const std::size_t dim = r.u32();
  const std::size_t n = r.u32();
  FeatureStore store(dim);
  for (std::size_t i = 0; i < n; ++i) {
    FeatureRecord rec;
    rec.id = r.string();
    const std::uint8_t label = r.u8();
    if (label != kUnlabeled) {
      rec.label = motion_type_from_code(label);
      if (!rec.label) throw FormatError("feature store: invalid label code " + std::to_string(label));
    }
    rec.vector.resize(dim);
    for (float& v : rec.vector) v = r.f32();
    store.add(std::move(rec));
  }
  r.expect_end();
  return store;
}

void save_store(const std::filesystem::path& path, const FeatureStore& store) {
  io::write_file_atomic(path, encode_store(store));
}

FeatureStore load_store(const std::filesystem::path& path) { return decode_store(io::read_file(path)); }

ExtractResult extract_features(std::span<const video::Clip> clips, std::span<const std::optional<MotionType>> labels,
                               const model::ModelParams& params, const model::ModelConfig& cfg, unsigned threads) {
  if (!labels.empty() && labels.size() != clips.size()) {
    throw ShapeError("extract_features: " + std::to_string(labels.size()) + " labels for " +
                     std::to_string(clips.size()) + " clips");
  }
  model::check_params(params, cfg);
  struct Slot {
    std::vector<float> vector;
    std::string error;
  };
  std::vector<Slot> slots(clips.size());
  auto work = [&](std::size_t begin, std::size_t step) {
    for (std::size_t i = begin; i < clips.size(); i += step) {
      try {
        const auto f = model::extract_feature(clips[i], params, cfg);
        slots[i].vector.assign(f.data().begin(), f.data().end());
      } catch (const std::exception& e) {
        slots[i].error = e.what();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(clips.size())));
  if (n <= 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(work, t, n);
  }

  ExtractResult out{FeatureStore(cfg.feature_dim), {}};
  for (std::size_t i = 0; i < clips.size(); ++i) {
    if (!slots[i].error.empty()) {
      out.failures.push_back({clips[i].id, slots[i].error});
      continue;
    }
    out.store.add({clips[i].id, std::move(slots[i].vector), labels.empty() ? std::nullopt : labels[i]});
  }
  return out;
}

ExtractResult extract_features(std::span<const synth::LabeledClip> clips, const model::ModelParams& params,
                               const model::ModelConfig& cfg, unsigned threads) {
  std::vector<video::Clip> raw;
  std::vector<std::optional<MotionType>> labels;
  raw.reserve(clips.size());
  for (const auto& lc : clips) {
    raw.push_back(lc.clip);
    labels.emplace_back(lc.label);
  }
  return extract_features(raw, labels, params, cfg, threads);
}

std::string_view to_string(Metric m) noexcept { return m == Metric::L2 ? "l2" : "cosine"; }

std::optional<Metric> parse_metric(std::string_view name) {
  if (name == "l2" || name == "L2") return Metric::L2;
  if (name == "cosine") return Metric::Cosine;
  return std::nullopt;
}

double distance(std::span<const float> a, std::span<const float> b, Metric metric) {
  if (a.size() != b.size()) {
    throw ShapeError("distance: vectors of length " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  if (metric == Metric::L2) {
    double ss = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = static_cast<double>(a[i]) - b[i];
      ss += d * d;
    }
    return std::sqrt(ss);
  }
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += static_cast<double>(a[i]) * b[i];
    aa += static_cast<double>(a[i]) * a[i];
    bb += static_cast<double>(b[i]) * b[i];
  }
  if (aa == 0.0 || bb == 0.0) return 1.0;
  return 1.0 - ab / std::sqrt(aa * bb);
}

std::vector<Neighbor> knn(const FeatureStore& store, std::span<const float> query, std::size_t k, Metric metric,
                          std::optional<std::string_view> exclude_id) {
  if (k == 0) throw ConfigError("knn: k must be at least 1");
  if (query.size() != store.dim()) {
    throw ShapeError("knn: query has " + std::to_string(query.size()) + " dims, store has " +
                     std::to_string(store.dim()));
  }
  std::vector<Neighbor> all;
  all.reserve(store.size());
  for (const auto& r : store.records()) {
    if (exclude_id && r.id == *exclude_id) continue;
    all.push_back({r.id, distance(query, r.vector, metric), r.label});
  }
  if (all.empty()) throw EmptyStoreError("knn: no candidate records");
  const auto less = [](const Neighbor& a, const Neighbor& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.id < b.id;
  };
  const std::size_t m = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(m), all.end(), less);
  all.resize(m);
  return all;
}

double retrieval_accuracy(const FeatureStore& store, std::size_t k, Metric metric) {
  if (store.empty()) throw EmptyStoreError("retrieval_accuracy: empty store");
  for (const auto& r : store.records()) {
    if (!r.label) throw LabelError("retrieval_accuracy: record '" + r.id + "' is unlabeled");
  }
  if (store.size() <= k) throw ConfigError("retrieval_accuracy: store must hold more than k records");
  double total = 0.0;
  for (const auto& r : store.records()) {
    const auto nn = knn(store, r.vector, k, metric, r.id);
    const auto same = std::count_if(nn.begin(), nn.end(), [&](const Neighbor& n) { return n.label == r.label; });
    total += static_cast<double>(same) / static_cast<double>(nn.size());
  }
  return total / static_cast<double>(store.size());
}

std::string neighbors_csv_header() { return "query_id,rank,neighbor_id,distance,neighbor_label\n"; }

std::string neighbors_csv_rows(std::string_view query_id, std::span<const Neighbor> neighbors) {
  std::ostringstream os;
  os.precision(9);
  for (std::size_t i = 0; i < neighbors.size(); ++i) {
    const auto& n = neighbors[i];
    os << query_id << ',' << i + 1 << ',' << n.id << ',' << n.distance << ','
       << (n.label ? to_string(*n.label) : std::string_view()) << '\n';
  }
  return os.str();
}

}  // namespace motion::retrieval
