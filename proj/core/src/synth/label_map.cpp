#include "motion/synth/label_map.hpp"

#include "motion/error.hpp"
#include "motion/util/binary_io.hpp"
#include "motion/util/csv.hpp"

namespace motion::synth {

std::optional<MotionType> LabelMap::find(std::string_view action) const {
  for (const auto& [name, type] : entries) {
    if (name == action) return type;
  }
  return std::nullopt;
}

std::array<std::size_t, kNumMotionTypes> LabelMap::histogram() const {
  std::array<std::size_t, kNumMotionTypes> h{};
  for (const auto& e : entries) ++h[code(e.second)];
  return h;
}

LabelMap parse_label_map(std::string_view csv) {
  const auto lines = io::split_lines(csv);
  if (lines.empty() || io::split_csv_fields(lines[0]) != std::vector<std::string>{"action", "motion_type"}) {
    throw FormatError("label map: expected header \"action,motion_type\"");
  }
  LabelMap map;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto fields = io::split_csv_fields(lines[i]);
    if (fields.size() != 2 || fields[0].empty()) {
      throw FormatError("label map line " + std::to_string(i + 1) + ": expected two fields");
    }
    const auto type = parse_motion_type(fields[1]);
    if (!type) throw FormatError("label map line " + std::to_string(i + 1) + ": unknown motion type '" + fields[1] + "'");
    if (map.find(fields[0])) throw FormatError("label map: duplicate action '" + fields[0] + "'");
    map.entries.emplace_back(fields[0], *type);
  }
  return map;
}

LabelMap load_label_map(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  return parse_label_map(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

}  // namespace motion::synth
