#include "motion/numerics/checkpoint.hpp"

#include "motion/util/binary_io.hpp"

namespace motion::nn {

std::vector<std::uint8_t> encode_checkpoint(std::span<const NamedTensor> tensors) {
  io::ByteWriter w;
  w.magic("MTCK");
  w.u16(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(tensors.size()));
  for (const auto& nt : tensors) {
    w.string(nt.name);
    w.u32(static_cast<std::uint32_t>(nt.tensor.rank()));
    for (std::size_t e : nt.tensor.shape()) w.u32(static_cast<std::uint32_t>(e));
    for (float v : nt.tensor.data()) w.f32(v);
  }
  return std::move(w.bytes());
}

std::vector<NamedTensor> decode_checkpoint(std::span<const std::uint8_t> bytes) {
  io::ByteReader r(bytes, "checkpoint");
  r.expect_magic("MTCK");
  const std::uint16_t version = r.u16();
  if (version != kCheckpointVersion) {
    throw FormatError("checkpoint: unsupported version " + std::to_string(version));
  }
  const std::uint32_t count = r.u32();
  std::vector<NamedTensor> out;
  for (std::uint32_t i = 0; i < count; ++i) {
    NamedTensor nt;
    nt.name = r.string();
    const std::uint32_t rank = r.u32();
    Shape shape(rank);
    for (auto& e : shape) e = r.u32();
    const std::size_t n = shape_size(shape);
    if (r.remaining() / sizeof(float) < n) throw FormatError("checkpoint: truncated tensor " + nt.name);
    std::vector<float> data(n);
    for (float& v : data) v = r.f32();
    nt.tensor = Tensor(std::move(shape), std::move(data));
    out.push_back(std::move(nt));
  }
  r.expect_end();
  return out;
}

void save_checkpoint(const std::filesystem::path& path, std::span<const NamedTensor> tensors) {
  io::write_file_atomic(path, encode_checkpoint(tensors));
}

std::vector<NamedTensor> load_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(io::read_file(path));
}

}  // namespace motion::nn
