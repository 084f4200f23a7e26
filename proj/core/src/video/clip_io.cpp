#include "motion/video/clip_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "motion/error.hpp"
#include "motion/util/binary_io.hpp"

namespace motion::video {

namespace fs = std::filesystem;

std::vector<std::uint8_t> encode_clip(const Clip& clip) {
  clip.validate();
  io::ByteWriter w;
  w.magic("MTC1");
  w.u32(static_cast<std::uint32_t>(clip.frame_count));
  w.u32(static_cast<std::uint32_t>(clip.height));
  w.u32(static_cast<std::uint32_t>(clip.width));
  w.u32(static_cast<std::uint32_t>(clip.channels));
  w.raw(clip.pixels);
  return std::move(w.bytes());
}

Clip decode_clip(std::span<const std::uint8_t> bytes, std::string id) {
  io::ByteReader r(bytes, "MTC1 clip '" + id + "'");
  r.expect_magic("MTC1");
  Clip clip;
  clip.id = std::move(id);
  clip.frame_count = r.u32();
  clip.height = r.u32();
  clip.width = r.u32();
  clip.channels = r.u32();
  if (clip.frame_count == 0) throw EmptyClipError("MTC1 clip '" + clip.id + "' has no frames");
  const std::size_t n = clip.frame_count * clip.frame_size();
  if (r.remaining() < n) {
    throw FormatError("MTC1 clip '" + clip.id + "': payload has " + std::to_string(r.remaining()) +
                      " bytes, header requires " + std::to_string(n));
  }
  auto payload = r.raw(n);
  r.expect_end();
  clip.pixels.assign(payload.begin(), payload.end());
  clip.validate();
  return clip;
}

namespace {

std::string lower_extension(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return ext;
}

Clip load_image_sequence(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = lower_extension(entry.path());
    if (ext == ".pgm" || ext == ".png") files.push_back(entry.path());
  }
  if (files.empty()) throw EmptyClipError("no .pgm or .png frames in " + dir.string());
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });

  Clip clip;
  clip.id = dir.filename().empty() ? dir.parent_path().filename().string() : dir.filename().string();
  for (const auto& f : files) {
    const ImageU8 img = lower_extension(f) == ".pgm" ? read_pgm(f) : read_png(f);
    if (clip.frame_count == 0) {
      clip.height = img.height;
      clip.width = img.width;
      clip.channels = img.channels;
    } else if (img.height != clip.height || img.width != clip.width || img.channels != clip.channels) {
      throw FormatError("frame " + f.filename().string() + " differs in size from the first frame in " +
                        dir.string());
    }
    clip.pixels.insert(clip.pixels.end(), img.pixels.begin(), img.pixels.end());
    ++clip.frame_count;
  }
  clip.validate();
  return clip;
}

}  // namespace

Clip load_clip(const fs::path& path) {
  std::error_code ec;
  if (fs::is_directory(path, ec)) return load_image_sequence(path);
  if (!fs::exists(path, ec)) throw IoError("clip not found: " + path.string());
  return decode_clip(io::read_file(path), path.stem().string());
}

void save_clip(const Clip& clip, const fs::path& path) {
  io::write_file_atomic(path, encode_clip(clip));
}

void save_png_sequence(const Clip& clip, const fs::path& dir) {
  clip.validate();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string());
  for (std::size_t t = 0; t < clip.frame_count; ++t) {
    ImageU8 img(clip.height, clip.width, clip.channels);
    const auto f = clip.frame(t);
    std::copy(f.begin(), f.end(), img.pixels.begin());
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%05zu.png", t);
    write_png(img, dir / name);
  }
}

// --- PGM --------------------------------------------------------------------

namespace {

// Reads the next whitespace-delimited header token, skipping '#' comments.
std::string pgm_token(std::span<const std::uint8_t> bytes, std::size_t& pos) {
  for (;;) {
    while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
    if (pos < bytes.size() && bytes[pos] == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      continue;
    }
    break;
  }
  std::string tok;
  while (pos < bytes.size() && !std::isspace(bytes[pos])) tok.push_back(static_cast<char>(bytes[pos++]));
  return tok;
}

std::size_t pgm_number(std::span<const std::uint8_t> bytes, std::size_t& pos, const fs::path& path) {
  const std::string tok = pgm_token(bytes, pos);
  if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](unsigned char ch) { return std::isdigit(ch); })) {
    throw FormatError("PGM " + path.string() + ": malformed header");
  }
  return std::stoul(tok);
}

}  // namespace

ImageU8 read_pgm(const fs::path& path) {
  const auto bytes = io::read_file(path);
  std::size_t pos = 0;
  const std::string magic = pgm_token(bytes, pos);
  if (magic != "P5" && magic != "P2") throw FormatError("PGM " + path.string() + ": bad magic");
  const std::size_t w = pgm_number(bytes, pos, path);
  const std::size_t h = pgm_number(bytes, pos, path);
  const std::size_t maxval = pgm_number(bytes, pos, path);
  if (w == 0 || h == 0 || maxval == 0 || maxval > 255) {
    throw FormatError("PGM " + path.string() + ": unsupported dimensions or maxval");
  }
  ImageU8 img(h, w, 1);
  auto scale = [maxval](std::size_t v) {
    return static_cast<std::uint8_t>(maxval == 255 ? v : (v * 255 + maxval / 2) / maxval);
  };
  if (magic == "P5") {
    ++pos;  // single whitespace byte after maxval
    if (bytes.size() < pos + w * h) throw FormatError("PGM " + path.string() + ": truncated");
    for (std::size_t i = 0; i < w * h; ++i) img.pixels[i] = scale(bytes[pos + i]);
  } else {
    for (std::size_t i = 0; i < w * h; ++i) {
      const std::size_t v = pgm_number(bytes, pos, path);
      if (v > maxval) throw FormatError("PGM " + path.string() + ": sample exceeds maxval");
      img.pixels[i] = scale(v);
    }
  }
  return img;
}

void write_pgm(const ImageU8& image, const fs::path& path) {
  if (image.channels != 1) throw FormatError("PGM output requires a single-channel image");
  std::string header = "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  std::vector<std::uint8_t> bytes(header.begin(), header.end());
  bytes.insert(bytes.end(), image.pixels.begin(), image.pixels.end());
  io::write_file_atomic(path, bytes);
}

// --- PNG --------------------------------------------------------------------

ImageU8 read_png(const fs::path& path) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str())) {
    throw FormatError("PNG " + path.string() + ": " + png.message);
  }
  const bool gray = (png.format & PNG_FORMAT_FLAG_COLOR) == 0;
  png.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  ImageU8 img(png.height, png.width, gray ? 1 : 3);
  if (!png_image_finish_read(&png, nullptr, img.pixels.data(), 0, nullptr)) {
    const std::string msg = png.message;
    png_image_free(&png);
    throw FormatError("PNG " + path.string() + ": " + msg);
  }
  return img;
}

void write_png(const ImageU8& image, const fs::path& path) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width);
  png.height = static_cast<png_uint_32>(image.height);
  png.format = image.channels == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&png, nullptr, &size, 0, image.pixels.data(), 0, nullptr)) {
    throw IoError("PNG encode failed for " + path.string() + ": " + png.message);
  }
  std::vector<std::uint8_t> buffer(size);
  if (!png_image_write_to_memory(&png, buffer.data(), &size, 0, image.pixels.data(), 0, nullptr)) {
    throw IoError("PNG encode failed for " + path.string() + ": " + png.message);
  }
  buffer.resize(size);
  io::write_file_atomic(path, buffer);
}

}  // namespace motion::video
