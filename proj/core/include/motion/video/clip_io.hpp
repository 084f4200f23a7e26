#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "motion/video/clip.hpp"

namespace motion::video {

inline constexpr std::size_t kClipHeaderBytes = 20;

/// MTC1, little-endian: "MTC1" | u32 T | u32 H | u32 W | u32 C | T*H*W*C u8.
std::vector<std::uint8_t> encode_clip(const Clip& clip);
Clip decode_clip(std::span<const std::uint8_t> bytes, std::string id = {});

/// Loads either an MTC1 file or a directory of .pgm / .png frames taken in
/// lexicographic filename order. The clip id is the file or directory stem.
Clip load_clip(const std::filesystem::path& path);

/// Writes MTC1 atomically (no partial file on failure).
void save_clip(const Clip& clip, const std::filesystem::path& path);

/// Writes frame_00000.png ... into `dir`, creating it if needed.
void save_png_sequence(const Clip& clip, const std::filesystem::path& dir);

ImageU8 read_pgm(const std::filesystem::path& path);
void write_pgm(const ImageU8& image, const std::filesystem::path& path);
ImageU8 read_png(const std::filesystem::path& path);
void write_png(const ImageU8& image, const std::filesystem::path& path);

}  // namespace motion::video
