#pragma once

// IDX files (the MNIST distribution format): big-endian header, then raw bytes.

#include <trdh/core.hpp>

#include <cstdint>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

namespace trdh {

struct IdxImages {
  std::uint32_t count = 0, rows = 0, cols = 0;
  std::vector<std::uint8_t> pixels;  // count * rows * cols, row-major per image

  bool operator==(const IdxImages&) const = default;
};

struct IdxLabels {
  std::vector<std::uint8_t> labels;

  bool operator==(const IdxLabels&) const = default;
};

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

namespace detail {

inline std::uint32_t read_be32(const std::vector<std::uint8_t>& buf, std::size_t offset) {
  if (offset + 4 > buf.size()) throw ParseError("idx: truncated header", offset);
  return (std::uint32_t(buf[offset]) << 24) | (std::uint32_t(buf[offset + 1]) << 16) |
         (std::uint32_t(buf[offset + 2]) << 8) | std::uint32_t(buf[offset + 3]);
}

inline void write_be32(std::vector<std::uint8_t>& buf, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) buf.push_back(std::uint8_t((v >> shift) & 0xff));
}

inline void expect_magic(const std::vector<std::uint8_t>& buf, std::uint32_t magic) {
  if (read_be32(buf, 0) != magic) throw ParseError("idx: bad magic number", 0);
}

}  // namespace detail

inline IdxImages parse_idx_images(const std::vector<std::uint8_t>& buf) {
  detail::expect_magic(buf, kIdxImageMagic);
  IdxImages img;
  img.count = detail::read_be32(buf, 4);
  img.rows = detail::read_be32(buf, 8);
  img.cols = detail::read_be32(buf, 12);
  const std::size_t size = std::size_t(img.count) * img.rows * img.cols;
  if (buf.size() < 16 + size) throw ParseError("idx: truncated pixel data", buf.size());
  if (buf.size() > 16 + size) throw ParseError("idx: trailing bytes", 16 + size);
  img.pixels.assign(buf.begin() + 16, buf.end());
  return img;
}

inline IdxLabels parse_idx_labels(const std::vector<std::uint8_t>& buf) {
  detail::expect_magic(buf, kIdxLabelMagic);
  const std::uint32_t count = detail::read_be32(buf, 4);
  if (buf.size() < 8 + std::size_t(count)) throw ParseError("idx: truncated label data", buf.size());
  if (buf.size() > 8 + std::size_t(count)) throw ParseError("idx: trailing bytes", 8 + std::size_t(count));
  return IdxLabels{std::vector<std::uint8_t>(buf.begin() + 8, buf.end())};
}

inline std::vector<std::uint8_t> serialize_idx(const IdxImages& img) {
  if (img.pixels.size() != std::size_t(img.count) * img.rows * img.cols)
    throw InvalidArgument("idx: pixel count does not match the header");
  std::vector<std::uint8_t> buf;
  buf.reserve(16 + img.pixels.size());
  for (std::uint32_t v : {kIdxImageMagic, img.count, img.rows, img.cols}) detail::write_be32(buf, v);
  buf.insert(buf.end(), img.pixels.begin(), img.pixels.end());
  return buf;
}

inline std::vector<std::uint8_t> serialize_idx(const IdxLabels& lab) {
  std::vector<std::uint8_t> buf;
  detail::write_be32(buf, kIdxLabelMagic);
  detail::write_be32(buf, std::uint32_t(lab.labels.size()));
  buf.insert(buf.end(), lab.labels.begin(), lab.labels.end());
  return buf;
}

inline std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_file_bytes(const std::string& path, const std::vector<std::uint8_t>& buf) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out.write(reinterpret_cast<const char*>(buf.data()), std::streamsize(buf.size()));
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace trdh
