#pragma once

#include <cstring>
#include <fstream>

#include "mhvit/data/dataset.hpp"
#include "mhvit/errors.hpp"

namespace mhvit {

namespace detail {

// Assumes a little-endian host with IEEE-754 floats, which covers every
// platform this builds on; checked at compile time where possible.
static_assert(sizeof(float) == 4);

template <typename T>
void write_le(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_le(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw ParseError("unexpected end of file");
  return v;
}

}  // namespace detail

constexpr char kDatasetMagic[4] = {'S', 'V', 'D', 'S'};
constexpr std::uint16_t kDatasetVersion = 1;

// Layout: magic "SVDS", u16 version, u32 count, u16 image_size,
// u8 channels, u8 split tag, then per sample a u8 label followed by
// image_size^2 * channels little-endian float32 pixels.
inline void save_dataset(const Dataset& ds, const std::string& path) {
  if (ds.images.empty()) throw ConfigError("refusing to save an empty dataset");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ParseError("cannot open for writing: " + path);
  os.write(kDatasetMagic, 4);
  detail::write_le<std::uint16_t>(os, kDatasetVersion);
  detail::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(ds.images.size()));
  const int sz = ds.image_size();
  const int ch = ds.images.front().pixels.shape[2];
  detail::write_le<std::uint16_t>(os, static_cast<std::uint16_t>(sz));
  detail::write_le<std::uint8_t>(os, static_cast<std::uint8_t>(ch));
  detail::write_le<std::uint8_t>(os, static_cast<std::uint8_t>(ds.split));
  for (const auto& img : ds.images) {
    if (img.pixels.shape[0] != sz || img.pixels.shape[2] != ch)
      throw ConfigError("dataset contains mixed image shapes");
    detail::write_le<std::uint8_t>(os, static_cast<std::uint8_t>(img.label));
    for (double v : img.pixels.data) detail::write_le<float>(os, static_cast<float>(v));
  }
  if (!os) throw ParseError("write failed: " + path);
}

inline Dataset load_dataset(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ParseError("cannot open: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kDatasetMagic, 4) != 0)
    throw ParseError("bad magic bytes, not a dataset file: " + path);
  const auto version = detail::read_le<std::uint16_t>(is);
  if (version != kDatasetVersion)
    throw ParseError("unsupported dataset version " + std::to_string(version));
  const auto count = detail::read_le<std::uint32_t>(is);
  const int sz = detail::read_le<std::uint16_t>(is);
  const int ch = detail::read_le<std::uint8_t>(is);
  const auto split_raw = detail::read_le<std::uint8_t>(is);
  if (count == 0) throw ParseError("dataset file contains no samples");
  if (sz == 0 || ch == 0) throw ParseError("dataset header has zero image size or channels");
  if (split_raw > 3) throw ParseError("dataset header has an unknown split tag");
  Dataset ds;
  ds.split = static_cast<SplitTag>(split_raw);
  ds.images.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    LabeledImage img;
    img.label = detail::read_le<std::uint8_t>(is);
    if (img.label > 2) throw ParseError("sample label out of range");
    img.pixels = Tensor({sz, sz, ch});
    for (double& v : img.pixels.data) v = detail::read_le<float>(is);
    ds.images.push_back(std::move(img));
  }
  return ds;
}

}  // namespace mhvit
