#pragma once

#include <cstring>
#include <fstream>

#include "mhvit/vit/model.hpp"

namespace mhvit {

constexpr char kCheckpointMagic[4] = {'S', 'V', 'I', 'T'};
constexpr std::uint16_t kCheckpointVersion = 1;

// Layout: magic "SVIT", u16 version, then the config as little-endian
// i32 fields (image_size, channels, patch_size, embed_dim, num_layers,
// num_heads, head_dim, mlp_hidden, num_classes) and f64 dropout, then each
// parameter tensor as f64 little-endian in for_each_param order.
inline void save_model(const ViTModel& model, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ParseError("cannot open for writing: " + path);
  auto w32 = [&](std::int32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); };
  os.write(kCheckpointMagic, 4);
  std::uint16_t ver = kCheckpointVersion;
  os.write(reinterpret_cast<const char*>(&ver), 2);
  const ViTConfig& c = model.cfg;
  w32(c.image_size); w32(c.channels); w32(c.patch_size); w32(c.embed_dim);
  w32(c.num_layers); w32(c.num_heads); w32(c.head_dim); w32(c.mlp_hidden);
  w32(c.num_classes);
  os.write(reinterpret_cast<const char*>(&c.dropout), 8);
  model.for_each_param([&](const std::string&, const Tensor& t) {
    os.write(reinterpret_cast<const char*>(t.data.data()),
             static_cast<std::streamsize>(t.data.size() * 8));
  });
  if (!os) throw ParseError("write failed: " + path);
}

inline ViTModel load_model(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ParseError("cannot open: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kCheckpointMagic, 4) != 0)
    throw ParseError("bad magic bytes, not a model checkpoint: " + path);
  std::uint16_t ver = 0;
  is.read(reinterpret_cast<char*>(&ver), 2);
  if (!is || ver != kCheckpointVersion)
    throw ParseError("unsupported checkpoint version " + std::to_string(ver));
  auto r32 = [&]() {
    std::int32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), 4);
    return v;
  };
  ViTConfig c;
  c.image_size = r32(); c.channels = r32(); c.patch_size = r32(); c.embed_dim = r32();
  c.num_layers = r32(); c.num_heads = r32(); c.head_dim = r32(); c.mlp_hidden = r32();
  c.num_classes = r32();
  is.read(reinterpret_cast<char*>(&c.dropout), 8);
  if (!is) throw ParseError("truncated checkpoint header: " + path);
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw ParseError(std::string("checkpoint header invalid: ") + e.what());
  }
  ViTModel model(c);
  model.for_each_param([&](const std::string& name, Tensor& t) {
    is.read(reinterpret_cast<char*>(t.data.data()),
            static_cast<std::streamsize>(t.data.size() * 8));
    if (!is) throw ParseError("truncated checkpoint at tensor " + name);
  });
  return model;
}

}  // namespace mhvit
