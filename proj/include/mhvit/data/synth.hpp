#pragma once

#include <array>

#include "mhvit/data/dataset.hpp"
#include "mhvit/errors.hpp"

namespace mhvit {

// Synthetic 3-class stand-in for MRI slices. Each class is a bright
// Gaussian blob at a class-specific location (0: upper-left, 1: center,
// 2: lower-right) plus additive uniform noise whose amplitude is the
// difficulty knob.
struct SynthSpec {
  int n_samples = 600;
  int image_size = 32;
  double difficulty = 0.3;  // noise amplitude in [0,1]
  std::uint64_t seed = 0;

  void validate() const {
    if (n_samples < 3) throw ConfigError("synthetic dataset needs n_samples >= 3");
    if (image_size < 4) throw ConfigError("synthetic dataset needs image_size >= 4");
    if (difficulty < 0.0 || difficulty > 1.0) throw ConfigError("difficulty must be in [0,1]");
  }
};

inline Dataset generate_synthetic(const SynthSpec& spec) {
  spec.validate();
  static constexpr std::array<std::array<double, 2>, 3> kCenters = {
      {{0.25, 0.25}, {0.5, 0.5}, {0.75, 0.75}}};
  Rng rng(spec.seed);
  const int sz = spec.image_size;
  const double sigma = sz / 8.0;
  Dataset ds;
  ds.split = SplitTag::Full;
  ds.images.reserve(spec.n_samples);
  for (int i = 0; i < spec.n_samples; ++i) {
    LabeledImage img;
    img.label = i % 3;  // round-robin keeps class counts balanced within 1
    img.pixels = Tensor({sz, sz, 1});
    const double cr = kCenters[img.label][0] * sz;
    const double cc = kCenters[img.label][1] * sz;
    for (int r = 0; r < sz; ++r)
      for (int c = 0; c < sz; ++c) {
        const double d2 = (r - cr) * (r - cr) + (c - cc) * (c - cc);
        double v = std::exp(-d2 / (2.0 * sigma * sigma));
        if (spec.difficulty > 0.0)
          v += uniform(rng, -spec.difficulty / 2.0, spec.difficulty / 2.0);
        img.pixels.data[static_cast<std::size_t>(r) * sz + c] = std::clamp(v, 0.0, 1.0);
      }
    ds.images.push_back(std::move(img));
  }
  return ds;
}

struct SplitFractions {
  double train = 0.68;
  double test = 0.20;
  double validation = 0.12;
};

// Stratified shuffle split: per class, a seeded shuffle followed by
// contiguous slices sized round(frac * class_count), remainder to validation.
inline std::array<Dataset, 3> split(const Dataset& ds, const SplitFractions& f,
                                    std::uint64_t seed) {
  if (std::abs(f.train + f.test + f.validation - 1.0) > 1e-9)
    throw ConfigError("split fractions must sum to 1");
  std::array<std::vector<int>, 3> by_class;
  for (int i = 0; i < static_cast<int>(ds.images.size()); ++i) {
    const int lab = ds.images[i].label;
    if (lab < 0 || lab > 2) throw ConfigError("label out of range in dataset");
    by_class[lab].push_back(i);
  }
  for (const auto& idx : by_class)
    if (idx.empty()) throw ConfigError("stratified split requires every class present");

  std::array<Dataset, 3> out;
  out[0].split = SplitTag::Train;
  out[1].split = SplitTag::Test;
  out[2].split = SplitTag::Validation;
  Rng rng(seed);
  for (auto& idx : by_class) {
    std::shuffle(idx.begin(), idx.end(), rng);
    const int nc = static_cast<int>(idx.size());
    const int n_train = static_cast<int>(std::floor(f.train * nc + 0.5));
    const int n_test = static_cast<int>(std::floor(f.test * nc + 0.5));
    for (int i = 0; i < nc; ++i) {
      const int dest = i < n_train ? 0 : (i < n_train + n_test ? 1 : 2);
      out[dest].images.push_back(ds.images[idx[i]]);
    }
  }
  return out;
}

}  // namespace mhvit
