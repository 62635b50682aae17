#pragma once

#include <string>

#include "mhvit/vit/tensor.hpp"

namespace mhvit {

enum class SplitTag : std::uint8_t { Full = 0, Train = 1, Test = 2, Validation = 3 };

inline const char* to_string(SplitTag t) {
  switch (t) {
    case SplitTag::Full: return "full";
    case SplitTag::Train: return "train";
    case SplitTag::Test: return "test";
    case SplitTag::Validation: return "validation";
  }
  return "?";
}

// Single-channel image with pixels in [0,1] and a class label
// (0=AD, 1=MCI, 2=HC).
struct LabeledImage {
  Tensor pixels;  // (size, size, 1)
  int label = 0;
};

struct Dataset {
  std::vector<LabeledImage> images;
  SplitTag split = SplitTag::Full;

  int image_size() const { return images.empty() ? 0 : images.front().pixels.shape[0]; }
};

}  // namespace mhvit
