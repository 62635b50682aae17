#pragma once

#include "mhvit/data/dataset.hpp"

namespace mhvit {

inline Tensor flip_horizontal(const Tensor& image) {
  const int h = image.shape[0], w = image.shape[1], c = image.shape[2];
  Tensor out({h, w, c});
  for (int r = 0; r < h; ++r)
    for (int col = 0; col < w; ++col)
      for (int ch = 0; ch < c; ++ch)
        out.data[(static_cast<std::size_t>(r) * w + col) * c + ch] =
            image.data[(static_cast<std::size_t>(r) * w + (w - 1 - col)) * c + ch];
  return out;
}

// Rotation about the image center by angle_deg, nearest-neighbor sampling,
// zero padding outside the source canvas. Output canvas matches the input.
inline Tensor rotate_nearest(const Tensor& image, double angle_deg) {
  const int h = image.shape[0], w = image.shape[1], c = image.shape[2];
  const double rad = angle_deg * 3.14159265358979323846 / 180.0;
  const double cs = std::cos(rad), sn = std::sin(rad);
  const double cy = (h - 1) / 2.0, cx = (w - 1) / 2.0;
  Tensor out({h, w, c});
  for (int r = 0; r < h; ++r)
    for (int col = 0; col < w; ++col) {
      // inverse mapping: rotate destination back into the source frame
      const double sy = cy + (r - cy) * cs - (col - cx) * sn;
      const double sx = cx + (r - cy) * sn + (col - cx) * cs;
      const int ir = static_cast<int>(std::floor(sy + 0.5));
      const int ic = static_cast<int>(std::floor(sx + 0.5));
      if (ir >= 0 && ir < h && ic >= 0 && ic < w)
        for (int ch = 0; ch < c; ++ch)
          out.data[(static_cast<std::size_t>(r) * w + col) * c + ch] =
              image.data[(static_cast<std::size_t>(ir) * w + ic) * c + ch];
    }
  return out;
}

// Training-time augmentation: horizontal flip with probability 0.5, then
// rotation by an angle uniform in [-15, +15] degrees. Output clamped to [0,1].
inline Tensor augment(const Tensor& image, Rng& rng) {
  Tensor out = image;
  if (uniform01(rng) < 0.5) out = flip_horizontal(out);
  const double angle = uniform(rng, -15.0, 15.0);
  out = rotate_nearest(out, angle);
  for (double& v : out.data) v = std::clamp(v, 0.0, 1.0);
  return out;
}

// Bilinear resize with pixel-center alignment. The identity when
// target equals the source size.
inline Tensor resize(const Tensor& image, int target) {
  if (target < 1) throw std::invalid_argument("resize target must be >= 1");
  const int h = image.shape[0], w = image.shape[1], c = image.shape[2];
  if (target == h && target == w) return image;
  Tensor out({target, target, c});
  const double sy = static_cast<double>(h) / target;
  const double sx = static_cast<double>(w) / target;
  for (int r = 0; r < target; ++r)
    for (int col = 0; col < target; ++col) {
      const double fy = std::clamp((r + 0.5) * sy - 0.5, 0.0, h - 1.0);
      const double fx = std::clamp((col + 0.5) * sx - 0.5, 0.0, w - 1.0);
      const int y0 = static_cast<int>(std::floor(fy));
      const int x0 = static_cast<int>(std::floor(fx));
      const int y1 = std::min(y0 + 1, h - 1);
      const int x1 = std::min(x0 + 1, w - 1);
      const double wy = fy - y0, wx = fx - x0;
      for (int ch = 0; ch < c; ++ch) {
        auto px = [&](int y, int x) {
          return image.data[(static_cast<std::size_t>(y) * w + x) * c + ch];
        };
        out.data[(static_cast<std::size_t>(r) * target + col) * c + ch] =
            (1 - wy) * ((1 - wx) * px(y0, x0) + wx * px(y0, x1)) +
            wy * ((1 - wx) * px(y1, x0) + wx * px(y1, x1));
      }
    }
  return out;
}

}  // namespace mhvit
