#pragma once

#include <cassert>
#include <cmath>
#include <numeric>
#include <vector>

#include "mhvit/errors.hpp"
#include "mhvit/rng.hpp"

namespace mhvit {

// Shape-tagged row-major n-d array of doubles. The only numeric substrate
// the model uses; 2-d accessors cover the bulk of the math.
struct Tensor {
  std::vector<int> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<int> s) : shape(std::move(s)) {
    std::size_t n = 1;
    for (int d : shape) {
      if (d <= 0) throw std::invalid_argument("tensor dims must be positive");
      n *= static_cast<std::size_t>(d);
    }
    data.assign(n, 0.0);
  }

  static Tensor zeros(std::vector<int> s) { return Tensor(std::move(s)); }

  std::size_t size() const { return data.size(); }
  int rows() const { return shape.empty() ? 0 : shape[0]; }
  int cols() const { return shape.size() < 2 ? 1 : shape[1]; }

  double& operator()(int i, int j) {
    assert(shape.size() == 2);
    return data[static_cast<std::size_t>(i) * shape[1] + j];
  }
  double operator()(int i, int j) const {
    assert(shape.size() == 2);
    return data[static_cast<std::size_t>(i) * shape[1] + j];
  }
  double& operator[](std::size_t i) { return data[i]; }
  double operator[](std::size_t i) const { return data[i]; }

  void fill(double v) { std::fill(data.begin(), data.end(), v); }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }

  Tensor& operator+=(const Tensor& o) {
    assert(same_shape(o));
    for (std::size_t i = 0; i < data.size(); ++i) data[i] += o.data[i];
    return *this;
  }

  bool all_finite() const {
    for (double v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

// C = A(m,k) * B(k,n)
inline Tensor matmul(const Tensor& a, const Tensor& b) {
  assert(a.shape.size() == 2 && b.shape.size() == 2 && a.shape[1] == b.shape[0]);
  const int m = a.shape[0], k = a.shape[1], n = b.shape[1];
  Tensor c({m, n});
  for (int i = 0; i < m; ++i)
    for (int p = 0; p < k; ++p) {
      const double av = a(i, p);
      if (av == 0.0) continue;
      for (int j = 0; j < n; ++j) c(i, j) += av * b(p, j);
    }
  return c;
}

// C = A^T(m,k)^T... a is (k,m): returns a^T * b with a (k,m), b (k,n) -> (m,n)
inline Tensor matmul_tn(const Tensor& a, const Tensor& b) {
  assert(a.shape.size() == 2 && b.shape.size() == 2 && a.shape[0] == b.shape[0]);
  const int k = a.shape[0], m = a.shape[1], n = b.shape[1];
  Tensor c({m, n});
  for (int p = 0; p < k; ++p)
    for (int i = 0; i < m; ++i) {
      const double av = a(p, i);
      if (av == 0.0) continue;
      for (int j = 0; j < n; ++j) c(i, j) += av * b(p, j);
    }
  return c;
}

// a (m,k), b (n,k) -> a * b^T (m,n)
inline Tensor matmul_nt(const Tensor& a, const Tensor& b) {
  assert(a.shape.size() == 2 && b.shape.size() == 2 && a.shape[1] == b.shape[1]);
  const int m = a.shape[0], k = a.shape[1], n = b.shape[0];
  Tensor c({m, n});
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int p = 0; p < k; ++p) s += a(i, p) * b(j, p);
      c(i, j) = s;
    }
  return c;
}

// y = x(m,k) * w(k,n) + b(n), b broadcast over rows
inline Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) {
  Tensor y = matmul(x, w);
  assert(static_cast<int>(b.size()) == y.shape[1]);
  for (int i = 0; i < y.shape[0]; ++i)
    for (int j = 0; j < y.shape[1]; ++j) y(i, j) += b[j];
  return y;
}

// Truncated normal init: redraw until |z| <= 2 stddev.
inline void init_trunc_normal(Tensor& t, double stddev, Rng& rng) {
  for (double& v : t.data) {
    double z;
    do { z = gaussian(rng, 0.0, stddev); } while (std::abs(z) > 2.0 * stddev);
    v = z;
  }
}

}  // namespace mhvit
