#pragma once

#include <span>

#include "mhvit/vit/tensor.hpp"

namespace mhvit {

inline Tensor relu(const Tensor& x) {
  Tensor y = x;
  for (double& v : y.data) v = std::max(0.0, v);
  return y;
}

// Numerically stable softmax of one row (max subtraction).
inline std::vector<double> softmax(std::span<const double> z) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : z) m = std::max(m, v);
  std::vector<double> out(z.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    out[i] = std::exp(z[i] - m);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

// Row-wise softmax of a 2-d tensor, in place per row.
inline Tensor softmax_rows(const Tensor& x) {
  Tensor y = x;
  const int n = y.shape[0], d = y.shape[1];
  for (int i = 0; i < n; ++i) {
    std::vector<double> row = softmax(std::span<const double>(&y.data[i * d], d));
    for (int j = 0; j < d; ++j) y(i, j) = row[j];
  }
  return y;
}

struct LayerNormCache {
  Tensor x_hat;            // normalized input
  std::vector<double> inv_std;  // per row
};

// Per-row layer norm over the feature axis: (x - mean)/sqrt(var + eps) * gamma + beta.
inline Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                         double eps = 1e-5, LayerNormCache* cache = nullptr) {
  const int n = x.shape[0], d = x.shape[1];
  Tensor y({n, d});
  if (cache) {
    cache->x_hat = Tensor({n, d});
    cache->inv_std.assign(n, 0.0);
  }
  for (int i = 0; i < n; ++i) {
    double mean = 0.0;
    for (int j = 0; j < d; ++j) mean += x(i, j);
    mean /= d;
    double var = 0.0;
    for (int j = 0; j < d; ++j) {
      const double c = x(i, j) - mean;
      var += c * c;
    }
    var /= d;
    const double inv_std = 1.0 / std::sqrt(var + eps);
    for (int j = 0; j < d; ++j) {
      const double xh = (x(i, j) - mean) * inv_std;
      y(i, j) = xh * gamma[j] + beta[j];
      if (cache) cache->x_hat(i, j) = xh;
    }
    if (cache) cache->inv_std[i] = inv_std;
  }
  return y;
}

// Backward of layer_norm. Accumulates dgamma/dbeta, returns dx.
inline Tensor layer_norm_backward(const Tensor& dy, const LayerNormCache& cache,
                                  const Tensor& gamma, Tensor& dgamma, Tensor& dbeta) {
  const int n = dy.shape[0], d = dy.shape[1];
  Tensor dx({n, d});
  for (int i = 0; i < n; ++i) {
    double sum_g = 0.0, sum_gx = 0.0;
    for (int j = 0; j < d; ++j) {
      const double g = dy(i, j) * gamma[j];
      sum_g += g;
      sum_gx += g * cache.x_hat(i, j);
      dgamma[j] += dy(i, j) * cache.x_hat(i, j);
      dbeta[j] += dy(i, j);
    }
    for (int j = 0; j < d; ++j) {
      const double g = dy(i, j) * gamma[j];
      dx(i, j) = (g - sum_g / d - cache.x_hat(i, j) * sum_gx / d) * cache.inv_std[i];
    }
  }
  return dx;
}

// Inverted-scaling dropout: kept entries are divided by (1 - rate) at train
// time so evaluation is a plain forward pass. Returns the mask with the
// scaling folded in (0 or 1/(1-rate)).
inline Tensor dropout_mask(const std::vector<int>& shape, double rate, Rng& rng) {
  Tensor mask(shape);
  const double keep = 1.0 - rate;
  for (double& v : mask.data) v = (uniform01(rng) < rate) ? 0.0 : 1.0 / keep;
  return mask;
}

inline Tensor apply_mask(const Tensor& x, const Tensor& mask) {
  Tensor y = x;
  for (std::size_t i = 0; i < y.data.size(); ++i) y.data[i] *= mask.data[i];
  return y;
}

// Mean negative log-likelihood of the softmaxed logits, plus its gradient
// with respect to the logits: (softmax - one_hot) / batch.
inline std::pair<double, Tensor> cross_entropy_loss(const Tensor& logits,
                                                    std::span<const int> labels) {
  const int batch = logits.shape[0], classes = logits.shape[1];
  if (static_cast<int>(labels.size()) != batch)
    throw std::invalid_argument("labels/logits batch mismatch");
  Tensor dlogits({batch, classes});
  double loss = 0.0;
  for (int i = 0; i < batch; ++i) {
    if (labels[i] < 0 || labels[i] >= classes) throw std::invalid_argument("label out of range");
    std::vector<double> p = softmax(std::span<const double>(&logits.data[i * classes], classes));
    loss += -std::log(std::max(p[labels[i]], 1e-300));
    for (int j = 0; j < classes; ++j)
      dlogits(i, j) = (p[j] - (j == labels[i] ? 1.0 : 0.0)) / batch;
  }
  return {loss / batch, std::move(dlogits)};
}

// Fraction of rows whose argmax equals the label; ties break toward the
// lowest class index.
inline double sparse_categorical_accuracy(const Tensor& logits, std::span<const int> labels) {
  const int batch = logits.shape[0], classes = logits.shape[1];
  int correct = 0;
  for (int i = 0; i < batch; ++i) {
    int arg = 0;
    for (int j = 1; j < classes; ++j)
      if (logits(i, j) > logits(i, arg)) arg = j;
    if (arg == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / batch;
}

}  // namespace mhvit
