#pragma once

#include <numeric>

#include "mhvit/data/dataset.hpp"
#include "mhvit/data/transforms.hpp"
#include "mhvit/searchspace.hpp"
#include "mhvit/vit/backward.hpp"

namespace mhvit {

struct TrainHistory {
  std::vector<double> train_loss;    // per epoch
  std::vector<double> val_accuracy;  // per epoch
  bool diverged = false;
};

struct TrainOptions {
  int epoch_cap = 0;     // 0 = no cap
  bool augment = false;  // training-batch augmentation
};

namespace detail {

struct AdamState {
  ViTModel m, v;
  long step = 0;
  explicit AdamState(const ViTModel& model) : m(model.zeros_like()), v(model.zeros_like()) {}
};

inline void adam_update(ViTModel& model, const ViTModel& grads, AdamState& st, double lr,
                        double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8) {
  ++st.step;
  const double bc1 = 1.0 - std::pow(beta1, st.step);
  const double bc2 = 1.0 - std::pow(beta2, st.step);
  ViTModel* g = const_cast<ViTModel*>(&grads);
  auto* mm = &st.m;
  auto* vv = &st.v;
  // walk the four structures in lockstep via flat parameter lists
  std::vector<Tensor*> pm, pg, pmm, pvv;
  model.for_each_param([&](const std::string&, Tensor& t) { pm.push_back(&t); });
  g->for_each_param([&](const std::string&, Tensor& t) { pg.push_back(&t); });
  mm->for_each_param([&](const std::string&, Tensor& t) { pmm.push_back(&t); });
  vv->for_each_param([&](const std::string&, Tensor& t) { pvv.push_back(&t); });
  for (std::size_t p = 0; p < pm.size(); ++p)
    for (std::size_t i = 0; i < pm[p]->data.size(); ++i) {
      const double gi = pg[p]->data[i];
      double& mi = pmm[p]->data[i];
      double& vi = pvv[p]->data[i];
      mi = beta1 * mi + (1.0 - beta1) * gi;
      vi = beta2 * vi + (1.0 - beta2) * gi * gi;
      pm[p]->data[i] -= lr * (mi / bc1) / (std::sqrt(vi / bc2) + eps);
    }
}

}  // namespace detail

inline double evaluate_accuracy(const ViTModel& model, const Dataset& ds) {
  std::vector<Tensor> images;
  std::vector<int> labels;
  images.reserve(ds.images.size());
  for (const auto& s : ds.images) {
    images.push_back(s.pixels);
    labels.push_back(s.label);
  }
  Tensor logits = forward(model, images);
  return sparse_categorical_accuracy(logits, labels);
}

// Adam training loop: per-epoch seeded shuffle, mini-batches of
// hp.batch_size, dropout active, optional augmentation on training batches
// only. Aborts with diverged=true on a non-finite loss.
inline TrainHistory train(ViTModel& model, const Dataset& train_ds, const Dataset& val_ds,
                          const HyperParams& hp, Rng& rng, const TrainOptions& opts = {}) {
  if (train_ds.images.empty()) throw ConfigError("training set is empty");
  if (hp.batch_size < 1 || hp.epochs < 1) throw ConfigError("invalid hyperparameters");
  const int epochs =
      opts.epoch_cap > 0 ? std::min(hp.epochs, opts.epoch_cap) : hp.epochs;
  detail::AdamState adam(model);
  TrainHistory hist;
  const int n = static_cast<int>(train_ds.images.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    int batches = 0;
    for (int start = 0; start < n; start += hp.batch_size) {
      const int end = std::min(start + hp.batch_size, n);
      std::vector<Tensor> images;
      std::vector<int> labels;
      for (int i = start; i < end; ++i) {
        const auto& s = train_ds.images[order[i]];
        images.push_back(opts.augment ? augment(s.pixels, rng) : s.pixels);
        labels.push_back(s.label);
      }
      auto [loss, grads] = backward(model, images, labels, /*training=*/true, &rng);
      if (!std::isfinite(loss)) {
        hist.diverged = true;
        return hist;
      }
      detail::adam_update(model, grads, adam, hp.learning_rate);
      epoch_loss += loss;
      ++batches;
    }
    hist.train_loss.push_back(epoch_loss / batches);
    hist.val_accuracy.push_back(val_ds.images.empty() ? 0.0 : evaluate_accuracy(model, val_ds));
  }
  return hist;
}

}  // namespace mhvit
