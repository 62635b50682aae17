#pragma once

#include "mhvit/optimizers/common.hpp"
#include "mhvit/searchspace.hpp"
#include "mhvit/vit/train.hpp"

namespace mhvit {

// Analytic benchmark on its canonical domain; genes are mapped affinely
// from the unit cube before evaluation.
struct BenchmarkFn {
  std::string name;
  int dim = 0;
  double domain_low = -5.0, domain_high = 5.0;
  std::function<double(std::span<const double>)> fn;  // takes mapped x
  double known_optimum = 0.0;
  std::vector<double> optimum_location;  // in unit-cube coordinates

  double evaluate(std::span<const double> genes) const {
    std::vector<double> x(genes.size());
    for (std::size_t i = 0; i < genes.size(); ++i)
      x[i] = domain_low + genes[i] * (domain_high - domain_low);
    return fn(x);
  }
};

inline double sphere(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

inline double rastrigin(std::span<const double> x) {
  constexpr double pi = 3.14159265358979323846;
  double s = 10.0 * x.size();
  for (double v : x) s += v * v - 10.0 * std::cos(2.0 * pi * v);
  return s;
}

inline double rosenbrock(std::span<const double> x) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double a = x[i + 1] - x[i] * x[i];
    const double b = 1.0 - x[i];
    s += 100.0 * a * a + b * b;
  }
  return s;
}

inline BenchmarkFn make_benchmark(const std::string& name, int dim) {
  BenchmarkFn b;
  b.name = name;
  b.dim = dim;
  if (name == "sphere") {
    b.domain_low = -5.0; b.domain_high = 5.0;
    b.fn = [](std::span<const double> x) { return sphere(x); };
    b.optimum_location.assign(dim, 0.5);
  } else if (name == "rastrigin") {
    b.domain_low = -5.12; b.domain_high = 5.12;
    b.fn = [](std::span<const double> x) { return rastrigin(x); };
    b.optimum_location.assign(dim, 0.5);
  } else if (name == "rosenbrock") {
    b.domain_low = -5.0; b.domain_high = 5.0;
    b.fn = [](std::span<const double> x) { return rosenbrock(x); };
    b.optimum_location.assign(dim, 0.6);  // maps to x = 1
  } else {
    throw ConfigError("unknown benchmark function: " + name);
  }
  return b;
}

// The ViT-training objective behind the hyperparameter search. Fitness is
// 1 - sparse categorical accuracy on the validation split; the test split
// is never touched here.
struct ViTObjectiveSpec {
  ViTConfig base;  // dropout field is overridden per candidate
  Dataset train, validation;
  int epoch_cap = 50;

  void validate() const {
    if (epoch_cap < 1) throw ConfigError("epoch cap must be >= 1");
    if (train.images.empty() || validation.images.empty())
      throw ConfigError("vit objective needs non-empty train and validation splits");
  }
};

struct ViTFitness {
  double fitness = 1.0;
  bool diverged = false;
};

inline ViTFitness vit_fitness(const HyperParams& hp, const ViTObjectiveSpec& spec,
                              std::uint64_t eval_seed) {
  spec.validate();
  ViTConfig cfg = spec.base;
  cfg.dropout = hp.dropout;
  ViTModel model(cfg);
  model.init(eval_seed);
  Rng rng(mix64(eval_seed ^ 0x7a17ULL));
  TrainOptions opts;
  opts.epoch_cap = spec.epoch_cap;
  TrainHistory hist = train(model, spec.train, spec.validation, hp, rng, opts);
  if (hist.diverged) return {1.0, true};
  const double acc = evaluate_accuracy(model, spec.validation);
  return {1.0 - acc, false};
}

}  // namespace mhvit
