#pragma once

#include <numeric>
#include <utility>

#include "mhvit/optimizers/common.hpp"

namespace mhvit {

struct GAConfig {
  int pop_size = 30;
  double crossover_prob = 0.9;   // pc
  double mutation_rate = 0.1;    // pm, per gene
  double mutation_sigma = 0.1;
  int elitism_count = 2;
  int max_generations = 1000000;
  std::uint64_t seed = 0;

  void validate() const {
    if (pop_size < 2) throw ConfigError("GA needs pop_size >= 2");
    if (crossover_prob < 0.0 || crossover_prob > 1.0)
      throw ConfigError("GA crossover_prob must be in [0,1]");
    if (mutation_rate < 0.0 || mutation_rate > 1.0)
      throw ConfigError("GA mutation_rate must be in [0,1]");
    if (!(mutation_sigma > 0.0)) throw ConfigError("GA mutation_sigma must be > 0");
    if (elitism_count < 0 || elitism_count >= pop_size)
      throw ConfigError("GA elitism_count must be in [0, pop_size)");
    if (max_generations < 1) throw ConfigError("GA max_generations must be >= 1");
  }
};

// Draws an index with probability weight_i / sum(weights). All-zero weights
// fall back to a uniform draw.
inline int roulette_spin(std::span<const double> weights, Rng& rng) {
  if (weights.empty()) throw std::invalid_argument("empty roulette wheel");
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0 || !std::isfinite(w)) throw std::invalid_argument("roulette weight must be finite and >= 0");
    total += w;
  }
  const int n = static_cast<int>(weights.size());
  if (total <= 0.0) return std::uniform_int_distribution<int>(0, n - 1)(rng);
  double r = uniform(rng, 0.0, total);
  for (int i = 0; i < n; ++i) {
    r -= weights[i];
    if (r <= 0.0) return i;
  }
  return n - 1;
}

// Turns minimization fitnesses into non-negative selection weights:
// weight_i = (f_max - f_i) + delta, delta = 1e-9 * (f_max - f_min + 1).
// Non-finite fitnesses get the floor weight delta.
inline std::vector<double> selection_weights(std::span<const double> fitnesses) {
  double fmax = -std::numeric_limits<double>::infinity();
  double fmin = std::numeric_limits<double>::infinity();
  for (double f : fitnesses)
    if (std::isfinite(f)) {
      fmax = std::max(fmax, f);
      fmin = std::min(fmin, f);
    }
  std::vector<double> w(fitnesses.size());
  if (!std::isfinite(fmax)) return w;  // nothing finite, all-zero -> uniform fallback
  const double delta = 1e-9 * (fmax - fmin + 1.0);
  for (std::size_t i = 0; i < fitnesses.size(); ++i)
    w[i] = std::isfinite(fitnesses[i]) ? (fmax - fitnesses[i]) + delta : delta;
  return w;
}

inline int roulette_select(std::span<const double> fitnesses, Rng& rng) {
  return roulette_spin(selection_weights(fitnesses), rng);
}

inline std::pair<std::vector<double>, std::vector<double>> uniform_crossover(
    std::span<const double> p1, std::span<const double> p2, Rng& rng) {
  if (p1.size() != p2.size()) throw std::invalid_argument("crossover parents differ in length");
  std::vector<double> c1(p1.begin(), p1.end()), c2(p2.begin(), p2.end());
  for (std::size_t j = 0; j < c1.size(); ++j)
    if (uniform01(rng) < 0.5) std::swap(c1[j], c2[j]);
  return {std::move(c1), std::move(c2)};
}

inline std::vector<double> gaussian_mutate(std::span<const double> genes, double pm, double sigma,
                                           Rng& rng) {
  std::vector<double> out(genes.begin(), genes.end());
  for (double& g : out)
    if (uniform01(rng) < pm) g = std::clamp(g + gaussian(rng, 0.0, sigma), 0.0, 1.0);
  return out;
}

// Generational GA: roulette parent selection, uniform crossover, Gaussian
// mutation, elites carried over with their cached fitness (no re-evaluation).
inline OptimizationResult run_ga(const Objective& objective, const GAConfig& config,
                                 EvalObserver observer = nullptr, ProgressFn progress = nullptr) {
  config.validate();
  const int d = objective.dim;
  const int n = config.pop_size;
  Rng rng(config.seed);
  Evaluator ev(objective, config.seed, std::move(observer));
  OptimizationResult result;

  std::vector<std::vector<double>> pop(n);
  std::vector<double> fit(n, std::numeric_limits<double>::infinity());
  for (int i = 0; i < n && !ev.exhausted(); ++i) {
    pop[i].resize(d);
    for (double& g : pop[i]) g = uniform01(rng);
    fit[i] = ev.evaluate(pop[i], 0, i);
  }
  auto record = [&](int gen) {
    result.history.push_back(ev.stats(gen, fit));
    if (progress) progress(result.history.back());
  };
  record(0);

  for (int gen = 1; gen <= config.max_generations && !ev.exhausted(); ++gen) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return fit[a] < fit[b]; });

    std::vector<std::vector<double>> next;
    std::vector<double> next_fit;
    std::vector<bool> needs_eval;
    next.reserve(n);
    for (int e = 0; e < config.elitism_count; ++e) {
      next.push_back(pop[order[e]]);
      next_fit.push_back(fit[order[e]]);
      needs_eval.push_back(false);
    }
    while (static_cast<int>(next.size()) < n) {
      const int i1 = roulette_select(fit, rng);
      const int i2 = roulette_select(fit, rng);
      std::vector<double> c1 = pop[i1], c2 = pop[i2];
      if (uniform01(rng) < config.crossover_prob)
        std::tie(c1, c2) = uniform_crossover(pop[i1], pop[i2], rng);
      for (auto* child : {&c1, &c2}) {
        if (static_cast<int>(next.size()) >= n) break;
        next.push_back(gaussian_mutate(*child, config.mutation_rate, config.mutation_sigma, rng));
        next_fit.push_back(std::numeric_limits<double>::infinity());
        needs_eval.push_back(true);
      }
    }
    for (int i = 0; i < n && !ev.exhausted(); ++i)
      if (needs_eval[i]) next_fit[i] = ev.evaluate(next[i], gen, i);
    pop = std::move(next);
    fit = std::move(next_fit);
    record(gen);
  }
  finalize_result(result, ev);
  return result;
}

}  // namespace mhvit
