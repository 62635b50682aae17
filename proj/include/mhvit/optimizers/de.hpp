#pragma once

#include "mhvit/optimizers/common.hpp"

namespace mhvit {

// DE/rand/1/bin with greedy one-to-one replacement.
struct DEConfig {
  int pop_size = 20;
  double differential_weight = 0.8;  // F
  double crossover_rate = 0.9;       // CR
  int max_generations = 1000000;     // budget usually terminates first
  std::uint64_t seed = 0;
  bool record_population = false;

  void validate() const {
    if (pop_size < 4) throw ConfigError("DE needs pop_size >= 4");
    if (!(differential_weight > 0.0)) throw ConfigError("DE differential weight must be > 0");
    if (crossover_rate < 0.0 || crossover_rate > 1.0)
      throw ConfigError("DE crossover rate must be in [0,1]");
    if (max_generations < 1) throw ConfigError("DE max_generations must be >= 1");
  }
};

inline OptimizationResult run_de(const Objective& objective, const DEConfig& config,
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
    if (config.record_population) result.population_history.push_back(fit);
    if (progress) progress(result.history.back());
  };
  record(0);

  std::uniform_int_distribution<int> pick(0, n - 1);
  std::uniform_int_distribution<int> pick_dim(0, d - 1);
  for (int gen = 1; gen <= config.max_generations && !ev.exhausted(); ++gen) {
    for (int i = 0; i < n && !ev.exhausted(); ++i) {
      int a, b, c;
      do { a = pick(rng); } while (a == i);
      do { b = pick(rng); } while (b == i || b == a);
      do { c = pick(rng); } while (c == i || c == a || c == b);
      const int forced = pick_dim(rng);
      std::vector<double> trial(d);
      for (int j = 0; j < d; ++j) {
        const double mutant = pop[a][j] + config.differential_weight * (pop[b][j] - pop[c][j]);
        trial[j] = (uniform01(rng) < config.crossover_rate || j == forced) ? mutant : pop[i][j];
      }
      trial = clamp_unit(trial);
      const double f = ev.evaluate(trial, gen, i);
      if (f < fit[i]) {
        pop[i] = std::move(trial);
        fit[i] = f;
      }
    }
    record(gen);
  }
  finalize_result(result, ev);
  return result;
}

}  // namespace mhvit
