#pragma once

#include "mhvit/optimizers/common.hpp"

namespace mhvit {

// Uniform random sampling of the cube; the baseline every metaheuristic is
// measured against at equal evaluation budget.
inline OptimizationResult run_random_search(const Objective& objective, int budget,
                                            std::uint64_t seed, EvalObserver observer = nullptr,
                                            ProgressFn progress = nullptr) {
  if (budget < 1) throw ConfigError("random search needs budget >= 1");
  Rng rng(seed);
  Objective obj = objective;
  obj.max_evals = std::min(obj.max_evals, budget);
  Evaluator ev(obj, seed, std::move(observer));
  OptimizationResult result;
  for (int i = 0; i < budget && !ev.exhausted(); ++i) {
    std::vector<double> genes(obj.dim);
    for (double& g : genes) g = uniform01(rng);
    const double f = ev.evaluate(genes, 0, i);
    result.history.push_back({i, ev.best_fitness(), f, ev.used()});
    if (progress) progress(result.history.back());
  }
  finalize_result(result, ev);
  return result;
}

}  // namespace mhvit
