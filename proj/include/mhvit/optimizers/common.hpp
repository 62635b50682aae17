#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "mhvit/errors.hpp"
#include "mhvit/rng.hpp"
#include "mhvit/searchspace.hpp"

namespace mhvit {

// Black-box minimization target. evaluate must be a pure function of
// (genes, eval_seed); max_evals is the hard evaluation budget.
struct Objective {
  std::function<double(std::span<const double>, std::uint64_t)> evaluate;
  int dim = 0;
  int max_evals = 0;
};

struct GenStats {
  int generation = 0;
  double best = 0.0;  // incumbent best-so-far, non-increasing
  double mean = 0.0;  // mean fitness of the current population
  int evaluations_used = 0;
};

struct OptimizationResult {
  std::vector<double> best_genes;
  double best_fitness = std::numeric_limits<double>::infinity();
  std::vector<GenStats> history;
  int evaluations_used = 0;
  // Per-generation population fitness snapshots; filled only when the
  // algorithm config sets record_population.
  std::vector<std::vector<double>> population_history;
};

struct EvalRecord {
  int generation = 0;
  int slot = 0;
  const std::vector<double>* genes = nullptr;
  double fitness = 0.0;
  bool finite = true;
};

using EvalObserver = std::function<void(const EvalRecord&)>;
using ProgressFn = std::function<void(const GenStats&)>;

// Shared evaluation bookkeeping: budget accounting, per-evaluation seed
// derivation, non-finite handling and incumbent tracking. Every optimizer
// routes its objective calls through here, which is what makes
// cross-algorithm comparisons evaluation-count-fair.
class Evaluator {
 public:
  Evaluator(const Objective& obj, std::uint64_t run_seed, EvalObserver observer)
      : obj_(obj), run_seed_(run_seed), observer_(std::move(observer)) {}

  bool exhausted() const { return used_ >= obj_.max_evals; }
  int used() const { return used_; }

  // Genes must already lie inside the unit cube.
  double evaluate(const std::vector<double>& genes, int generation, int slot) {
    for (double g : genes)
      if (!(g >= 0.0 && g <= 1.0))
        throw std::domain_error("candidate evaluated outside the unit cube");
    const std::uint64_t eval_seed = derive_seed(run_seed_, static_cast<std::uint64_t>(generation),
                                                static_cast<std::uint64_t>(slot));
    double f = obj_.evaluate(genes, eval_seed);
    const bool finite = std::isfinite(f);
    if (!finite) f = std::numeric_limits<double>::infinity();
    ++used_;
    if (observer_) observer_({generation, slot, &genes, f, finite});
    if (f < best_fitness_) {
      best_fitness_ = f;
      best_genes_ = genes;
    }
    return f;
  }

  const std::vector<double>& best_genes() const { return best_genes_; }
  double best_fitness() const { return best_fitness_; }

  GenStats stats(int generation, std::span<const double> population_fitness) const {
    double sum = 0.0;
    int n = 0;
    for (double f : population_fitness)
      if (std::isfinite(f)) {
        sum += f;
        ++n;
      }
    const double mean = n > 0 ? sum / n : std::numeric_limits<double>::infinity();
    return {generation, best_fitness_, mean, used_};
  }

 private:
  const Objective& obj_;
  std::uint64_t run_seed_;
  EvalObserver observer_;
  int used_ = 0;
  std::vector<double> best_genes_;
  double best_fitness_ = std::numeric_limits<double>::infinity();
};

inline void finalize_result(OptimizationResult& result, const Evaluator& ev) {
  result.best_genes = ev.best_genes();
  result.best_fitness = ev.best_fitness();
  result.evaluations_used = ev.used();
}

}  // namespace mhvit
