#pragma once

#include "mhvit/optimizers/common.hpp"

namespace mhvit {

// Continuous adaptation of ant colony optimization: each dimension of the
// unit cube is discretized into K bins carrying pheromone. An ant picks a
// bin per dimension proportionally to pheromone, then a uniform point inside
// that bin. After each iteration all pheromone evaporates by (1-rho) and the
// iteration-best ant deposits onto the bins it chose. This is a departure
// from the classic edge-based tour formulation, which has no direct meaning
// on a real-valued search space; bin resolution bounds attainable precision.
struct ACOConfig {
  int n_ants = 20;
  int bins_per_dim = 10;  // K
  double tau0 = 1.0;
  double rho = 0.1;          // evaporation rate
  double deposit_scale = 1.0;  // Q
  int max_iter = 1000000;
  std::uint64_t seed = 0;

  void validate() const {
    if (n_ants < 1) throw ConfigError("ACO needs n_ants >= 1");
    if (bins_per_dim < 2) throw ConfigError("ACO needs bins_per_dim >= 2");
    if (!(tau0 > 0.0)) throw ConfigError("ACO tau0 must be > 0");
    if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("ACO rho must be in (0,1)");
    if (!(deposit_scale > 0.0)) throw ConfigError("ACO deposit_scale must be > 0");
    if (max_iter < 1) throw ConfigError("ACO max_iter must be >= 1");
  }
};

constexpr double kPheromoneFloor = 1e-12;

inline int sample_bin(std::span<const double> tau_row, Rng& rng) {
  double total = 0.0;
  for (double t : tau_row) total += t;
  double r = uniform(rng, 0.0, total);
  const int k = static_cast<int>(tau_row.size());
  for (int b = 0; b < k; ++b) {
    r -= tau_row[b];
    if (r <= 0.0) return b;
  }
  return k - 1;
}

inline OptimizationResult run_aco(const Objective& objective, const ACOConfig& config,
                                  EvalObserver observer = nullptr, ProgressFn progress = nullptr) {
  config.validate();
  const int d = objective.dim;
  const int k = config.bins_per_dim;
  Rng rng(config.seed);
  Evaluator ev(objective, config.seed, std::move(observer));
  OptimizationResult result;

  std::vector<std::vector<double>> tau(d, std::vector<double>(k, config.tau0));

  for (int iter = 0; iter < config.max_iter && !ev.exhausted(); ++iter) {
    std::vector<double> iter_fit;
    std::vector<std::vector<int>> iter_bins;
    for (int ant = 0; ant < config.n_ants && !ev.exhausted(); ++ant) {
      std::vector<int> bins(d);
      std::vector<double> genes(d);
      for (int j = 0; j < d; ++j) {
        bins[j] = sample_bin(tau[j], rng);
        genes[j] = (bins[j] + uniform01(rng)) / k;
      }
      iter_fit.push_back(ev.evaluate(genes, iter, ant));
      iter_bins.push_back(std::move(bins));
    }
    if (iter_fit.empty()) break;

    for (auto& row : tau)
      for (double& t : row) t = std::max((1.0 - config.rho) * t, kPheromoneFloor);

    int best_ant = 0;
    for (std::size_t a = 1; a < iter_fit.size(); ++a)
      if (iter_fit[a] < iter_fit[best_ant]) best_ant = static_cast<int>(a);
    if (std::isfinite(iter_fit[best_ant])) {
      const double deposit =
          config.deposit_scale / (1.0 + iter_fit[best_ant] - ev.best_fitness());
      for (int j = 0; j < d; ++j) tau[j][iter_bins[best_ant][j]] += deposit;
    }

    result.history.push_back(ev.stats(iter, iter_fit));
    if (progress) progress(result.history.back());
  }
  finalize_result(result, ev);
  return result;
}

}  // namespace mhvit
