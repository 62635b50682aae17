#pragma once

#include "mhvit/optimizers/common.hpp"

namespace mhvit {

struct PSOConfig {
  int swarm_size = 20;
  double inertia = 0.729;
  double cognitive = 1.49445;
  double social = 1.49445;
  double v_max = 0.5;  // per-dimension velocity clamp
  int max_iter = 1000000;
  std::uint64_t seed = 0;

  void validate() const {
    if (swarm_size < 1) throw ConfigError("PSO needs swarm_size >= 1");
    if (inertia < 0.0 || cognitive < 0.0 || social < 0.0)
      throw ConfigError("PSO coefficients must be >= 0");
    if (!(v_max > 0.0)) throw ConfigError("PSO v_max must be > 0");
    if (max_iter < 1) throw ConfigError("PSO max_iter must be >= 1");
  }
};

// One coordinate of the velocity update; r1, r2 are fresh per-dimension draws.
inline double pso_velocity_update(double v, double x, double pbest, double gbest, double w,
                                  double c1, double c2, double r1, double r2, double v_max) {
  double nv = w * v + c1 * r1 * (pbest - x) + c2 * r2 * (gbest - x);
  return std::clamp(nv, -v_max, v_max);
}

inline OptimizationResult run_pso(const Objective& objective, const PSOConfig& config,
                                  EvalObserver observer = nullptr, ProgressFn progress = nullptr) {
  config.validate();
  const int d = objective.dim;
  const int n = config.swarm_size;
  Rng rng(config.seed);
  Evaluator ev(objective, config.seed, std::move(observer));
  OptimizationResult result;

  std::vector<std::vector<double>> pos(n), vel(n), pbest(n);
  std::vector<double> fit(n, std::numeric_limits<double>::infinity());
  std::vector<double> pbest_fit(n, std::numeric_limits<double>::infinity());
  std::vector<double> gbest;
  double gbest_fit = std::numeric_limits<double>::infinity();

  for (int i = 0; i < n; ++i) {
    pos[i].resize(d);
    vel[i].assign(d, 0.0);
    for (double& g : pos[i]) g = uniform01(rng);
    if (ev.exhausted()) break;
    fit[i] = ev.evaluate(pos[i], 0, i);
    pbest[i] = pos[i];
    pbest_fit[i] = fit[i];
    if (fit[i] < gbest_fit) {
      gbest_fit = fit[i];
      gbest = pos[i];
    }
  }
  auto record = [&](int iter) {
    result.history.push_back(ev.stats(iter, fit));
    if (progress) progress(result.history.back());
  };
  record(0);

  for (int iter = 1; iter <= config.max_iter && !ev.exhausted(); ++iter) {
    for (int i = 0; i < n && !ev.exhausted(); ++i) {
      for (int j = 0; j < d; ++j) {
        const double r1 = uniform01(rng);
        const double r2 = uniform01(rng);
        vel[i][j] = pso_velocity_update(vel[i][j], pos[i][j], pbest[i][j], gbest[j],
                                        config.inertia, config.cognitive, config.social, r1, r2,
                                        config.v_max);
        pos[i][j] = std::clamp(pos[i][j] + vel[i][j], 0.0, 1.0);
      }
      fit[i] = ev.evaluate(pos[i], iter, i);
      if (fit[i] < pbest_fit[i]) {
        pbest_fit[i] = fit[i];
        pbest[i] = pos[i];
      }
      if (fit[i] < gbest_fit) {
        gbest_fit = fit[i];
        gbest = pos[i];
      }
    }
    record(iter);
  }
  finalize_result(result, ev);
  return result;
}

}  // namespace mhvit
