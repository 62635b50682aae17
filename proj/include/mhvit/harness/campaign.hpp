#pragma once

#include <chrono>
#include <filesystem>

#include "mhvit/data/io.hpp"
#include "mhvit/harness/config.hpp"
#include "mhvit/metrics.hpp"
#include "mhvit/objectives.hpp"
#include "mhvit/optimizers/random_search.hpp"
#include "mhvit/vit/checkpoint.hpp"

namespace mhvit {

namespace fs = std::filesystem;

struct SeedOutcome {
  std::string algorithm;
  std::uint64_t seed = 0;
  std::vector<double> best_genes;
  double best_fitness = 0.0;
  HyperParams best_hp;  // meaningful for the vit objective only
  int evaluations_used = 0;
  std::vector<GenStats> history;
  // vit objective only: final test-split evaluation of the retrained best
  bool has_metrics = false;
  ConfusionMatrix cm;
  MetricsReport metrics;
};

struct AlgorithmSummary {
  std::string algorithm;
  std::vector<SeedOutcome> seeds;
  double median_best = 0.0;
  double iqr_best = 0.0;
};

struct CampaignSummary {
  std::vector<AlgorithmSummary> algorithms;
};

namespace detail {

inline double percentile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double idx = p * (v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(idx));
  const std::size_t hi = static_cast<std::size_t>(std::ceil(idx));
  return v[lo] + (idx - lo) * (v[hi] - v[lo]);
}

inline std::string run_id(const std::string& algo, std::uint64_t seed) {
  return algo + "_seed" + std::to_string(seed);
}

// Evaluation environment shared by all runs of one campaign.
struct CampaignEnv {
  bool is_vit = false;
  BenchmarkFn bench;
  ViTObjectiveSpec vit_spec;
  Dataset test_split;
};

inline CampaignEnv build_env(const RunConfig& cfg) {
  CampaignEnv env;
  env.is_vit = cfg.objective.name == "vit";
  if (!env.is_vit) {
    env.bench = make_benchmark(cfg.objective.name, cfg.space.dim());
    return env;
  }
  Dataset full = cfg.objective.dataset_path.empty()
                     ? generate_synthetic(cfg.objective.synth)
                     : load_dataset(cfg.objective.dataset_path);
  ViTConfig vit = cfg.objective.vit;
  vit.image_size = full.image_size();
  vit.validate();
  auto splits = split(full, SplitFractions{}, cfg.objective.split_seed);
  env.vit_spec.base = vit;
  env.vit_spec.train = std::move(splits[0]);
  env.test_split = std::move(splits[1]);
  env.vit_spec.validation = std::move(splits[2]);
  env.vit_spec.epoch_cap = cfg.objective.epoch_cap;
  return env;
}

inline Json genes_json(const std::vector<double>& genes) {
  Json a = Json::array();
  for (double g : genes) a.push_back(g);
  return a;
}

inline Json hp_json(const HyperParams& hp) {
  return Json{{"batch_size", hp.batch_size},
              {"epochs", hp.epochs},
              {"learning_rate", hp.learning_rate},
              {"dropout", hp.dropout}};
}

}  // namespace detail

// Runs one (algorithm, seed) pair: optimizer against the configured
// objective, one trial-log line per evaluation, then (vit objective) a
// retrain of the best candidate and a test-split evaluation.
inline SeedOutcome run_seed(const RunConfig& cfg, const detail::CampaignEnv& env,
                            const std::string& algo, std::uint64_t seed,
                            std::ostream* trial_log) {
  using Clock = std::chrono::steady_clock;
  const std::string id = detail::run_id(algo, seed);
  bool last_diverged = false;

  Objective obj;
  obj.dim = cfg.space.dim();
  obj.max_evals = cfg.budget;
  if (env.is_vit) {
    obj.evaluate = [&](std::span<const double> genes, std::uint64_t eval_seed) {
      const HyperParams hp = decode(cfg.space, genes);
      const ViTFitness f = vit_fitness(hp, env.vit_spec, eval_seed);
      last_diverged = f.diverged;
      return f.fitness;
    };
  } else {
    obj.evaluate = [&](std::span<const double> genes, std::uint64_t) {
      last_diverged = false;
      return env.bench.evaluate(genes);
    };
  }

  auto t_eval = Clock::now();
  EvalObserver observer = nullptr;
  if (trial_log) {
    observer = [&](const EvalRecord& rec) {
      const auto now = Clock::now();
      const double wall_ms =
          std::chrono::duration<double, std::milli>(now - t_eval).count();
      t_eval = now;
      Json line{{"run_id", id},
                {"algorithm", algo},
                {"seed", seed},
                {"generation", rec.generation},
                {"slot", rec.slot},
                {"genes", detail::genes_json(*rec.genes)}};
      if (env.is_vit) line["decoded"] = detail::hp_json(decode(cfg.space, *rec.genes));
      line["fitness"] = rec.fitness;
      line["status"] = (!rec.finite || last_diverged) ? "diverged" : "ok";
      line["wall_ms"] = wall_ms;
      *trial_log << line.dump() << '\n';
      trial_log->flush();
    };
  }

  OptimizationResult result;
  if (algo == "de") {
    DEConfig c = cfg.de;
    c.seed = seed;
    result = run_de(obj, c, observer);
  } else if (algo == "ga") {
    GAConfig c = cfg.ga;
    c.seed = seed;
    result = run_ga(obj, c, observer);
  } else if (algo == "pso") {
    PSOConfig c = cfg.pso;
    c.seed = seed;
    result = run_pso(obj, c, observer);
  } else if (algo == "aco") {
    ACOConfig c = cfg.aco;
    c.seed = seed;
    result = run_aco(obj, c, observer);
  } else if (algo == "random") {
    result = run_random_search(obj, cfg.budget, seed, observer);
  } else {
    throw ConfigError("unknown algorithm: " + algo);
  }

  SeedOutcome out;
  out.algorithm = algo;
  out.seed = seed;
  out.best_genes = result.best_genes;
  out.best_fitness = result.best_fitness;
  out.evaluations_used = result.evaluations_used;
  out.history = result.history;

  if (env.is_vit) {
    out.best_hp = decode(cfg.space, result.best_genes);
    // Retrain the incumbent and report on the held-out test split. The
    // retrain seed is derived from the run seed with a reserved tag so it
    // cannot collide with any (generation, slot) evaluation seed.
    const std::uint64_t retrain_seed = derive_seed(seed, 0xf17a1ULL, 0xbe57ULL);
    ViTConfig vcfg = env.vit_spec.base;
    vcfg.dropout = out.best_hp.dropout;
    ViTModel model(vcfg);
    model.init(retrain_seed);
    Rng rng(mix64(retrain_seed ^ 0x7a17ULL));
    TrainOptions opts;
    opts.epoch_cap = env.vit_spec.epoch_cap;
    train(model, env.vit_spec.train, env.vit_spec.validation, out.best_hp, rng, opts);
    std::vector<int> preds, labels;
    for (const auto& s : env.test_split.images) {
      Tensor logits = forward(model, {s.pixels});
      int arg = 0;
      for (int j = 1; j < vcfg.num_classes; ++j)
        if (logits(0, j) > logits(0, arg)) arg = j;
      preds.push_back(arg);
      labels.push_back(s.label);
    }
    out.cm = confusion(preds, labels);
    out.metrics = report(out.cm);
    out.has_metrics = true;
  }
  return out;
}

}  // namespace mhvit
