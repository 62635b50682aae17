#pragma once

#include "mhvit/harness/runner.hpp"

namespace mhvit {

struct ReportPaths {
  fs::path best_hyperparams;   // Table-style: B, E, input size, D, eta per algorithm
  fs::path metrics_comparison; // accuracy/recall/precision/F1 row per algorithm
  std::vector<fs::path> confusions;
  std::vector<fs::path> convergence;
};

// Renders campaign artifacts purely from persisted state. Refuses to run
// on an incomplete campaign.
inline ReportPaths write_report(const std::string& out_dir) {
  fs::path out(out_dir);
  const fs::path snap = out / "config.json";
  if (!fs::exists(snap)) throw ConfigError("no config snapshot in " + out_dir);
  std::ifstream is(snap);
  Json doc;
  is >> doc;
  RunConfig cfg = parse_config(doc);

  std::vector<AlgorithmSummary> algos;
  for (const auto& algo : cfg.algorithms) {
    std::vector<SeedOutcome> outcomes;
    for (std::uint64_t seed : cfg.seeds) {
      const fs::path p = detail::summary_path(out, algo, seed);
      if (!fs::exists(p))
        throw ConfigError("campaign incomplete: missing " + p.filename().string() +
                          " (run `resume` first)");
      std::ifstream f(p);
      Json j;
      f >> j;
      outcomes.push_back(detail::outcome_from_json(j));
    }
    algos.push_back(detail::summarize(algo, std::move(outcomes)));
  }

  ReportPaths paths;
  const bool is_vit = cfg.objective.name == "vit";

  if (is_vit) {
    paths.best_hyperparams = out / "best_hyperparams.csv";
    std::ofstream os(paths.best_hyperparams);
    os << "algorithm,batch_size,epochs,input_size,dropout,learning_rate\n";
    for (const auto& a : algos) {
      const SeedOutcome* best = &a.seeds.front();
      for (const auto& s : a.seeds)
        if (s.best_fitness < best->best_fitness) best = &s;
      os << a.algorithm << ',' << best->best_hp.batch_size << ',' << best->best_hp.epochs << ','
         << cfg.objective.vit.image_size << ',' << best->best_hp.dropout << ','
         << best->best_hp.learning_rate << '\n';
    }

    paths.metrics_comparison = out / "metrics_comparison.csv";
    std::ofstream mcs(paths.metrics_comparison);
    mcs << "algorithm,accuracy,recall,precision,f1\n";
    for (const auto& a : algos) {
      const SeedOutcome* best = &a.seeds.front();
      for (const auto& s : a.seeds)
        if (s.best_fitness < best->best_fitness) best = &s;
      const MetricsReport r = report(best->cm);  // recompute from persisted counts
      mcs << a.algorithm << ',' << r.accuracy << ',' << r.macro_recall << ','
         << r.macro_precision << ',' << r.macro_f1 << '\n';

      const fs::path txt = out / ("confusion_" + a.algorithm + ".txt");
      const fs::path csv = out / ("confusion_" + a.algorithm + ".csv");
      std::ofstream(txt) << render_confusion(best->cm);
      std::ofstream(csv) << confusion_csv(best->cm);
      paths.confusions.push_back(txt);
      paths.confusions.push_back(csv);
    }
  }

  for (const auto& a : algos)
    for (const auto& s : a.seeds) {
      const fs::path p = out / ("convergence_" + detail::run_id(a.algorithm, s.seed) + ".csv");
      std::ofstream os(p);
      os << "generation,best_fitness,mean_fitness,evaluations_used\n";
      for (const auto& g : s.history)
        os << g.generation << ',' << g.best << ',' << g.mean << ',' << g.evaluations_used << '\n';
      paths.convergence.push_back(p);
    }
  return paths;
}

}  // namespace mhvit
