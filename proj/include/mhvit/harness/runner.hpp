#pragma once

#include "mhvit/harness/campaign.hpp"

namespace mhvit {

namespace detail {

inline Json outcome_json(const SeedOutcome& o) {
  Json j{{"run_id", run_id(o.algorithm, o.seed)},
         {"algorithm", o.algorithm},
         {"seed", o.seed},
         {"best_genes", genes_json(o.best_genes)},
         {"best_fitness", o.best_fitness},
         {"evaluations_used", o.evaluations_used}};
  Json hist = Json::array();
  for (const auto& g : o.history)
    hist.push_back(Json{{"generation", g.generation},
                        {"best", g.best},
                        {"mean", g.mean},
                        {"evaluations_used", g.evaluations_used}});
  j["history"] = hist;
  if (o.has_metrics) {
    j["best_hp"] = hp_json(o.best_hp);
    Json cm = Json::array();
    for (int t = 0; t < kNumClasses; ++t) {
      Json row = Json::array();
      for (int p = 0; p < kNumClasses; ++p) row.push_back(o.cm.counts[t][p]);
      cm.push_back(row);
    }
    j["confusion"] = cm;
    j["metrics"] = Json{{"accuracy", o.metrics.accuracy},
                        {"macro_precision", o.metrics.macro_precision},
                        {"macro_recall", o.metrics.macro_recall},
                        {"macro_f1", o.metrics.macro_f1}};
  }
  return j;
}

inline SeedOutcome outcome_from_json(const Json& j) {
  SeedOutcome o;
  o.algorithm = j.at("algorithm").get<std::string>();
  o.seed = j.at("seed").get<std::uint64_t>();
  o.best_genes = j.at("best_genes").get<std::vector<double>>();
  o.best_fitness = j.at("best_fitness").get<double>();
  o.evaluations_used = j.at("evaluations_used").get<int>();
  for (const auto& g : j.at("history"))
    o.history.push_back({g.at("generation").get<int>(), g.at("best").get<double>(),
                         g.at("mean").get<double>(), g.at("evaluations_used").get<int>()});
  if (j.contains("confusion")) {
    o.has_metrics = true;
    const auto& hp = j.at("best_hp");
    o.best_hp.batch_size = hp.at("batch_size").get<int>();
    o.best_hp.epochs = hp.at("epochs").get<int>();
    o.best_hp.learning_rate = hp.at("learning_rate").get<double>();
    o.best_hp.dropout = hp.at("dropout").get<double>();
    for (int t = 0; t < kNumClasses; ++t)
      for (int p = 0; p < kNumClasses; ++p)
        o.cm.counts[t][p] = j.at("confusion").at(t).at(p).get<long>();
    o.metrics = report(o.cm);
  }
  return o;
}

inline fs::path summary_path(const fs::path& out, const std::string& algo, std::uint64_t seed) {
  return out / (run_id(algo, seed) + "_summary.json");
}

inline fs::path trials_path(const fs::path& out, const std::string& algo, std::uint64_t seed) {
  return out / (run_id(algo, seed) + "_trials.jsonl");
}

inline AlgorithmSummary summarize(const std::string& algo, std::vector<SeedOutcome> seeds) {
  AlgorithmSummary s;
  s.algorithm = algo;
  std::vector<double> bests;
  for (const auto& o : seeds) bests.push_back(o.best_fitness);
  s.median_best = percentile(bests, 0.5);
  s.iqr_best = percentile(bests, 0.75) - percentile(bests, 0.25);
  s.seeds = std::move(seeds);
  return s;
}

inline void write_campaign_summary(const fs::path& out, const CampaignSummary& summary) {
  Json j;
  Json algos = Json::array();
  for (const auto& a : summary.algorithms) {
    Json seeds = Json::array();
    for (const auto& o : a.seeds) seeds.push_back(outcome_json(o));
    algos.push_back(Json{{"algorithm", a.algorithm},
                         {"median_best_fitness", a.median_best},
                         {"iqr_best_fitness", a.iqr_best},
                         {"seeds", seeds}});
  }
  j["algorithms"] = algos;
  std::ofstream os(out / "summary.json");
  os << j.dump(2) << '\n';
}

}  // namespace detail

// Runs the full campaign: every configured algorithm against every seed,
// persisting per-evaluation trial records as they complete. Already
// completed (algorithm, seed) pairs — identified by their summary file —
// are skipped, which is also the resume path; an interrupted seed is
// restarted from its beginning.
inline CampaignSummary run_campaign(const RunConfig& cfg, const std::string& out_dir) {
  if (out_dir.empty()) throw ConfigError("campaign needs an output directory");
  fs::path out(out_dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw ConfigError("cannot create output directory: " + out_dir);
  {
    const fs::path snap = out / "config.json";
    if (!fs::exists(snap)) {
      std::ofstream os(snap);
      if (!os) throw ConfigError("output directory is not writable: " + out_dir);
      os << cfg.raw.dump(2) << '\n';
    }
  }
  const detail::CampaignEnv env = detail::build_env(cfg);

  CampaignSummary summary;
  for (const auto& algo : cfg.algorithms) {
    std::vector<SeedOutcome> outcomes;
    for (std::uint64_t seed : cfg.seeds) {
      const fs::path done = detail::summary_path(out, algo, seed);
      if (fs::exists(done)) {
        std::ifstream is(done);
        Json j;
        is >> j;
        outcomes.push_back(detail::outcome_from_json(j));
        continue;
      }
      std::ofstream log(detail::trials_path(out, algo, seed), std::ios::trunc);
      if (!log) throw ConfigError("cannot write trial log in " + out_dir);
      SeedOutcome o = run_seed(cfg, env, algo, seed, &log);
      // summary file written last; its presence marks the seed complete
      const fs::path tmp = done.string() + ".tmp";
      {
        std::ofstream os(tmp);
        os << detail::outcome_json(o).dump(2) << '\n';
      }
      fs::rename(tmp, done);
      outcomes.push_back(std::move(o));
    }
    summary.algorithms.push_back(detail::summarize(algo, std::move(outcomes)));
  }
  detail::write_campaign_summary(out, summary);
  return summary;
}

// Re-reads the config snapshot from a (possibly interrupted) campaign
// directory and completes whatever is missing.
inline CampaignSummary resume_campaign(const std::string& out_dir) {
  const fs::path snap = fs::path(out_dir) / "config.json";
  if (!fs::exists(snap)) throw ConfigError("no config snapshot in " + out_dir);
  std::ifstream is(snap);
  Json doc;
  try {
    is >> doc;
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("corrupt config snapshot: ") + e.what());
  }
  RunConfig cfg = parse_config(doc);
  return run_campaign(cfg, out_dir);
}

}  // namespace mhvit
