#pragma once

#include <fstream>
#include <set>

#include "json.hpp"
#include "mhvit/data/synth.hpp"
#include "mhvit/optimizers/aco.hpp"
#include "mhvit/optimizers/de.hpp"
#include "mhvit/optimizers/ga.hpp"
#include "mhvit/optimizers/pso.hpp"
#include "mhvit/searchspace.hpp"
#include "mhvit/vit/model.hpp"

namespace mhvit {

using Json = nlohmann::ordered_json;

namespace detail {

// Unknown keys are hard errors; a silently ignored typo in a
// hyperparameter name is the classic HPO footgun.
inline void check_keys(const Json& obj, const std::string& where,
                       const std::set<std::string>& allowed) {
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key))
      throw ConfigError("unknown key '" + key + "' in section '" + where + "'");
}

template <typename T>
T get_or(const Json& obj, const std::string& key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError("bad value for '" + key + "': " + e.what());
  }
}

}  // namespace detail

struct ObjectiveConfig {
  std::string name = "sphere";  // sphere | rastrigin | rosenbrock | vit
  int dim = 5;                  // benchmark dimension
  // vit objective:
  std::string dataset_path;     // pre-generated dataset file; empty -> synth
  SynthSpec synth;
  std::uint64_t split_seed = 0;
  int epoch_cap = 50;
  ViTConfig vit = ViTConfig::desk_scale();
  bool tune_dropout = false;
};

struct RunConfig {
  SearchSpace space;  // as configured, or defaulted per objective
  bool space_explicit = false;
  ObjectiveConfig objective;
  DEConfig de;
  GAConfig ga;
  PSOConfig pso;
  ACOConfig aco;
  std::vector<std::string> algorithms{"de"};
  int budget = 1000;
  std::vector<std::uint64_t> seeds{1};
  std::string out_dir;
  Json raw;  // original document, persisted as the campaign snapshot

  void validate() const {
    static const std::set<std::string> known_algos{"de", "ga", "pso", "aco", "random"};
    if (algorithms.empty()) throw ConfigError("campaign needs at least one algorithm");
    for (const auto& a : algorithms)
      if (!known_algos.count(a)) throw ConfigError("unknown algorithm: " + a);
    if (seeds.empty()) throw ConfigError("campaign needs at least one seed");
    if (budget < 1) throw ConfigError("budget must be >= 1");
    for (const auto& a : algorithms) {
      int pop = 0;
      if (a == "de") pop = de.pop_size;
      else if (a == "ga") pop = ga.pop_size;
      else if (a == "pso") pop = pso.swarm_size;
      else if (a == "aco") pop = aco.n_ants;
      if (pop > budget)
        throw ConfigError("budget (" + std::to_string(budget) +
                          ") is smaller than the population size of '" + a + "'");
    }
  }
};

inline SearchSpace parse_space(const Json& j) {
  std::vector<ParamSpec> params;
  if (!j.is_array()) throw ConfigError("space.params must be an array");
  for (const auto& p : j) {
    detail::check_keys(p, "space.params[]", {"name", "kind", "low", "high"});
    ParamSpec spec;
    spec.name = p.at("name").get<std::string>();
    spec.kind = param_kind_from_string(p.at("kind").get<std::string>());
    spec.low = p.at("low").get<double>();
    spec.high = p.at("high").get<double>();
    params.push_back(spec);
  }
  return SearchSpace(std::move(params));
}

inline RunConfig parse_config(const Json& doc) {
  RunConfig cfg;
  cfg.raw = doc;
  detail::check_keys(doc, "(top level)", {"space", "objective", "algorithm", "campaign"});

  if (doc.contains("objective")) {
    const Json& o = doc.at("objective");
    detail::check_keys(o, "objective",
                       {"name", "dim", "dataset", "synth", "split_seed", "epoch_cap", "vit",
                        "tune_dropout"});
    auto& oc = cfg.objective;
    oc.name = detail::get_or<std::string>(o, "name", oc.name);
    oc.dim = detail::get_or<int>(o, "dim", oc.dim);
    oc.dataset_path = detail::get_or<std::string>(o, "dataset", "");
    oc.split_seed = detail::get_or<std::uint64_t>(o, "split_seed", 0);
    oc.epoch_cap = detail::get_or<int>(o, "epoch_cap", 50);
    oc.tune_dropout = detail::get_or<bool>(o, "tune_dropout", false);
    if (o.contains("synth")) {
      const Json& s = o.at("synth");
      detail::check_keys(s, "objective.synth", {"n", "size", "difficulty", "seed"});
      oc.synth.n_samples = detail::get_or<int>(s, "n", oc.synth.n_samples);
      oc.synth.image_size = detail::get_or<int>(s, "size", oc.synth.image_size);
      oc.synth.difficulty = detail::get_or<double>(s, "difficulty", oc.synth.difficulty);
      oc.synth.seed = detail::get_or<std::uint64_t>(s, "seed", oc.synth.seed);
      oc.vit.image_size = oc.synth.image_size;
    }
    if (o.contains("vit")) {
      const Json& v = o.at("vit");
      detail::check_keys(v, "objective.vit",
                         {"image_size", "patch_size", "embed_dim", "num_layers", "num_heads",
                          "head_dim", "mlp_hidden"});
      oc.vit.image_size = detail::get_or<int>(v, "image_size", oc.vit.image_size);
      oc.vit.patch_size = detail::get_or<int>(v, "patch_size", oc.vit.patch_size);
      oc.vit.embed_dim = detail::get_or<int>(v, "embed_dim", oc.vit.embed_dim);
      oc.vit.num_layers = detail::get_or<int>(v, "num_layers", oc.vit.num_layers);
      oc.vit.num_heads = detail::get_or<int>(v, "num_heads", oc.vit.num_heads);
      oc.vit.head_dim = detail::get_or<int>(v, "head_dim", oc.vit.head_dim);
      oc.vit.mlp_hidden = detail::get_or<int>(v, "mlp_hidden", oc.vit.mlp_hidden);
    }
    static const std::set<std::string> names{"sphere", "rastrigin", "rosenbrock", "vit"};
    if (!names.count(oc.name)) throw ConfigError("unknown objective: " + oc.name);
  }

  if (doc.contains("space")) {
    const Json& s = doc.at("space");
    detail::check_keys(s, "space", {"params"});
    cfg.space = parse_space(s.at("params"));
    cfg.space_explicit = true;
  } else if (cfg.objective.name == "vit") {
    cfg.space = default_hyperparam_space(cfg.objective.tune_dropout);
  } else {
    std::vector<ParamSpec> unit;
    for (int i = 0; i < cfg.objective.dim; ++i)
      unit.push_back({"x" + std::to_string(i), ParamKind::Continuous, 0.0, 1.0});
    cfg.space = SearchSpace(std::move(unit));
  }

  if (doc.contains("algorithm")) {
    const Json& a = doc.at("algorithm");
    detail::check_keys(a, "algorithm", {"de", "ga", "pso", "aco"});
    if (a.contains("de")) {
      const Json& d = a.at("de");
      detail::check_keys(d, "algorithm.de", {"pop_size", "F", "CR"});
      cfg.de.pop_size = detail::get_or<int>(d, "pop_size", cfg.de.pop_size);
      cfg.de.differential_weight = detail::get_or<double>(d, "F", cfg.de.differential_weight);
      cfg.de.crossover_rate = detail::get_or<double>(d, "CR", cfg.de.crossover_rate);
    }
    if (a.contains("ga")) {
      const Json& g = a.at("ga");
      detail::check_keys(g, "algorithm.ga",
                         {"pop_size", "crossover_prob", "mutation_rate", "mutation_sigma",
                          "elitism_count"});
      cfg.ga.pop_size = detail::get_or<int>(g, "pop_size", cfg.ga.pop_size);
      cfg.ga.crossover_prob = detail::get_or<double>(g, "crossover_prob", cfg.ga.crossover_prob);
      cfg.ga.mutation_rate = detail::get_or<double>(g, "mutation_rate", cfg.ga.mutation_rate);
      cfg.ga.mutation_sigma = detail::get_or<double>(g, "mutation_sigma", cfg.ga.mutation_sigma);
      cfg.ga.elitism_count = detail::get_or<int>(g, "elitism_count", cfg.ga.elitism_count);
    }
    if (a.contains("pso")) {
      const Json& p = a.at("pso");
      detail::check_keys(p, "algorithm.pso",
                         {"swarm_size", "inertia", "cognitive", "social", "v_max"});
      cfg.pso.swarm_size = detail::get_or<int>(p, "swarm_size", cfg.pso.swarm_size);
      cfg.pso.inertia = detail::get_or<double>(p, "inertia", cfg.pso.inertia);
      cfg.pso.cognitive = detail::get_or<double>(p, "cognitive", cfg.pso.cognitive);
      cfg.pso.social = detail::get_or<double>(p, "social", cfg.pso.social);
      cfg.pso.v_max = detail::get_or<double>(p, "v_max", cfg.pso.v_max);
    }
    if (a.contains("aco")) {
      const Json& c = a.at("aco");
      detail::check_keys(c, "algorithm.aco",
                         {"n_ants", "bins_per_dim", "tau0", "rho", "deposit_scale"});
      cfg.aco.n_ants = detail::get_or<int>(c, "n_ants", cfg.aco.n_ants);
      cfg.aco.bins_per_dim = detail::get_or<int>(c, "bins_per_dim", cfg.aco.bins_per_dim);
      cfg.aco.tau0 = detail::get_or<double>(c, "tau0", cfg.aco.tau0);
      cfg.aco.rho = detail::get_or<double>(c, "rho", cfg.aco.rho);
      cfg.aco.deposit_scale = detail::get_or<double>(c, "deposit_scale", cfg.aco.deposit_scale);
    }
  }

  if (doc.contains("campaign")) {
    const Json& c = doc.at("campaign");
    detail::check_keys(c, "campaign", {"algorithms", "budget", "seeds", "out"});
    if (c.contains("algorithms"))
      cfg.algorithms = c.at("algorithms").get<std::vector<std::string>>();
    cfg.budget = detail::get_or<int>(c, "budget", cfg.budget);
    if (c.contains("seeds")) cfg.seeds = c.at("seeds").get<std::vector<std::uint64_t>>();
    cfg.out_dir = detail::get_or<std::string>(c, "out", "");
  }

  cfg.validate();
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  Json doc;
  try {
    is >> doc;
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return parse_config(doc);
}

}  // namespace mhvit
