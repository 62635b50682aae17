#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mhvit/errors.hpp"
#include "mhvit/rng.hpp"

namespace mhvit {

enum class ParamKind { Integer, Continuous, LogContinuous };

inline const char* to_string(ParamKind k) {
  switch (k) {
    case ParamKind::Integer: return "integer";
    case ParamKind::Continuous: return "continuous";
    case ParamKind::LogContinuous: return "log-continuous";
  }
  return "?";
}

inline ParamKind param_kind_from_string(const std::string& s) {
  if (s == "integer") return ParamKind::Integer;
  if (s == "continuous") return ParamKind::Continuous;
  if (s == "log-continuous") return ParamKind::LogContinuous;
  throw ConfigError("unknown parameter kind: " + s);
}

struct ParamSpec {
  std::string name;
  ParamKind kind = ParamKind::Continuous;
  double low = 0.0;
  double high = 1.0;

  void validate() const {
    if (!(low < high)) throw ConfigError("param '" + name + "': low must be < high");
    if (kind == ParamKind::LogContinuous && !(low > 0.0))
      throw ConfigError("param '" + name + "': log-continuous requires low > 0");
  }
};

class SearchSpace {
 public:
  SearchSpace() = default;
  explicit SearchSpace(std::vector<ParamSpec> params) : params_(std::move(params)) {
    if (params_.empty()) throw ConfigError("search space must have at least one parameter");
    for (std::size_t i = 0; i < params_.size(); ++i) {
      params_[i].validate();
      for (std::size_t j = 0; j < i; ++j)
        if (params_[j].name == params_[i].name)
          throw ConfigError("duplicate parameter name: " + params_[i].name);
    }
  }

  int dim() const { return static_cast<int>(params_.size()); }
  const std::vector<ParamSpec>& params() const { return params_; }

  const ParamSpec* find(const std::string& name) const {
    for (const auto& p : params_)
      if (p.name == name) return &p;
    return nullptr;
  }

 private:
  std::vector<ParamSpec> params_;
};

struct Candidate {
  std::vector<double> genes;
  std::optional<double> fitness;  // lower is better
};

struct HyperParams {
  int batch_size = 8;
  int epochs = 50;
  double learning_rate = 1e-3;
  double dropout = 0.1;
};

// Projects genes onto [0,1]^d. Idempotent.
inline std::vector<double> clamp_unit(std::span<const double> genes) {
  std::vector<double> out(genes.begin(), genes.end());
  for (double& g : out) {
    if (!std::isfinite(g)) throw std::domain_error("non-finite gene");
    g = std::clamp(g, 0.0, 1.0);
  }
  return out;
}

// Maps one unit-interval gene to decoded units for a single parameter.
// Integer kinds round half-up, then clamp to stay inside the bounds.
inline double decode_param(const ParamSpec& p, double g) {
  if (!(g >= 0.0 && g <= 1.0)) throw std::domain_error("gene outside [0,1] for '" + p.name + "'");
  switch (p.kind) {
    case ParamKind::Integer: {
      double v = std::floor(p.low + g * (p.high - p.low) + 0.5);
      return std::clamp(v, p.low, p.high);
    }
    case ParamKind::Continuous:
      return p.low + g * (p.high - p.low);
    case ParamKind::LogContinuous:
      return std::pow(10.0, (1.0 - g) * std::log10(p.low) + g * std::log10(p.high));
  }
  throw std::logic_error("unreachable");
}

inline std::vector<double> decode_values(const SearchSpace& space, std::span<const double> genes) {
  if (static_cast<int>(genes.size()) != space.dim())
    throw std::invalid_argument("genome dimension mismatch: expected " +
                                std::to_string(space.dim()) + ", got " +
                                std::to_string(genes.size()));
  std::vector<double> out;
  out.reserve(genes.size());
  for (std::size_t i = 0; i < genes.size(); ++i)
    out.push_back(decode_param(space.params()[i], genes[i]));
  return out;
}

// Decodes a genome into typed hyperparameters by parameter name.
// Parameters absent from the space keep their defaults (dropout stays at
// 0.1 when the space fixes it).
inline HyperParams decode(const SearchSpace& space, std::span<const double> genes) {
  std::vector<double> vals = decode_values(space, genes);
  HyperParams hp;
  for (int i = 0; i < space.dim(); ++i) {
    const std::string& name = space.params()[i].name;
    if (name == "batch_size") hp.batch_size = static_cast<int>(vals[i]);
    else if (name == "epochs") hp.epochs = static_cast<int>(vals[i]);
    else if (name == "learning_rate") hp.learning_rate = vals[i];
    else if (name == "dropout") hp.dropout = vals[i];
  }
  return hp;
}

inline Candidate sample_uniform(const SearchSpace& space, Rng& rng) {
  Candidate c;
  c.genes.resize(space.dim());
  for (double& g : c.genes) g = uniform01(rng);
  return c;
}

// Default hyperparameter space: batch size and epochs as integers,
// learning rate on a log scale, dropout fixed at 0.1 unless tuned.
// The bounds are an envelope around commonly reported optima, not values
// taken from any particular study.
inline SearchSpace default_hyperparam_space(bool tune_dropout = false) {
  std::vector<ParamSpec> p{
      {"batch_size", ParamKind::Integer, 4.0, 32.0},
      {"epochs", ParamKind::Integer, 50.0, 500.0},
      {"learning_rate", ParamKind::LogContinuous, 1e-5, 1e-2},
  };
  if (tune_dropout) p.push_back({"dropout", ParamKind::Continuous, 0.0, 0.5});
  return SearchSpace(std::move(p));
}

}  // namespace mhvit
