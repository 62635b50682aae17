// Command-line harness: campaign orchestration, benchmarks, one-off
// training, dataset generation and report rendering.

#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "mhvit/harness/report.hpp"

namespace {

using namespace mhvit;

std::vector<std::uint64_t> parse_seed_list(const std::string& s) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    seeds.push_back(std::stoull(tok));
  }
  if (seeds.empty()) throw ConfigError("empty seed list");
  return seeds;
}

HyperParams parse_hp(const std::string& s) {
  HyperParams hp;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw ConfigError("bad --hp entry: " + tok);
    const std::string key = tok.substr(0, eq);
    const std::string val = tok.substr(eq + 1);
    if (key == "B") hp.batch_size = std::stoi(val);
    else if (key == "E") hp.epochs = std::stoi(val);
    else if (key == "lr") hp.learning_rate = std::stod(val);
    else if (key == "dropout") hp.dropout = std::stod(val);
    else throw ConfigError("unknown hyperparameter key: " + key);
  }
  return hp;
}

void print_summary(const CampaignSummary& summary) {
  for (const auto& a : summary.algorithms) {
    std::cout << a.algorithm << ": median best fitness " << a.median_best << " (IQR "
              << a.iqr_best << ") over " << a.seeds.size() << " seed(s)\n";
    for (const auto& s : a.seeds)
      std::cout << "  seed " << s.seed << ": best " << s.best_fitness << " after "
                << s.evaluations_used << " evaluations\n";
  }
}

int run(int argc, char** argv) {
  CLI::App app{"Metaheuristic hyperparameter search over a from-scratch ViT classifier"};
  app.require_subcommand(1);

  // optimize
  std::string cfg_path, out_dir;
  auto* opt = app.add_subcommand("optimize", "Run a campaign from a config file");
  opt->add_option("--config", cfg_path, "Config file (JSON)")->required();
  opt->add_option("--out", out_dir, "Output directory (overrides campaign.out)");

  // resume
  std::string resume_dir;
  auto* res = app.add_subcommand("resume", "Resume an interrupted campaign");
  res->add_option("--out", resume_dir, "Campaign output directory")->required();

  // bench
  std::string bench_fn = "sphere", bench_algo = "de", bench_seeds = "1";
  int bench_dim = 5, bench_budget = 4000;
  std::string bench_out;
  auto* ben = app.add_subcommand("bench", "Run an optimizer against an analytic benchmark");
  ben->add_option("--fn", bench_fn, "sphere|rastrigin|rosenbrock");
  ben->add_option("--algo", bench_algo, "de|ga|pso|aco|random");
  ben->add_option("--dim", bench_dim, "Dimension");
  ben->add_option("--budget", bench_budget, "Evaluation budget");
  ben->add_option("--seeds", bench_seeds, "Comma-separated seed list");
  ben->add_option("--out", bench_out, "Optional output directory for logs");

  // train
  std::string train_hp = "B=8,E=50,lr=1e-3,dropout=0.1", train_data, train_ckpt;
  std::uint64_t train_seed = 1;
  bool train_augment = false;
  auto* tr = app.add_subcommand("train", "Train one ViT with fixed hyperparameters");
  tr->add_option("--hp", train_hp, "B=..,E=..,lr=..,dropout=..");
  tr->add_option("--data", train_data, "Dataset file")->required();
  tr->add_option("--seed", train_seed, "Master seed");
  tr->add_option("--save", train_ckpt, "Write the trained model checkpoint here");
  tr->add_flag("--augment", train_augment, "Augment training batches");

  // data gen / data inspect
  auto* data = app.add_subcommand("data", "Dataset utilities");
  data->require_subcommand(1);
  SynthSpec spec;
  std::string gen_out;
  auto* gen = data->add_subcommand("gen", "Generate a synthetic dataset");
  gen->add_option("--n", spec.n_samples, "Sample count");
  gen->add_option("--size", spec.image_size, "Image side length");
  gen->add_option("--difficulty", spec.difficulty, "Noise amplitude in [0,1]");
  gen->add_option("--seed", spec.seed, "Generator seed");
  gen->add_option("--out", gen_out, "Output file")->required();
  std::string inspect_path;
  auto* ins = data->add_subcommand("inspect", "Print dataset header and class counts");
  ins->add_option("file", inspect_path, "Dataset file")->required();

  // report
  std::string report_dir;
  auto* rep = app.add_subcommand("report", "Render tables from a completed campaign");
  rep->add_option("--out", report_dir, "Campaign output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;  // bad invocation is a config error
  }

  if (*opt) {
    RunConfig cfg = load_config(cfg_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (cfg.out_dir.empty()) throw ConfigError("no output directory (campaign.out or --out)");
    print_summary(run_campaign(cfg, cfg.out_dir));
  } else if (*res) {
    print_summary(resume_campaign(resume_dir));
  } else if (*ben) {
    Json doc{{"objective", {{"name", bench_fn}, {"dim", bench_dim}}},
             {"campaign",
              {{"algorithms", Json::array({bench_algo})},
               {"budget", bench_budget},
               {"seeds", parse_seed_list(bench_seeds)}}}};
    RunConfig cfg = parse_config(doc);
    if (!bench_out.empty()) {
      print_summary(run_campaign(cfg, bench_out));
    } else {
      const auto env = detail::build_env(cfg);
      std::vector<SeedOutcome> outs;
      for (auto seed : cfg.seeds)
        outs.push_back(run_seed(cfg, env, bench_algo, seed, nullptr));
      CampaignSummary s;
      s.algorithms.push_back(detail::summarize(bench_algo, std::move(outs)));
      print_summary(s);
    }
  } else if (*tr) {
    const HyperParams hp = parse_hp(train_hp);
    Dataset full = load_dataset(train_data);
    auto splits = split(full, SplitFractions{}, train_seed);
    ViTConfig cfg = ViTConfig::desk_scale();
    cfg.image_size = full.image_size();
    cfg.dropout = hp.dropout;
    ViTModel model(cfg);
    model.init(derive_seed(train_seed, 1));
    Rng rng(derive_seed(train_seed, 2));
    TrainOptions opts;
    opts.augment = train_augment;
    TrainHistory hist = train(model, splits[0], splits[2], hp, rng, opts);
    if (hist.diverged) {
      std::cerr << "training diverged (non-finite loss)\n";
      return 2;
    }
    for (std::size_t e = 0; e < hist.train_loss.size(); ++e)
      std::cout << "epoch " << e + 1 << ": loss " << hist.train_loss[e] << ", val acc "
                << hist.val_accuracy[e] << '\n';
    std::vector<int> preds, labels;
    for (const auto& s : splits[1].images) {
      Tensor logits = forward(model, {s.pixels});
      int arg = 0;
      for (int j = 1; j < cfg.num_classes; ++j)
        if (logits(0, j) > logits(0, arg)) arg = j;
      preds.push_back(arg);
      labels.push_back(s.label);
    }
    const ConfusionMatrix cm = confusion(preds, labels);
    const MetricsReport r = report(cm);
    std::cout << "test split:\n" << render_confusion(cm);
    std::cout << "accuracy " << r.accuracy << ", macro precision " << r.macro_precision
              << ", macro recall " << r.macro_recall << ", macro F1 " << r.macro_f1 << '\n';
    if (!train_ckpt.empty()) save_model(model, train_ckpt);
  } else if (*gen) {
    save_dataset(generate_synthetic(spec), gen_out);
    std::cout << "wrote " << spec.n_samples << " samples to " << gen_out << '\n';
  } else if (*ins) {
    Dataset ds = load_dataset(inspect_path);
    std::array<int, 3> counts{};
    for (const auto& s : ds.images) ++counts[s.label];
    std::cout << "samples: " << ds.images.size() << ", image size: " << ds.image_size()
              << ", split: " << to_string(ds.split) << '\n'
              << "class counts: AD=" << counts[0] << " MCI=" << counts[1] << " HC=" << counts[2]
              << '\n';
  } else if (*rep) {
    ReportPaths paths = write_report(report_dir);
    if (!paths.best_hyperparams.empty()) std::cout << "wrote " << paths.best_hyperparams << '\n';
    if (!paths.metrics_comparison.empty())
      std::cout << "wrote " << paths.metrics_comparison << '\n';
    std::cout << "wrote " << paths.convergence.size() << " convergence file(s)\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const mhvit::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
