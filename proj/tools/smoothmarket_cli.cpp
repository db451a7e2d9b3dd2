// Copyright 2026 The smoothmarket Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line experiment runner.
//
//   smoothmarket train    --mechanism fpsb --estimator sm --lambda 0.01 --out runs/a
//   smoothmarket sweep    --lambdas 0.1,0.03,0.0119,0.003 --seeds 1,2 --out runs/s
//   smoothmarket oracle   --v1 0.5,0.75,1 --lambdas 0.1,0.01,0.001 --out runs/o
//   smoothmarket variance --lambdas 0.05,0.01,0.002 --repeats 8 --out runs/v
//
// Every option may also come from --config FILE, a flat key=value file using
// the long option names. Command-line values override the file, which
// overrides the built-in defaults.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <nlohmann/json.hpp>
#include <vector>

#include "CLI11.hpp"
#include "smoothmarket/errors.hpp"
#include "smoothmarket/estimators.hpp"
#include "smoothmarket/io.hpp"
#include "smoothmarket/learner.hpp"
#include "smoothmarket/oracle.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace smoothmarket;

namespace {

constexpr const char* kVersion = "smoothmarket 0.1.0";

struct Options {
  std::string mechanism = "fpsb";
  std::size_t bidders = 2;
  std::size_t items = 1;
  std::string estimator = "sm";
  double lambda = 0.01;
  std::size_t pop = 64;
  double sigma = 1.0;
  bool antithetic = false;
  std::size_t batch = 1 << 14;
  std::size_t iters = 2000;
  std::uint64_t seed = 1;
  std::size_t eval_every = 50;
  std::size_t eval_batch = 1 << 16;
  double step_size = 1e-3;
  std::string schedule = "cosine";
  std::size_t pretrain_iters = 50;
  bool utility_loss = false;
  bool grad_variance = false;
  bool timing = false;
  std::string out = "runs/latest";

  std::vector<double> lambdas;
  std::vector<std::uint64_t> seeds;
  std::vector<double> v1 = {0.5, 0.75, 1.0};
  double slope = 0.5;
  double bid_slope = 0.5;
  std::size_t nodes = 16;
  bool empty_grid = false;
  std::size_t repeats = 8;
  std::vector<std::string> variance_estimators = {"sm", "es", "reinforce"};
};

void add_options(CLI::App& app, Options& o) {
  app.add_option("--mechanism", o.mechanism, "Payment rule")
      ->check(CLI::IsMember({"fpsb", "spsb"}));
  app.add_option("--bidders", o.bidders, "Number of bidders")
      ->check(CLI::Range(2, 1 << 10));
  app.add_option("--items", o.items, "Number of separately sold items")
      ->check(CLI::Range(1, static_cast<int>(kMaxItems)));
  app.add_option("--estimator", o.estimator, "Gradient estimator")
      ->check(CLI::IsMember({"sm", "es", "reinforce"}));
  app.add_option("--lambda", o.lambda, "Smoothing temperature")
      ->check(CLI::PositiveNumber);
  app.add_option("--pop", o.pop, "Evolution strategies population size")
      ->check(CLI::Range(2, 1 << 20));
  app.add_option("--sigma", o.sigma, "Evolution strategies perturbation scale")
      ->check(CLI::PositiveNumber);
  app.add_flag("--antithetic", o.antithetic, "Mirror ES perturbations");
  app.add_option("--batch", o.batch, "Valuation samples per iteration")
      ->check(CLI::PositiveNumber);
  app.add_option("--iters", o.iters, "Training iterations");
  app.add_option("--seed", o.seed, "Random seed");
  app.add_option("--eval-every", o.eval_every, "Iterations between metric rows")
      ->check(CLI::PositiveNumber);
  app.add_option("--eval-batch", o.eval_batch, "Samples for the L2 metric")
      ->check(CLI::PositiveNumber);
  app.add_option("--step-size", o.step_size, "Optimizer step size")
      ->check(CLI::PositiveNumber);
  app.add_option("--schedule", o.schedule, "Step size schedule")
      ->check(CLI::IsMember({"constant", "cosine"}));
  app.add_option("--pretrain-iters", o.pretrain_iters,
                 "Supervised iterations toward truthful bidding");
  app.add_flag("--utility-loss", o.utility_loss,
               "Record the grid utility loss with every metric row");
  app.add_flag("--grad-variance", o.grad_variance,
               "Record the gradient variance with every metric row");
  app.add_flag("--timing", o.timing,
               "Record wall-clock seconds per iteration (not reproducible)");
  app.add_option("--out", o.out, "Output directory");

  app.add_option("--lambdas", o.lambdas, "Temperature list")
      ->delimiter(',');
  app.add_option("--seeds", o.seeds, "Seed list for sweeps")->delimiter(',');
  app.add_option("--v1", o.v1, "Own valuations for the oracle grid")
      ->delimiter(',');
  app.add_option("--slope", o.slope, "Opponent bid slope for the oracle")
      ->check(CLI::Range(1e-9, 1.0));
  app.add_option("--bid-slope", o.bid_slope,
                 "Own bid as a multiple of v1 for the oracle");
  app.add_option("--nodes", o.nodes, "Gauss-Legendre nodes per panel")
      ->check(CLI::Range(16, 1024));
  app.add_flag("--empty-grid", o.empty_grid, "Emit a header-only oracle table");
  app.add_option("--repeats", o.repeats, "Independent estimates per variance")
      ->check(CLI::Range(2, 1 << 20));
  app.add_option("--variance-estimators", o.variance_estimators,
                 "Estimators for the variance table")
      ->delimiter(',')
      ->check(CLI::IsMember({"sm", "es", "reinforce"}));
}

ExperimentConfig experiment_from(const Options& o) {
  ExperimentConfig config;
  config.mechanism.payment_rule = parse_payment_rule(o.mechanism);
  config.mechanism.bidders = o.bidders;
  config.mechanism.items = o.items;
  config.estimator.kind = parse_estimator(o.estimator);
  config.estimator.temperature = o.lambda;
  config.estimator.population_size = o.pop;
  config.estimator.sigma = o.sigma;
  config.estimator.antithetic = o.antithetic;
  config.batch_size = o.batch;
  config.iterations = o.iters;
  config.seed = o.seed;
  config.eval_every = o.eval_every;
  config.eval_batch = o.eval_batch;
  config.optimizer.step_size = o.step_size;
  config.schedule = parse_step_schedule(o.schedule);
  config.pretraining.iterations = o.pretrain_iters;
  config.track_utility_loss = o.utility_loss;
  config.track_grad_variance = o.grad_variance;
  config.record_timing = o.timing;
  config.validate();
  return config;
}

json config_snapshot(const Options& o) {
  return {{"mechanism", o.mechanism},
          {"bidders", o.bidders},
          {"items", o.items},
          {"max_value", 1.0},
          {"estimator", o.estimator},
          {"lambda", o.lambda},
          {"pop", o.pop},
          {"sigma", o.sigma},
          {"antithetic", o.antithetic},
          {"batch", o.batch},
          {"iters", o.iters},
          {"seed", o.seed},
          {"eval-every", o.eval_every},
          {"eval-batch", o.eval_batch},
          {"step-size", o.step_size},
          {"schedule", o.schedule},
          {"pretrain-iters", o.pretrain_iters},
          {"utility-loss", o.utility_loss},
          {"grad-variance", o.grad_variance},
          {"timing", o.timing},
          {"lambdas", o.lambdas},
          {"seeds", o.seeds},
          {"v1", o.v1},
          {"slope", o.slope},
          {"bid-slope", o.bid_slope},
          {"nodes", o.nodes},
          {"empty-grid", o.empty_grid},
          {"repeats", o.repeats},
          {"variance-estimators", o.variance_estimators}};
}

template <typename WriteFn>
fs::path write_file(const fs::path& path, WriteFn write) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  write(out);
  out.close();
  if (!out) throw std::runtime_error("failed writing " + path.string());
  return path;
}

void write_manifest(const fs::path& dir, const std::string& command,
                    const Options& o, const std::vector<fs::path>& outputs) {
  json manifest;
  manifest["tool"] = kVersion;
  manifest["csv_schema"] = kCsvSchemaVersion;
  manifest["command"] = command;
  manifest["seed"] = o.seed;
  manifest["config"] = config_snapshot(o);
  json files = json::array();
  for (const auto& p : outputs) files.push_back(p.filename().string());
  manifest["outputs"] = files;
  write_file(dir / "manifest.json",
             [&](std::ostream& out) { out << manifest.dump(2) << '\n'; });
}

int cmd_train(const Options& o) {
  const ExperimentConfig config = experiment_from(o);
  const fs::path dir(o.out);
  fs::create_directories(dir);
  const TrainingResult result = run_training(config, [](const MetricRecord& r) {
    std::cerr << "iter " << r.iteration << " l2 " << format_real(r.l2) << '\n';
  });
  std::vector<fs::path> outputs;
  outputs.push_back(write_file(dir / "metrics.csv", [&](std::ostream& out) {
    write_metrics_csv(out, result.records);
  }));
  outputs.push_back(write_file(dir / "policy.txt", [&](std::ostream& out) {
    result.policy.save(out);
  }));
  write_manifest(dir, "train", o, outputs);
  std::cout << "final_l2 " << format_real(result.final_l2) << '\n';
  return 0;
}

int cmd_sweep(const Options& o) {
  if (o.lambdas.empty()) throw ConfigError("--lambdas must not be empty");
  ExperimentConfig config = experiment_from(o);
  const std::vector<std::uint64_t> seeds =
      o.seeds.empty() ? std::vector<std::uint64_t>{o.seed} : o.seeds;
  std::vector<SweepPoint> rows;
  for (std::uint64_t seed : seeds) {
    config.seed = seed;
    for (const SweepPoint& p : lambda_sweep(config, o.lambdas)) {
      std::cerr << "lambda " << format_real(p.temperature) << " seed "
                << p.seed << " l2 " << format_real(p.final_l2) << '\n';
      rows.push_back(p);
    }
  }
  const fs::path dir(o.out);
  fs::create_directories(dir);
  std::vector<fs::path> outputs{write_file(
      dir / "sweep.csv", [&](std::ostream& out) { write_sweep_csv(out, rows); })};
  write_manifest(dir, "sweep", o, outputs);
  return 0;
}

int cmd_oracle(const Options& o) {
  std::vector<OracleRow> rows;
  if (!o.empty_grid) {
    const std::vector<double> lambdas =
        o.lambdas.empty() ? std::vector<double>{0.1, 0.01, 0.001} : o.lambdas;
    rows = oracle_table(o.v1, lambdas, o.bid_slope, o.slope, o.nodes);
  }
  const fs::path dir(o.out);
  fs::create_directories(dir);
  std::vector<fs::path> outputs{write_file(
      dir / "oracle.csv", [&](std::ostream& out) { write_oracle_csv(out, rows); })};
  write_manifest(dir, "oracle", o, outputs);
  return 0;
}

int cmd_variance(const Options& o) {
  ExperimentConfig config = experiment_from(o);
  config.iterations = 0;
  const std::vector<double> lambdas =
      o.lambdas.empty() ? std::vector<double>{o.lambda} : o.lambdas;
  std::vector<VarianceRow> rows;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const std::string& name : o.variance_estimators) {
    config.estimator.kind = parse_estimator(name);
    const PolicyNet net = run_training(config).policy;
    if (config.estimator.kind == EstimatorKind::kSmoothMarket) {
      for (double lambda : lambdas) {
        config.estimator.temperature = lambda;
        rows.push_back({name, lambda, 0, o.batch, o.repeats,
                        gradient_variance(net, config.mechanism,
                                          config.estimator, o.batch, o.repeats,
                                          o.seed)});
      }
    } else {
      const std::size_t pop =
          config.estimator.kind == EstimatorKind::kEvolutionStrategies ? o.pop
                                                                       : 0;
      rows.push_back({name, nan, pop, o.batch, o.repeats,
                      gradient_variance(net, config.mechanism, config.estimator,
                                        o.batch, o.repeats, o.seed)});
    }
    std::cerr << name << " variance " << format_real(rows.back().variance)
              << '\n';
  }
  const fs::path dir(o.out);
  fs::create_directories(dir);
  std::vector<fs::path> outputs{
      write_file(dir / "variance.csv",
                 [&](std::ostream& out) { write_variance_csv(out, rows); })};
  write_manifest(dir, "variance", o, outputs);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equilibrium learning in smoothed sealed-bid auctions"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "Flat key=value configuration file");
  app.require_subcommand(1);

  Options options;
  add_options(app, options);

  CLI::App* train =
      app.add_subcommand("train", "Train a shared bid policy by self-play");
  CLI::App* sweep =
      app.add_subcommand("sweep", "Final L2 over a grid of temperatures");
  CLI::App* oracle = app.add_subcommand(
      "oracle", "Closed-form vs quadrature smoothing error table");
  CLI::App* variance =
      app.add_subcommand("variance", "Gradient estimator variance table");
  for (CLI::App* sub : {train, sweep, oracle, variance}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version exit 0; usage errors share the config error code.
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (train->parsed()) return cmd_train(options);
    if (sweep->parsed()) return cmd_sweep(options);
    if (oracle->parsed()) return cmd_oracle(options);
    if (variance->parsed()) return cmd_variance(options);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
