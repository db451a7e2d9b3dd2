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

#include "smoothmarket/learner.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

#include "smoothmarket/errors.hpp"
#include "smoothmarket/random.hpp"

namespace smoothmarket {

StepSchedule parse_step_schedule(const std::string& name) {
  if (name == "constant") return StepSchedule::kConstant;
  if (name == "cosine") return StepSchedule::kCosine;
  throw ConfigError("unknown step schedule: " + name);
}

std::string to_string(StepSchedule schedule) {
  return schedule == StepSchedule::kCosine ? "cosine" : "constant";
}

void ExperimentConfig::validate() const {
  mechanism.validate();
  estimator.validate();
  optimizer.validate();
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (eval_every < 1) throw ConfigError("eval_every must be >= 1");
  if (eval_batch < 1) throw ConfigError("evaluation batch must be >= 1");
  if (track_utility_loss) utility_loss.validate();
  if (track_grad_variance && variance_repeats < 2) {
    throw ConfigError("gradient variance needs >= 2 repeats");
  }
  for (std::size_t width : hidden_layers) {
    if (width == 0) throw ConfigError("hidden layer widths must be positive");
  }
}

OutputHead ExperimentConfig::policy_head() const {
  return estimator.kind == EstimatorKind::kReinforce ? OutputHead::kGaussian
                                                     : OutputHead::kBid;
}

bool MetricRecord::same_metrics(const MetricRecord& other) const {
  const bool l2_equal =
      (std::isnan(l2) && std::isnan(other.l2)) || l2 == other.l2;
  return iteration == other.iteration && l2_equal &&
         utility_loss == other.utility_loss &&
         utility_loss_clamped == other.utility_loss_clamped &&
         grad_variance == other.grad_variance;
}

TrainingResult run_training(const ExperimentConfig& config,
                            const ProgressCallback& progress) {
  config.validate();
  const MechanismSpec& spec = config.mechanism;
  const OutputHead head = config.policy_head();

  PolicyNet net = PolicyNet::initialized(
      PolicyNet::default_layers(spec.items, head, config.hidden_layers), head,
      derive_seed(config.seed, Stream::kInit));
  pretrain(net, spec.max_value, config.pretraining,
           derive_seed(config.seed, Stream::kPretrain));

  const std::optional<BneReference> bne = bne_strategy(spec);
  const Eigen::MatrixXd eval_values = sample_item_values(
      spec, config.eval_batch, derive_seed(config.seed, Stream::kEvaluation));
  const BidFunction strategy = as_bid_function(net);
  const auto current_l2 = [&] {
    return bne ? l2_distance(strategy, *bne, eval_values)
               : std::numeric_limits<double>::quiet_NaN();
  };

  AdamOptimizer optimizer(net.parameter_count(), config.optimizer);
  std::vector<MetricRecord> records;
  using Clock = std::chrono::steady_clock;
  auto window_start = Clock::now();
  std::size_t window_iterations = 0;

  for (std::size_t t = 1; t <= config.iterations; ++t) {
    Rng rng = make_rng(config.seed, Stream::kTrain, t);
    const BidderBatch values = sample_valuations(spec, config.batch_size, rng);
    const GradientEstimate g =
        estimate(net, values, spec, config.estimator,
                 derive_seed(config.seed, Stream::kPerturbation, t));
    if (config.schedule == StepSchedule::kCosine) {
      // Evaluated at the midpoint of step t so the last step stays positive.
      const double progress_frac =
          (static_cast<double>(t) - 0.5) / static_cast<double>(config.iterations);
      optimizer.set_step_size(config.optimizer.step_size * 0.5 *
                              (1.0 + std::cos(std::numbers::pi * progress_frac)));
    }
    optimizer.ascend(net.parameters(), g.grad);
    ++window_iterations;

    if (t % config.eval_every != 0 && t != config.iterations) continue;

    MetricRecord record;
    record.iteration = t;
    if (config.record_timing) {
      const std::chrono::duration<double> elapsed = Clock::now() - window_start;
      record.seconds_per_iter =
          elapsed.count() / static_cast<double>(window_iterations);
    }
    record.l2 = current_l2();
    if (config.track_utility_loss) {
      const UtilityLossEstimate loss = utility_loss_max(
          strategy, spec, config.utility_loss,
          derive_seed(config.seed, Stream::kUtilityLoss, t));
      record.utility_loss = loss.value;
      record.utility_loss_clamped = loss.clamped;
    }
    if (config.track_grad_variance) {
      record.grad_variance = gradient_variance(
          net, spec, config.estimator, config.batch_size,
          config.variance_repeats, derive_seed(config.seed, Stream::kVariance, t));
    }
    records.push_back(record);
    if (progress) progress(record);
    window_start = Clock::now();
    window_iterations = 0;
  }
  const double final_l2 = current_l2();
  return {std::move(net), std::move(records), final_l2};
}

std::vector<SweepPoint> lambda_sweep(const ExperimentConfig& config,
                                     const std::vector<double>& temperatures) {
  if (config.estimator.kind != EstimatorKind::kSmoothMarket) {
    throw ConfigError("a temperature sweep needs the smooth-market estimator");
  }
  std::vector<SweepPoint> points;
  points.reserve(temperatures.size());
  for (double lambda : temperatures) {
    ExperimentConfig run = config;
    run.estimator.temperature = lambda;
    points.push_back({lambda, config.seed, run_training(run).final_l2});
  }
  return points;
}

}  // namespace smoothmarket
