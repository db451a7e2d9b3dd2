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

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "smoothmarket/estimators.hpp"
#include "smoothmarket/evaluation.hpp"
#include "smoothmarket/mechanism.hpp"
#include "smoothmarket/optimizer.hpp"
#include "smoothmarket/policy.hpp"

namespace smoothmarket {

enum class StepSchedule {
  kConstant,
  kCosine,  // half cosine from the configured step size down to zero
};

StepSchedule parse_step_schedule(const std::string& name);
std::string to_string(StepSchedule schedule);

struct ExperimentConfig {
  MechanismSpec mechanism;
  EstimatorConfig estimator;
  std::size_t iterations = 2000;
  std::size_t batch_size = 1 << 14;
  std::uint64_t seed = 1;
  std::size_t eval_every = 50;
  std::size_t eval_batch = 1 << 16;
  std::vector<std::size_t> hidden_layers = {10, 10};
  AdamConfig optimizer;
  StepSchedule schedule = StepSchedule::kCosine;
  PretrainConfig pretraining;

  // Optional per-record metrics.
  bool track_utility_loss = false;
  UtilityLossConfig utility_loss;
  bool track_grad_variance = false;
  std::size_t variance_repeats = 8;
  // Wall-clock timing makes the metric stream machine dependent.
  bool record_timing = false;

  void validate() const;
  OutputHead policy_head() const;
};

struct MetricRecord {
  std::size_t iteration = 0;
  double l2 = 0.0;  // NaN without an analytic equilibrium
  std::optional<double> utility_loss;
  bool utility_loss_clamped = false;
  std::optional<double> grad_variance;
  std::optional<double> seconds_per_iter;

  // Equality on every field except timing.
  bool same_metrics(const MetricRecord& other) const;
};

struct TrainingResult {
  PolicyNet policy;
  std::vector<MetricRecord> records;
  double final_l2 = 0.0;
};

using ProgressCallback = std::function<void(const MetricRecord&)>;

// Pretrains toward truthful bidding, then runs `iterations` rounds of
// {fresh valuation batch, gradient estimate, ascent step}. A record is
// appended every eval_every iterations and after the last one. All bidders
// share the one policy.
TrainingResult run_training(const ExperimentConfig& config,
                            const ProgressCallback& progress = {});

struct SweepPoint {
  double temperature = 0.0;
  std::uint64_t seed = 0;
  double final_l2 = 0.0;
};

// One smooth-market training run per temperature, all with config.seed.
std::vector<SweepPoint> lambda_sweep(const ExperimentConfig& config,
                                     const std::vector<double>& temperatures);

}  // namespace smoothmarket
