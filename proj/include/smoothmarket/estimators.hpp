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
#include <span>
#include <string_view>
#include <vector>

#include "smoothmarket/mechanism.hpp"
#include "smoothmarket/policy.hpp"

namespace smoothmarket {

enum class EstimatorKind { kSmoothMarket, kEvolutionStrategies, kReinforce };

std::string_view to_string(EstimatorKind kind);
EstimatorKind parse_estimator(std::string_view name);

struct EstimatorConfig {
  EstimatorKind kind = EstimatorKind::kSmoothMarket;
  double temperature = 0.01;
  std::size_t population_size = 64;
  // Perturbation scale before division by sqrt(parameter count).
  double sigma = 1.0;
  bool antithetic = false;

  void validate() const;
};

struct GradientEstimate {
  std::vector<double> grad;
  EstimatorKind estimator = EstimatorKind::kSmoothMarket;
  std::size_t sample_size = 0;
  // Estimated variance of each entry of `grad` (squared standard error).
  std::optional<std::vector<double>> per_parameter_variance;
};

// Samples are split into this many contiguous groups to estimate the
// variance of first-order and score-function estimates by batch means.
inline constexpr std::size_t kVarianceGroups = 32;

// Pathwise gradient through the smoothed game. Every bidder role of every
// sample contributes d u_i^SM / d theta through its own bid only; opponents'
// bids are constants. The result is the mean over samples and roles.
GradientEstimate estimate_sm(const PolicyNet& net, const BidderBatch& values,
                             const MechanismSpec& spec, double temperature);

using Objective = std::function<double(std::span<const double> params)>;

struct EsSettings {
  std::size_t population_size = 64;
  double sigma = 1.0;  // absolute perturbation scale
  bool antithetic = false;
};

// Gaussian-smoothing gradient of `objective` at `theta`:
// mean over eps ~ N(0, I) of eps / sigma * objective(theta + sigma * eps).
// With antithetic pairing each pair contributes
// eps * (f(theta + sigma eps) - f(theta - sigma eps)) / (2 sigma).
// Member p draws its perturbation from a stream derived from (seed, p).
GradientEstimate es_gradient(std::span<const double> theta,
                             const Objective& objective,
                             const EsSettings& settings, std::uint64_t seed);

// sigma / sqrt(parameter count).
double effective_sigma(double sigma, std::size_t parameter_count);

// Evolution strategies on the exact game. The objective is the mean ex post
// utility of a bidder playing the perturbed policy against opponents playing
// the unperturbed one, averaged over samples and roles.
GradientEstimate estimate_es(const PolicyNet& net, const BidderBatch& values,
                             const MechanismSpec& spec,
                             const EstimatorConfig& config,
                             std::uint64_t seed);

struct GaussianScore {
  double d_mean = 0.0;
  double d_sigma = 0.0;
};

// Gradient of log N(action; mean, sigma^2) with respect to (mean, sigma).
GaussianScore gaussian_log_density_gradient(double mean, double sigma,
                                            double action);

// Score-function estimate on the exact game for a Gaussian-head policy.
// Actions a ~ N(mu(v), softplus(rho(v))^2) are clipped at zero before entering
// the auction.
GradientEstimate estimate_reinforce(const PolicyNet& net,
                                    const BidderBatch& values,
                                    const MechanismSpec& spec,
                                    std::uint64_t seed);

// Dispatches on config.kind. `seed` feeds the stochastic estimators.
GradientEstimate estimate(const PolicyNet& net, const BidderBatch& values,
                          const MechanismSpec& spec,
                          const EstimatorConfig& config, std::uint64_t seed);

// Mean over parameters of the per-parameter sample variance across
// `repeats` independent draws.
double gradient_variance(
    const std::function<GradientEstimate(std::size_t repeat)>& draw,
    std::size_t repeats);

// gradient_variance with a fresh valuation batch of size `batch` per repeat.
double gradient_variance(const PolicyNet& net, const MechanismSpec& spec,
                         const EstimatorConfig& config, std::size_t batch,
                         std::size_t repeats, std::uint64_t seed);

}  // namespace smoothmarket
