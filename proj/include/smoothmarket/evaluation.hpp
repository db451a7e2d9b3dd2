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

#include <Eigen/Dense>

#include "smoothmarket/mechanism.hpp"
#include "smoothmarket/policy.hpp"

namespace smoothmarket {

// Maps valuations (items x samples) to bids of the same shape.
using BidFunction = std::function<Eigen::MatrixXd(
    const Eigen::Ref<const Eigen::MatrixXd>& values)>;

BidFunction as_bid_function(const PolicyNet& net);

// Closed-form symmetric equilibrium of an i.i.d. uniform sealed-bid auction:
// beta*(v) = slope * v on every item.
struct BneReference {
  MechanismSpec mechanism;
  double slope = 1.0;

  double operator()(double value) const { return slope * value; }
  Eigen::MatrixXd bids(const Eigen::Ref<const Eigen::MatrixXd>& values) const {
    return slope * values;
  }
  BidFunction as_bid_function() const;
};

// Truthful for second price, (n - 1) / n * v for first price. Empty when no
// analytic equilibrium is known.
std::optional<BneReference> bne_strategy(const MechanismSpec& spec);

// sqrt(mean over samples and items of (beta(v) - beta*(v))^2).
double l2_distance(const BidFunction& strategy, const BneReference& bne,
                   const Eigen::Ref<const Eigen::MatrixXd>& eval_values);
double l2_distance(const BidFunction& strategy, const BneReference& bne,
                   std::size_t n_eval, std::uint64_t seed);

// Uniform [0, max_value] valuations, items x count.
Eigen::MatrixXd sample_item_values(const MechanismSpec& spec,
                                   std::size_t count, std::uint64_t seed);

struct UtilityLossConfig {
  std::size_t n_own = 1 << 8;
  std::size_t n_grid = 1 << 6;
  std::size_t n_opp = 1 << 14;

  void validate() const;
};

struct UtilityLossEstimate {
  double value = 0.0;  // max(raw, 0)
  double raw = 0.0;
  bool clamped = false;
};

// Worst interim utility loss of bidder 0 over n_own sampled valuations. For
// each valuation, the best response over an equidistant grid of n_grid bids
// in [0, max_value] per item is compared with the played bid, with interim
// utilities averaged over n_opp opponent profiles playing `strategy`.
// Items are separable, so the best response is searched item by item.
UtilityLossEstimate utility_loss_max(const BidFunction& strategy,
                                     const MechanismSpec& spec,
                                     const UtilityLossConfig& config,
                                     std::uint64_t seed);

// Resolution of utility_loss_max at the given sample sizes: the largest loss
// the analytic equilibrium shows over `repeats` independent evaluations, but
// never below the Monte Carlo standard error bound max_value / (2 sqrt(n_opp))
// of a single interim utility estimate.
double utility_loss_noise_floor(const MechanismSpec& spec,
                                const UtilityLossConfig& config,
                                std::uint64_t seed, std::size_t repeats = 3);

}  // namespace smoothmarket
