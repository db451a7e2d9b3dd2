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

#include <Eigen/Dense>

#include "smoothmarket/mechanism.hpp"

namespace smoothmarket {

// Temperatures below this are rejected: the softmax gradient scales with
// 1/temperature and the surrogate is indistinguishable from the exact game.
inline constexpr double kMinTemperature = 1e-6;

struct SmoothingConfig {
  double temperature = 0.01;

  void validate() const;
};

void validate_temperature(double temperature);

// Softmax of bids / temperature over bidders, independently per item. The
// payments field is left at zero; prices come from price_soft.
AuctionOutcome allocate_soft(const BidderBatch& bids, double temperature);

// Sum over bidders of the exact payments, batch x items. This is the highest
// bid under first price and the second-highest under second price.
Eigen::MatrixXd price_soft(const BidderBatch& bids, const MechanismSpec& spec);

// Ex post utility in the smoothed game, batch x bidders:
// sum over items of (v - price_soft) * softmax allocation.
Eigen::MatrixXd utility_soft(const BidderBatch& values,
                             const BidderBatch& bids,
                             const MechanismSpec& spec, double temperature);

// d utility_soft_i / d bid_{i,k} for every (sample, bidder, item). Only the
// bidder's own bid is differentiated. At price kinks the subgradient that
// assigns the price to the lowest-index bidder is used.
BidderBatch grad_utility_soft_wrt_bid(const BidderBatch& values,
                                      const BidderBatch& bids,
                                      const MechanismSpec& spec,
                                      double temperature);

}  // namespace smoothmarket
