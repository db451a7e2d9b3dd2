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

#include "smoothmarket/smoothing.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "smoothmarket/errors.hpp"

namespace smoothmarket {

void validate_temperature(double temperature) {
  if (!std::isfinite(temperature) || !(temperature > 0.0)) {
    throw ConfigError("temperature must be positive");
  }
  if (temperature < kMinTemperature) {
    throw ConfigError("temperature below the numerical floor of 1e-6");
  }
}

void SmoothingConfig::validate() const { validate_temperature(temperature); }

namespace {

// Max-shifted softmax of item k of sample b, written to `out`.
void softmax_item(const BidderBatch& bids, std::size_t b, std::size_t k,
                  double temperature, std::vector<double>& out) {
  const std::size_t n = bids.bidders();
  double top = bids(b, 0, k);
  for (std::size_t i = 1; i < n; ++i) top = std::max(top, bids(b, i, k));
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::exp((bids(b, i, k) - top) / temperature);
    total += out[i];
  }
  for (std::size_t i = 0; i < n; ++i) out[i] /= total;
}

void check_pair(const BidderBatch& values, const BidderBatch& bids,
                const MechanismSpec& spec) {
  check_shape(bids, spec);
  if (!values.same_shape(bids)) {
    throw ConfigError("valuations and bids differ in shape");
  }
}

}  // namespace

AuctionOutcome allocate_soft(const BidderBatch& bids, double temperature) {
  validate_temperature(temperature);
  AuctionOutcome out{BidderBatch(bids.batch(), bids.bidders(), bids.items(),
                                 BatchRole::kAllocations),
                     BidderBatch(bids.batch(), bids.bidders(), bids.items(),
                                 BatchRole::kPayments),
                     true};
  std::vector<double> x(bids.bidders());
  for (std::size_t b = 0; b < bids.batch(); ++b) {
    for (std::size_t k = 0; k < bids.items(); ++k) {
      softmax_item(bids, b, k, temperature, x);
      for (std::size_t i = 0; i < bids.bidders(); ++i) {
        out.allocations(b, i, k) = x[i];
      }
    }
  }
  return out;
}

Eigen::MatrixXd price_soft(const BidderBatch& bids, const MechanismSpec& spec) {
  check_shape(bids, spec);
  Eigen::MatrixXd price(static_cast<Eigen::Index>(bids.batch()),
                        static_cast<Eigen::Index>(spec.items));
  for (std::size_t b = 0; b < bids.batch(); ++b) {
    for (std::size_t k = 0; k < spec.items; ++k) {
      // Only the winner pays, so the sum over bidders is the winner's price.
      price(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(k)) =
          winning_price(spec.payment_rule, rank_item(bids, b, k));
    }
  }
  return price;
}

Eigen::MatrixXd utility_soft(const BidderBatch& values,
                             const BidderBatch& bids,
                             const MechanismSpec& spec, double temperature) {
  validate_temperature(temperature);
  check_pair(values, bids, spec);
  Eigen::MatrixXd utility =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(bids.batch()),
                            static_cast<Eigen::Index>(spec.bidders));
  std::vector<double> x(spec.bidders);
  for (std::size_t b = 0; b < bids.batch(); ++b) {
    for (std::size_t k = 0; k < spec.items; ++k) {
      softmax_item(bids, b, k, temperature, x);
      const double price =
          winning_price(spec.payment_rule, rank_item(bids, b, k));
      for (std::size_t i = 0; i < spec.bidders; ++i) {
        utility(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(i)) +=
            (values(b, i, k) - price) * x[i];
      }
    }
  }
  return utility;
}

BidderBatch grad_utility_soft_wrt_bid(const BidderBatch& values,
                                      const BidderBatch& bids,
                                      const MechanismSpec& spec,
                                      double temperature) {
  validate_temperature(temperature);
  check_pair(values, bids, spec);
  BidderBatch grad(bids.batch(), spec.bidders, spec.items, BatchRole::kBids);
  std::vector<double> x(spec.bidders);
  for (std::size_t b = 0; b < bids.batch(); ++b) {
    for (std::size_t k = 0; k < spec.items; ++k) {
      softmax_item(bids, b, k, temperature, x);
      const ItemRanking r = rank_item(bids, b, k);
      const double price = winning_price(spec.payment_rule, r);
      const std::size_t price_setter =
          spec.payment_rule == PaymentRule::kFirstPrice ? r.winner
                                                        : r.runner_up;
      for (std::size_t i = 0; i < spec.bidders; ++i) {
        const double dprice = i == price_setter ? 1.0 : 0.0;
        grad(b, i, k) = -dprice * x[i] + (values(b, i, k) - price) * x[i] *
                                             (1.0 - x[i]) / temperature;
      }
    }
  }
  return grad;
}

}  // namespace smoothmarket
