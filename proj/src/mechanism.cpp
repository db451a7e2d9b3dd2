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

#include "smoothmarket/mechanism.hpp"

#include <cmath>
#include <string>

#include "smoothmarket/errors.hpp"

namespace smoothmarket {

std::string_view to_string(PaymentRule rule) {
  return rule == PaymentRule::kFirstPrice ? "fpsb" : "spsb";
}

PaymentRule parse_payment_rule(std::string_view name) {
  if (name == "fpsb" || name == "first_price") return PaymentRule::kFirstPrice;
  if (name == "spsb" || name == "second_price") return PaymentRule::kSecondPrice;
  throw ConfigError("unknown payment rule '" + std::string(name) + "'");
}

void MechanismSpec::validate() const {
  if (bidders < 2) throw ConfigError("an auction needs at least two bidders");
  if (items < 1 || items > kMaxItems) {
    throw ConfigError("number of items must lie in [1, " +
                      std::to_string(kMaxItems) + "]");
  }
  if (!(max_value > 0.0) || !std::isfinite(max_value)) {
    throw ConfigError("max_value must be positive and finite");
  }
}

BidderBatch::BidderBatch(std::size_t batch, std::size_t bidders,
                         std::size_t items, BatchRole role, double fill)
    : batch_(batch),
      bidders_(bidders),
      items_(items),
      role_(role),
      data_(batch * bidders * items, fill) {}

BidderBatch::BidderBatch(std::size_t batch, std::size_t bidders,
                         std::size_t items, BatchRole role,
                         std::vector<double> data)
    : batch_(batch),
      bidders_(bidders),
      items_(items),
      role_(role),
      data_(std::move(data)) {
  if (data_.size() != batch * bidders * items) {
    throw ConfigError("data size does not match (batch, bidders, items)");
  }
}

void BidderBatch::validate() const {
  for (double x : data_) {
    if (!std::isfinite(x) || x < 0.0) {
      throw ConfigError("batch entries must be finite and nonnegative");
    }
  }
}

BidderBatch BidderBatch::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > batch_) throw ConfigError("slice out of range");
  const std::size_t stride = bidders_ * items_;
  std::vector<double> part(data_.begin() + begin * stride,
                           data_.begin() + end * stride);
  return {end - begin, bidders_, items_, role_, std::move(part)};
}

BidderBatch sample_valuations(const MechanismSpec& spec, std::size_t batch,
                              Rng& rng) {
  BidderBatch values(batch, spec.bidders, spec.items, BatchRole::kValuations);
  std::uniform_real_distribution<double> prior(0.0, spec.max_value);
  for (double& v : values.data()) v = prior(rng);
  return values;
}

ItemRanking rank_item(const BidderBatch& bids, std::size_t b, std::size_t k) {
  ItemRanking r;
  r.winner = 0;
  r.highest = bids(b, 0, k);
  for (std::size_t i = 1; i < bids.bidders(); ++i) {
    const double x = bids(b, i, k);
    if (x > r.highest) {
      r.highest = x;
      r.winner = i;
    }
  }
  bool found = false;
  for (std::size_t i = 0; i < bids.bidders(); ++i) {
    if (i == r.winner) continue;
    const double x = bids(b, i, k);
    if (!found || x > r.second) {
      r.second = x;
      r.runner_up = i;
      found = true;
    }
  }
  return r;
}

void check_shape(const BidderBatch& batch, const MechanismSpec& spec) {
  if (batch.bidders() != spec.bidders || batch.items() != spec.items) {
    throw ConfigError("batch shape does not match the mechanism");
  }
}

AuctionOutcome allocate_exact(const BidderBatch& bids,
                              const MechanismSpec& spec) {
  check_shape(bids, spec);
  AuctionOutcome out{
      BidderBatch(bids.batch(), spec.bidders, spec.items,
                  BatchRole::kAllocations),
      BidderBatch(bids.batch(), spec.bidders, spec.items, BatchRole::kPayments),
      false};
  for (std::size_t b = 0; b < bids.batch(); ++b) {
    for (std::size_t k = 0; k < spec.items; ++k) {
      out.allocations(b, rank_item(bids, b, k).winner, k) = 1.0;
    }
  }
  out.payments = payments_exact(bids, out.allocations, spec);
  return out;
}

BidderBatch payments_exact(const BidderBatch& bids,
                           const BidderBatch& allocations,
                           const MechanismSpec& spec) {
  check_shape(bids, spec);
  if (!bids.same_shape(allocations)) {
    throw ConfigError("allocations and bids differ in shape");
  }
  BidderBatch payments(bids.batch(), spec.bidders, spec.items,
                       BatchRole::kPayments);
  for (std::size_t b = 0; b < bids.batch(); ++b) {
    for (std::size_t k = 0; k < spec.items; ++k) {
      std::size_t winner = spec.bidders;
      for (std::size_t i = 0; i < spec.bidders; ++i) {
        if (allocations(b, i, k) == 1.0) {
          if (winner != spec.bidders) {
            throw ConfigError("exact allocation has more than one winner");
          }
          winner = i;
        }
      }
      if (winner == spec.bidders) {
        throw ConfigError("exact allocation has no winner");
      }
      double price = bids(b, winner, k);
      if (spec.payment_rule == PaymentRule::kSecondPrice) {
        price = 0.0;
        for (std::size_t j = 0; j < spec.bidders; ++j) {
          if (j != winner) price = std::max(price, bids(b, j, k));
        }
      }
      payments(b, winner, k) = price;
    }
  }
  return payments;
}

Eigen::MatrixXd utility_exact(const BidderBatch& values,
                              const BidderBatch& bids,
                              const MechanismSpec& spec) {
  check_shape(bids, spec);
  if (!values.same_shape(bids)) {
    throw ConfigError("valuations and bids differ in shape");
  }
  Eigen::MatrixXd utility =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(bids.batch()),
                            static_cast<Eigen::Index>(spec.bidders));
  for (std::size_t b = 0; b < bids.batch(); ++b) {
    for (std::size_t k = 0; k < spec.items; ++k) {
      const ItemRanking r = rank_item(bids, b, k);
      utility(static_cast<Eigen::Index>(b),
              static_cast<Eigen::Index>(r.winner)) +=
          values(b, r.winner, k) - winning_price(spec.payment_rule, r);
    }
  }
  return utility;
}

}  // namespace smoothmarket
