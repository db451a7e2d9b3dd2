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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "smoothmarket/random.hpp"

namespace smoothmarket {

enum class PaymentRule { kFirstPrice, kSecondPrice };

std::string_view to_string(PaymentRule rule);
PaymentRule parse_payment_rule(std::string_view name);

inline constexpr std::size_t kMaxItems = 8;

// A sealed-bid auction of `items` separately sold goods among `bidders`
// bidders with i.i.d. uniform [0, max_value] valuations.
struct MechanismSpec {
  PaymentRule payment_rule = PaymentRule::kFirstPrice;
  std::size_t bidders = 2;
  std::size_t items = 1;
  double max_value = 1.0;

  void validate() const;
};

enum class BatchRole { kValuations, kBids, kAllocations, kPayments };

// Dense (batch, bidders, items) tensor. The items of one (sample, bidder)
// pair are contiguous, so the data doubles as an items x (batch * bidders)
// column-major matrix of policy inputs or outputs.
class BidderBatch {
 public:
  BidderBatch() = default;
  BidderBatch(std::size_t batch, std::size_t bidders, std::size_t items,
              BatchRole role, double fill = 0.0);
  BidderBatch(std::size_t batch, std::size_t bidders, std::size_t items,
              BatchRole role, std::vector<double> data);

  std::size_t batch() const { return batch_; }
  std::size_t bidders() const { return bidders_; }
  std::size_t items() const { return items_; }
  std::size_t rows() const { return batch_ * bidders_; }
  std::size_t size() const { return data_.size(); }
  BatchRole role() const { return role_; }
  void set_role(BatchRole role) { role_ = role; }

  double operator()(std::size_t b, std::size_t i, std::size_t k) const {
    return data_[(b * bidders_ + i) * items_ + k];
  }
  double& operator()(std::size_t b, std::size_t i, std::size_t k) {
    return data_[(b * bidders_ + i) * items_ + k];
  }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  // items x rows view.
  Eigen::Map<const Eigen::MatrixXd> as_matrix() const {
    return {data_.data(), static_cast<Eigen::Index>(items_),
            static_cast<Eigen::Index>(rows())};
  }
  Eigen::Map<Eigen::MatrixXd> as_matrix() {
    return {data_.data(), static_cast<Eigen::Index>(items_),
            static_cast<Eigen::Index>(rows())};
  }

  bool same_shape(const BidderBatch& other) const {
    return batch_ == other.batch_ && bidders_ == other.bidders_ &&
           items_ == other.items_;
  }

  // Throws ConfigError unless every entry is finite and nonnegative.
  void validate() const;

  // Copies samples [begin, end) into a new batch.
  BidderBatch slice(std::size_t begin, std::size_t end) const;

 private:
  std::size_t batch_ = 0;
  std::size_t bidders_ = 0;
  std::size_t items_ = 0;
  BatchRole role_ = BatchRole::kValuations;
  std::vector<double> data_;
};

struct AuctionOutcome {
  BidderBatch allocations;
  BidderBatch payments;
  bool smoothed = false;
};

// Draws i.i.d. uniform [0, max_value] valuations.
BidderBatch sample_valuations(const MechanismSpec& spec, std::size_t batch,
                              Rng& rng);

// Highest and second-highest bid of one item with lowest-index tie-breaking.
struct ItemRanking {
  std::size_t winner = 0;
  double highest = 0.0;
  std::size_t runner_up = 0;
  double second = 0.0;
};

ItemRanking rank_item(const BidderBatch& bids, std::size_t b, std::size_t k);

// The price the item winner pays under `rule`.
inline double winning_price(PaymentRule rule, const ItemRanking& r) {
  return rule == PaymentRule::kFirstPrice ? r.highest : r.second;
}

void check_shape(const BidderBatch& batch, const MechanismSpec& spec);

// Winner-take-all allocation with lowest-index tie-breaking. The outcome
// carries the payments_exact payments.
AuctionOutcome allocate_exact(const BidderBatch& bids,
                              const MechanismSpec& spec);

BidderBatch payments_exact(const BidderBatch& bids,
                           const BidderBatch& allocations,
                           const MechanismSpec& spec);

// Ex post utilities, batch x bidders.
Eigen::MatrixXd utility_exact(const BidderBatch& values,
                              const BidderBatch& bids,
                              const MechanismSpec& spec);

}  // namespace smoothmarket
