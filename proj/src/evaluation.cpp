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

#include "smoothmarket/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "smoothmarket/errors.hpp"
#include "smoothmarket/random.hpp"

namespace smoothmarket {

using Eigen::Index;

BidFunction as_bid_function(const PolicyNet& net) {
  return [&net](const Eigen::Ref<const Eigen::MatrixXd>& values) {
    return net.bids(values);
  };
}

BidFunction BneReference::as_bid_function() const {
  const double s = slope;
  return [s](const Eigen::Ref<const Eigen::MatrixXd>& values) {
    return Eigen::MatrixXd(s * values);
  };
}

std::optional<BneReference> bne_strategy(const MechanismSpec& spec) {
  spec.validate();
  switch (spec.payment_rule) {
    case PaymentRule::kSecondPrice:
      return BneReference{spec, 1.0};
    case PaymentRule::kFirstPrice:
      return BneReference{spec, static_cast<double>(spec.bidders - 1) /
                                    static_cast<double>(spec.bidders)};
  }
  return std::nullopt;
}

double l2_distance(const BidFunction& strategy, const BneReference& bne,
                   const Eigen::Ref<const Eigen::MatrixXd>& eval_values) {
  if (eval_values.cols() == 0) throw ConfigError("n_eval must be >= 1");
  const Eigen::MatrixXd played = strategy(eval_values);
  return std::sqrt((played - bne.bids(eval_values)).squaredNorm() /
                   static_cast<double>(eval_values.size()));
}

Eigen::MatrixXd sample_item_values(const MechanismSpec& spec,
                                   std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> prior(0.0, spec.max_value);
  Eigen::MatrixXd values(static_cast<Index>(spec.items),
                         static_cast<Index>(count));
  for (Index c = 0; c < values.cols(); ++c) {
    for (Index r = 0; r < values.rows(); ++r) values(r, c) = prior(rng);
  }
  return values;
}

double l2_distance(const BidFunction& strategy, const BneReference& bne,
                   std::size_t n_eval, std::uint64_t seed) {
  if (n_eval == 0) throw ConfigError("n_eval must be >= 1");
  return l2_distance(strategy, bne,
                     sample_item_values(bne.mechanism, n_eval, seed));
}

void UtilityLossConfig::validate() const {
  if (n_own < 1 || n_opp < 1) {
    throw ConfigError("utility loss needs at least one own and opponent sample");
  }
  if (n_grid < 2) throw ConfigError("utility loss grid needs >= 2 points");
}

namespace {

// Empirical distribution of the highest opponent bid on one item. Bidder 0
// wins ties, so a bid x wins against every opponent maximum <= x.
class RivalDistribution {
 public:
  explicit RivalDistribution(std::vector<double> highest)
      : sorted_(std::move(highest)), prefix_(sorted_.size() + 1, 0.0) {
    std::sort(sorted_.begin(), sorted_.end());
    for (std::size_t j = 0; j < sorted_.size(); ++j) {
      prefix_[j + 1] = prefix_[j] + sorted_[j];
    }
  }

  // Mean utility of value v bidding x.
  double utility(PaymentRule rule, double v, double x) const {
    const std::size_t wins = static_cast<std::size_t>(
        std::upper_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin());
    const double n = static_cast<double>(sorted_.size());
    if (rule == PaymentRule::kFirstPrice) {
      return (v - x) * static_cast<double>(wins) / n;
    }
    return (v * static_cast<double>(wins) - prefix_[wins]) / n;
  }

 private:
  std::vector<double> sorted_;
  std::vector<double> prefix_;
};

}  // namespace

UtilityLossEstimate utility_loss_max(const BidFunction& strategy,
                                     const MechanismSpec& spec,
                                     const UtilityLossConfig& config,
                                     std::uint64_t seed) {
  spec.validate();
  config.validate();
  const std::size_t m = spec.items;
  const std::size_t opponents = spec.bidders - 1;

  const Eigen::MatrixXd opp_values = sample_item_values(
      spec, config.n_opp * opponents,
      derive_seed(seed, Stream::kUtilityLoss, 1));
  const Eigen::MatrixXd opp_bids = strategy(opp_values);
  std::vector<RivalDistribution> rivals;
  rivals.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    std::vector<double> highest(config.n_opp);
    for (std::size_t s = 0; s < config.n_opp; ++s) {
      double top = opp_bids(static_cast<Index>(k),
                            static_cast<Index>(s * opponents));
      for (std::size_t j = 1; j < opponents; ++j) {
        top = std::max(top, opp_bids(static_cast<Index>(k),
                                     static_cast<Index>(s * opponents + j)));
      }
      highest[s] = top;
    }
    rivals.emplace_back(std::move(highest));
  }

  std::vector<double> grid(config.n_grid);
  for (std::size_t j = 0; j < config.n_grid; ++j) {
    grid[j] = spec.max_value * static_cast<double>(j) /
              static_cast<double>(config.n_grid - 1);
  }

  const Eigen::MatrixXd own_values = sample_item_values(
      spec, config.n_own, derive_seed(seed, Stream::kUtilityLoss, 0));
  const Eigen::MatrixXd own_bids = strategy(own_values);

  double worst = -std::numeric_limits<double>::infinity();
  for (Index s = 0; s < own_values.cols(); ++s) {
    double loss = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const Index row = static_cast<Index>(k);
      const double v = own_values(row, s);
      double best = -std::numeric_limits<double>::infinity();
      for (double x : grid) {
        best = std::max(best, rivals[k].utility(spec.payment_rule, v, x));
      }
      loss += best - rivals[k].utility(spec.payment_rule, v, own_bids(row, s));
    }
    worst = std::max(worst, loss);
  }
  UtilityLossEstimate out;
  out.raw = worst;
  out.clamped = worst < 0.0;
  out.value = std::max(worst, 0.0);
  return out;
}

double utility_loss_noise_floor(const MechanismSpec& spec,
                                const UtilityLossConfig& config,
                                std::uint64_t seed, std::size_t repeats) {
  const auto bne = bne_strategy(spec);
  if (!bne) throw ConfigError("no analytic equilibrium for this mechanism");
  const BidFunction strategy = bne->as_bid_function();
  double floor =
      spec.max_value / (2.0 * std::sqrt(static_cast<double>(config.n_opp)));
  for (std::size_t r = 0; r < repeats; ++r) {
    const UtilityLossEstimate est = utility_loss_max(
        strategy, spec, config, derive_seed(seed, Stream::kUtilityLoss, 100 + r));
    floor = std::max(floor, est.value);
  }
  return floor;
}

}  // namespace smoothmarket
