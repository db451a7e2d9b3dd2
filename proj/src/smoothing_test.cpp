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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "smoothmarket/errors.hpp"
#include "smoothmarket/random.hpp"

namespace smoothmarket {
namespace {

BidderBatch Single(std::vector<double> per_bidder, BatchRole role) {
  const std::size_t n = per_bidder.size();
  return BidderBatch(1, n, 1, role, std::move(per_bidder));
}

TEST(AllocateSoftTest, Examples) {
  const auto a = allocate_soft(Single({0.5, 0.5}, BatchRole::kBids), 0.3);
  EXPECT_DOUBLE_EQ(a.allocations(0, 0, 0), 0.5);
  EXPECT_TRUE(a.smoothed);
  const auto b = allocate_soft(Single({0.2, 0.2, 0.2}, BatchRole::kBids), 0.01);
  for (int i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(b.allocations(0, i, 0), 1.0 / 3);
  // 1 / (1 + e^20) to 16 digits.
  const auto c = allocate_soft(Single({0.3, 0.5}, BatchRole::kBids), 0.01);
  EXPECT_NEAR(c.allocations(0, 0, 0), 2.0611536181902e-09, 1e-21);
}

TEST(AllocateSoftTest, RejectsBadTemperature) {
  const auto bids = Single({0.3, 0.5}, BatchRole::kBids);
  EXPECT_THROW(allocate_soft(bids, 0.0), ConfigError);
  EXPECT_THROW(allocate_soft(bids, -1.0), ConfigError);
  EXPECT_THROW(allocate_soft(bids, 1e-7), ConfigError);
  EXPECT_NO_THROW(allocate_soft(bids, kMinTemperature));
}

TEST(AllocateSoftTest, NormalizationAndShiftInvariance) {
  Rng rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double lambda : {1.0, 0.1, 0.01, 0.001, 1e-6}) {
    BidderBatch bids(200, 4, 3, BatchRole::kBids);
    for (double& x : bids.data()) x = u(rng);
    BidderBatch shifted = bids;
    for (double& x : shifted.data()) x += 0.37;
    const auto a = allocate_soft(bids, lambda).allocations;
    const auto s = allocate_soft(shifted, lambda).allocations;
    for (std::size_t b = 0; b < bids.batch(); ++b) {
      for (std::size_t k = 0; k < bids.items(); ++k) {
        double total = 0.0;
        for (std::size_t i = 0; i < bids.bidders(); ++i) {
          total += a(b, i, k);
          ASSERT_NEAR(a(b, i, k), s(b, i, k), 1e-12);
        }
        ASSERT_NEAR(total, 1.0, 1e-12);
      }
    }
  }
}

TEST(AllocateSoftTest, SharpensAsTemperatureFalls) {
  const auto bids = Single({0.45, 0.5, 0.2}, BatchRole::kBids);
  double previous = 0.0;
  for (double lambda : {0.1, 0.01, 0.001}) {
    const double x = allocate_soft(bids, lambda).allocations(0, 1, 0);
    EXPECT_GT(x, previous);
    previous = x;
  }
}

TEST(PriceSoftTest, Examples) {
  const MechanismSpec fp{.payment_rule = PaymentRule::kFirstPrice};
  const MechanismSpec sp{.payment_rule = PaymentRule::kSecondPrice};
  EXPECT_EQ(price_soft(Single({0.3, 0.5}, BatchRole::kBids), fp)(0, 0), 0.5);
  EXPECT_EQ(price_soft(Single({0.3, 0.5}, BatchRole::kBids), sp)(0, 0), 0.3);
  const MechanismSpec fp3{.payment_rule = PaymentRule::kFirstPrice,
                          .bidders = 3};
  EXPECT_EQ(price_soft(Single({0.7, 0.2, 0.5}, BatchRole::kBids), fp3)(0, 0),
            0.7);
}

TEST(UtilitySoftTest, Examples) {
  const MechanismSpec fp{.payment_rule = PaymentRule::kFirstPrice};
  const auto values = Single({1.0, 0.8}, BatchRole::kValuations);
  for (double lambda : {1.0, 0.01}) {
    EXPECT_DOUBLE_EQ(
        utility_soft(values, Single({0.5, 0.5}, BatchRole::kBids), fp, lambda)(
            0, 0),
        0.25);
  }
  const auto far = Single({0.9, 0.1}, BatchRole::kBids);
  EXPECT_NEAR(utility_soft(values, far, fp, 0.01)(0, 0),
              utility_exact(values, far, fp)(0, 0), 1e-8);
}

// |utility_soft - utility_exact| shrinks pointwise with the temperature.
TEST(UtilitySoftTest, ConvergesToExactGame) {
  Rng rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (PaymentRule rule : {PaymentRule::kFirstPrice, PaymentRule::kSecondPrice}) {
    const MechanismSpec spec{.payment_rule = rule, .bidders = 3};
    for (int trial = 0; trial < 200; ++trial) {
      BidderBatch v(1, 3, 1, BatchRole::kValuations);
      BidderBatch b(1, 3, 1, BatchRole::kBids);
      for (double& x : v.data()) x = u(rng);
      for (double& x : b.data()) x = u(rng);
      std::vector<double> sorted(b.data().begin(), b.data().end());
      std::sort(sorted.begin(), sorted.end());
      if (sorted[2] - sorted[1] < 0.05) continue;
      const auto exact = utility_exact(v, b, spec);
      double previous = std::numeric_limits<double>::infinity();
      for (double lambda : {0.1, 0.01, 0.001}) {
        const double err =
            (utility_soft(v, b, spec, lambda) - exact).cwiseAbs().maxCoeff();
        EXPECT_LT(err, previous);
        previous = err;
      }
    }
  }
}

// Central finite differences of utility_soft in the own bid.
double FiniteDifference(const BidderBatch& values, const BidderBatch& bids,
                        const MechanismSpec& spec, double lambda,
                        std::size_t i, std::size_t k, double h) {
  BidderBatch up = bids;
  BidderBatch down = bids;
  up(0, i, k) += h;
  down(0, i, k) -= h;
  return (utility_soft(values, up, spec, lambda)(0, i) -
          utility_soft(values, down, spec, lambda)(0, i)) /
         (2.0 * h);
}

bool AwayFromKinks(const BidderBatch& bids, std::size_t k, double gap) {
  for (std::size_t i = 0; i < bids.bidders(); ++i) {
    for (std::size_t j = i + 1; j < bids.bidders(); ++j) {
      if (std::abs(bids(0, i, k) - bids(0, j, k)) <= gap) return false;
    }
  }
  return true;
}

TEST(GradUtilitySoftTest, MatchesFiniteDifferences) {
  Rng rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> nb(2, 5);
  std::uniform_int_distribution<int> nm(1, 3);
  const std::vector<double> lambdas = {0.3, 0.1, 0.03, 0.01};
  int checked = 0;
  double worst = 0.0;
  while (checked < 1000) {
    const MechanismSpec spec{.payment_rule = checked % 2 == 0
                                                 ? PaymentRule::kFirstPrice
                                                 : PaymentRule::kSecondPrice,
                             .bidders = static_cast<std::size_t>(nb(rng)),
                             .items = static_cast<std::size_t>(nm(rng))};
    const double lambda = lambdas[checked % lambdas.size()];
    BidderBatch v(1, spec.bidders, spec.items, BatchRole::kValuations);
    BidderBatch b(1, spec.bidders, spec.items, BatchRole::kBids);
    for (double& x : v.data()) x = u(rng);
    for (double& x : b.data()) x = 0.05 + 0.9 * u(rng);
    bool ok = true;
    for (std::size_t k = 0; k < spec.items; ++k) ok &= AwayFromKinks(b, k, 1e-3);
    if (!ok) continue;
    const BidderBatch g = grad_utility_soft_wrt_bid(v, b, spec, lambda);
    for (std::size_t i = 0; i < spec.bidders; ++i) {
      for (std::size_t k = 0; k < spec.items; ++k) {
        const double fd = FiniteDifference(v, b, spec, lambda, i, k, 1e-6);
        const double err = std::abs(fd - g(0, i, k)) /
                           std::max(std::abs(g(0, i, k)), 1.0);
        worst = std::max(worst, err);
      }
    }
    ++checked;
  }
  EXPECT_LE(worst, 1e-6);
}

TEST(GradUtilitySoftTest, SymmetricTieSlope) {
  const double lambda = 0.05;
  const auto bids = Single({0.5, 0.5}, BatchRole::kBids);
  BidderBatch up = bids;
  up(0, 0, 0) += 1e-7;
  const double slope = (allocate_soft(up, lambda).allocations(0, 0, 0) -
                        allocate_soft(bids, lambda).allocations(0, 0, 0)) /
                       1e-7;
  EXPECT_NEAR(slope, 0.25 / lambda, 1e-4);
}

TEST(GradUtilitySoftTest, LosingBidGetsPositiveFeedback) {
  const MechanismSpec fp{.payment_rule = PaymentRule::kFirstPrice};
  const double lambda = 0.01;
  const auto values = Single({0.9, 0.6}, BatchRole::kValuations);
  const auto bids = Single({0.35, 0.4}, BatchRole::kBids);
  const BidderBatch g = grad_utility_soft_wrt_bid(values, bids, fp, lambda);
  const double x = allocate_soft(bids, lambda).allocations(0, 0, 0);
  EXPECT_GT(g(0, 0, 0), 0.0);
  EXPECT_NEAR(g(0, 0, 0), x * (1 - x) * (0.9 - 0.4) / lambda, 1e-15);
}

}  // namespace
}  // namespace smoothmarket
