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

#include "smoothmarket/policy.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "smoothmarket/errors.hpp"
#include "smoothmarket/random.hpp"

namespace smoothmarket {
namespace {

double WeightedOutput(const PolicyNet& net, const Eigen::MatrixXd& x,
                      const Eigen::MatrixXd& upstream) {
  return net.forward(x).output().cwiseProduct(upstream).sum();
}

TEST(PolicyNetTest, ParameterCount) {
  const PolicyNet net({2, 10, 10, 2});
  EXPECT_EQ(net.parameter_count(), 3u * 10 + 11u * 10 + 11u * 2);
  EXPECT_EQ(PolicyNet::default_layers(3, OutputHead::kGaussian),
            (std::vector<std::size_t>{3, 10, 10, 6}));
  EXPECT_THROW(PolicyNet({2, 10, 3}), ConfigError);
  EXPECT_THROW(PolicyNet({2, 10, 2}, OutputHead::kGaussian), ConfigError);
}

TEST(PolicyNetTest, ZeroWeightsBidZero) {
  const PolicyNet net({1, 10, 10, 1});
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(1, 50).cwiseAbs();
  EXPECT_EQ(net.bids(x).cwiseAbs().maxCoeff(), 0.0);
}

TEST(PolicyNetTest, SingleLinearPathPassesValuesThrough) {
  PolicyNet net({1, 1});
  net.parameters()[0] = 1.0;
  Eigen::MatrixXd x(1, 4);
  x << 0.0, 0.25, 0.5, 1.0;
  EXPECT_EQ(net.bids(x), x);

  // Gradient of the output with respect to the weight is the input.
  const ForwardCache cache = net.forward(x.col(2));
  const std::vector<double> g =
      net.backward(cache, Eigen::MatrixXd::Ones(1, 1));
  EXPECT_DOUBLE_EQ(g[0], 0.5);
  EXPECT_DOUBLE_EQ(g[1], 1.0);
}

TEST(PolicyNetTest, OutputsAreNonnegative) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const PolicyNet net =
        PolicyNet::initialized({2, 10, 10, 2}, OutputHead::kBid, seed);
    const Eigen::MatrixXd x = 3.0 * Eigen::MatrixXd::Random(2, 100);
    EXPECT_GE(net.bids(x).minCoeff(), 0.0);
  }
}

TEST(PolicyNetTest, ZeroUpstreamGivesZeroGradient) {
  const PolicyNet net =
      PolicyNet::initialized({2, 10, 10, 4}, OutputHead::kGaussian, 4);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(2, 7).cwiseAbs();
  const std::vector<double> g =
      net.backward(net.forward(x), Eigen::MatrixXd::Zero(4, 7));
  for (double gi : g) EXPECT_EQ(gi, 0.0);
}

TEST(PolicyNetTest, ShapeMismatchThrows) {
  const PolicyNet net({2, 10, 2});
  EXPECT_THROW(net.forward(Eigen::MatrixXd::Zero(3, 4)), ConfigError);
  const ForwardCache cache = net.forward(Eigen::MatrixXd::Zero(2, 4));
  EXPECT_THROW(net.backward(cache, Eigen::MatrixXd::Zero(2, 5)), ConfigError);
}

// Central differences over every parameter of random nets, skipping
// coordinates where a ReLU output sits on its kink.
TEST(PolicyNetTest, BackwardMatchesFiniteDifferences) {
  Rng rng(99);
  std::uniform_int_distribution<int> width(1, 8);
  std::uniform_int_distribution<int> items(1, 3);
  double worst = 0.0;
  std::size_t checked = 0;
  for (std::uint64_t trial = 0; trial < 120; ++trial) {
    const std::size_t m = items(rng);
    const OutputHead head =
        trial % 3 == 0 ? OutputHead::kGaussian : OutputHead::kBid;
    const std::size_t out = head == OutputHead::kGaussian ? 2 * m : m;
    std::vector<std::size_t> sizes{m};
    for (int l = 0; l < 1 + static_cast<int>(trial % 3); ++l) {
      sizes.push_back(width(rng));
    }
    sizes.push_back(out);
    PolicyNet net = PolicyNet::initialized(sizes, head, trial);
    // Shift output biases up so most ReLU outputs are active.
    auto params = net.parameters();
    for (std::size_t j = params.size() - out; j < params.size(); ++j) {
      params[j] += 0.5;
    }
    const Eigen::MatrixXd x = Eigen::MatrixXd::Random(m, 3).cwiseAbs();
    const Eigen::MatrixXd upstream = Eigen::MatrixXd::Random(out, 3);
    const ForwardCache cache = net.forward(x);
    const Eigen::MatrixXd& z = cache.pre_activations.back();
    bool near_kink = false;
    for (Eigen::Index r = 0; r < z.rows(); ++r) {
      for (Eigen::Index c = 0; c < z.cols(); ++c) {
        near_kink |= std::abs(z(r, c)) < 1e-3;
      }
    }
    if (near_kink) continue;
    const std::vector<double> g = net.backward(cache, upstream);
    const double h = 1e-6;
    for (std::size_t j = 0; j < net.parameter_count(); ++j) {
      const double saved = params[j];
      params[j] = saved + h;
      const double up = WeightedOutput(net, x, upstream);
      params[j] = saved - h;
      const double down = WeightedOutput(net, x, upstream);
      params[j] = saved;
      const double fd = (up - down) / (2 * h);
      worst = std::max(worst, std::abs(fd - g[j]) / std::max(std::abs(g[j]), 1.0));
    }
    ++checked;
  }
  EXPECT_GE(checked, 100u);
  EXPECT_LE(worst, 1e-6);
}

TEST(PolicyNetTest, SaveLoadRoundTrip) {
  const PolicyNet net =
      PolicyNet::initialized({2, 10, 10, 4}, OutputHead::kGaussian, 12);
  std::stringstream buffer;
  net.save(buffer);
  EXPECT_EQ(PolicyNet::load(buffer), net);

  std::stringstream bad("not-a-policy 1\n");
  EXPECT_THROW(PolicyNet::load(bad), ConfigError);
}

TEST(PretrainTest, ApproachesTruthfulBidding) {
  for (std::size_t m : {1u, 2u}) {
    std::vector<double> errors;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      PolicyNet net = PolicyNet::initialized(
          PolicyNet::default_layers(m, OutputHead::kBid), OutputHead::kBid,
          seed);
      const Eigen::MatrixXd v =
          (Eigen::MatrixXd::Random(m, 4096).array() + 1.0) / 2.0;
      const double before = truthful_mse(net, v);
      pretrain(net, 1.0, PretrainConfig{}, seed + 100);
      const double after = truthful_mse(net, v);
      EXPECT_LT(after, before);
      EXPECT_LT(after, 1e-2);
      const Eigen::MatrixXd err = net.bids(v) - v;
      for (std::size_t k = 0; k < m; ++k) {
        EXPECT_LT(err.row(k).squaredNorm() / v.cols(), 1e-2);
      }
      errors.push_back(after);
    }
    std::nth_element(errors.begin(), errors.begin() + 15, errors.end());
    EXPECT_LT(errors[15], 1e-3) << "median over seeds, m = " << m;
  }
}

// A network whose output unit is inactive on every input still learns.
TEST(PretrainTest, RecoversDeadOutputUnit) {
  PolicyNet net({1, 10, 10, 1});
  auto params = net.parameters();
  for (std::size_t j = 0; j < params.size(); ++j) {
    params[j] = 0.1 * std::sin(static_cast<double>(j));
  }
  params[params.size() - 1] = -1.0;
  const Eigen::MatrixXd v = Eigen::RowVectorXd::LinSpaced(101, 0.0, 1.0);
  ASSERT_EQ(net.bids(v).maxCoeff(), 0.0);
  pretrain(net, 1.0, PretrainConfig{}, 1);
  EXPECT_LT(truthful_mse(net, v), 1e-2);
}

TEST(PretrainTest, GaussianHeadScale) {
  PolicyNet net = PolicyNet::initialized(
      PolicyNet::default_layers(1, OutputHead::kGaussian),
      OutputHead::kGaussian, 8);
  pretrain(net, 1.0, PretrainConfig{}, 9);
  const Eigen::MatrixXd v = Eigen::RowVectorXd::LinSpaced(11, 0.0, 1.0);
  const Eigen::MatrixXd out = net.forward(v).output();
  EXPECT_LT(truthful_mse(net, v), 1e-2);
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    EXPECT_NEAR(softplus(out(1, c)), 0.1, 0.05);
  }
}

TEST(ActivationTest, Values) {
  EXPECT_EQ(selu(0.0), 0.0);
  EXPECT_DOUBLE_EQ(selu(1.0), kSeluScale);
  EXPECT_NEAR(selu(-50.0), -kSeluScale * kSeluAlpha, 1e-15);
  EXPECT_NEAR(softplus(0.0), std::log(2.0), 1e-15);
  EXPECT_NEAR(softplus(inverse_softplus(0.1)), 0.1, 1e-15);
  EXPECT_NEAR(softplus(800.0), 800.0, 1e-12);
}

}  // namespace
}  // namespace smoothmarket
