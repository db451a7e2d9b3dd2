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

#include "smoothmarket/estimators.hpp"

#include <cmath>
#include <string>

#include "smoothmarket/errors.hpp"
#include "smoothmarket/smoothing.hpp"

namespace smoothmarket {

using Eigen::Index;

std::string_view to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kSmoothMarket:
      return "sm";
    case EstimatorKind::kEvolutionStrategies:
      return "es";
    case EstimatorKind::kReinforce:
      return "reinforce";
  }
  return "unknown";
}

EstimatorKind parse_estimator(std::string_view name) {
  if (name == "sm") return EstimatorKind::kSmoothMarket;
  if (name == "es" || name == "npga") return EstimatorKind::kEvolutionStrategies;
  if (name == "reinforce") return EstimatorKind::kReinforce;
  throw ConfigError("unknown estimator '" + std::string(name) + "'");
}

void EstimatorConfig::validate() const {
  if (kind == EstimatorKind::kSmoothMarket) validate_temperature(temperature);
  if (kind == EstimatorKind::kEvolutionStrategies) {
    if (population_size < 2) {
      throw ConfigError("evolution strategies need a population of >= 2");
    }
    if (antithetic && population_size % 2 != 0) {
      throw ConfigError("antithetic sampling needs an even population");
    }
    if (!(sigma > 0.0)) throw ConfigError("sigma must be positive");
  }
}

namespace {

// Runs `upstream_for` on kVarianceGroups contiguous sample groups, backprops
// each group and combines the group means. `upstream_for` returns the
// gradient of the group's mean objective with respect to the network output.
template <typename UpstreamFn>
GradientEstimate grouped_pathwise(const PolicyNet& net,
                                  const BidderBatch& values,
                                  EstimatorKind kind, UpstreamFn upstream_for) {
  const std::size_t batch = values.batch();
  if (batch == 0) throw ConfigError("empty valuation batch");
  const std::size_t groups = std::min(kVarianceGroups, batch);
  const std::size_t d = net.parameter_count();

  std::vector<std::vector<double>> group_grads;
  std::vector<double> weights;
  group_grads.reserve(groups);
  for (std::size_t g = 0; g < groups; ++g) {
    const std::size_t begin = g * batch / groups;
    const std::size_t end = (g + 1) * batch / groups;
    const BidderBatch part = values.slice(begin, end);
    const ForwardCache cache = net.forward(part.as_matrix());
    const Eigen::MatrixXd upstream = upstream_for(part, cache, begin);
    group_grads.push_back(net.backward(cache, upstream));
    weights.push_back(static_cast<double>(end - begin) /
                      static_cast<double>(batch));
  }

  GradientEstimate out;
  out.estimator = kind;
  out.sample_size = batch;
  out.grad.assign(d, 0.0);
  for (std::size_t g = 0; g < groups; ++g) {
    for (std::size_t j = 0; j < d; ++j) {
      out.grad[j] += weights[g] * group_grads[g][j];
    }
  }
  if (groups >= 2) {
    std::vector<double> var(d, 0.0);
    const double correction =
        static_cast<double>(groups) / static_cast<double>(groups - 1);
    for (std::size_t g = 0; g < groups; ++g) {
      for (std::size_t j = 0; j < d; ++j) {
        const double diff = group_grads[g][j] - out.grad[j];
        var[j] += correction * weights[g] * weights[g] * diff * diff;
      }
    }
    out.per_parameter_variance = std::move(var);
  }
  return out;
}

BidderBatch bids_from_output(const Eigen::MatrixXd& output, std::size_t items,
                             std::size_t batch, std::size_t bidders) {
  BidderBatch bids(batch, bidders, items, BatchRole::kBids);
  bids.as_matrix() = output.topRows(static_cast<Index>(items));
  return bids;
}

// Mean utility over samples and roles when each role deviates to its entry
// of `own` while every opponent keeps the bid summarized in `ranking`.
double mean_deviation_utility(const BidderBatch& values,
                              const Eigen::MatrixXd& own,
                              const std::vector<ItemRanking>& ranking,
                              const MechanismSpec& spec) {
  const std::size_t n = spec.bidders;
  const std::size_t m = spec.items;
  double total = 0.0;
  for (std::size_t b = 0; b < values.batch(); ++b) {
    for (std::size_t k = 0; k < m; ++k) {
      const ItemRanking& r = ranking[b * m + k];
      for (std::size_t i = 0; i < n; ++i) {
        const bool holds_top = i == r.winner;
        const double rival = holds_top ? r.second : r.highest;
        const std::size_t rival_index = holds_top ? r.runner_up : r.winner;
        const double bid =
            own(static_cast<Index>(k), static_cast<Index>(b * n + i));
        if (bid > rival || (bid == rival && i < rival_index)) {
          const double price =
              spec.payment_rule == PaymentRule::kFirstPrice ? bid : rival;
          total += values(b, i, k) - price;
        }
      }
    }
  }
  return total / static_cast<double>(values.batch() * n);
}

}  // namespace

GradientEstimate estimate_sm(const PolicyNet& net, const BidderBatch& values,
                             const MechanismSpec& spec, double temperature) {
  validate_temperature(temperature);
  check_shape(values, spec);
  if (net.head() != OutputHead::kBid || net.items() != spec.items) {
    throw ConfigError("smooth-market estimator needs a bid-head policy");
  }
  return grouped_pathwise(
      net, values, EstimatorKind::kSmoothMarket,
      [&](const BidderBatch& part, const ForwardCache& cache, std::size_t) {
        const BidderBatch bids =
            bids_from_output(cache.output(), spec.items, part.batch(),
                             spec.bidders);
        BidderBatch grad =
            grad_utility_soft_wrt_bid(part, bids, spec, temperature);
        return Eigen::MatrixXd(
            grad.as_matrix() /
            static_cast<double>(part.batch() * spec.bidders));
      });
}

double effective_sigma(double sigma, std::size_t parameter_count) {
  return sigma / std::sqrt(static_cast<double>(parameter_count));
}

GradientEstimate es_gradient(std::span<const double> theta,
                             const Objective& objective,
                             const EsSettings& settings, std::uint64_t seed) {
  if (settings.population_size < 2) {
    throw ConfigError("evolution strategies need a population of >= 2");
  }
  if (!(settings.sigma > 0.0)) throw ConfigError("sigma must be positive");
  if (settings.antithetic && settings.population_size % 2 != 0) {
    throw ConfigError("antithetic sampling needs an even population");
  }
  const std::size_t d = theta.size();
  const std::size_t draws = settings.antithetic ? settings.population_size / 2
                                                : settings.population_size;
  std::vector<double> eps(d);
  std::vector<double> point(d);
  std::vector<double> sum(d, 0.0);
  std::vector<double> sum_sq(d, 0.0);
  for (std::size_t p = 0; p < draws; ++p) {
    Rng rng = make_rng(seed, Stream::kPerturbation, p);
    std::normal_distribution<double> normal;
    for (double& e : eps) e = normal(rng);
    for (std::size_t j = 0; j < d; ++j) {
      point[j] = theta[j] + settings.sigma * eps[j];
    }
    double weight = objective(point) / settings.sigma;
    if (settings.antithetic) {
      for (std::size_t j = 0; j < d; ++j) {
        point[j] = theta[j] - settings.sigma * eps[j];
      }
      weight = 0.5 * (weight - objective(point) / settings.sigma);
    }
    for (std::size_t j = 0; j < d; ++j) {
      const double term = eps[j] * weight;
      sum[j] += term;
      sum_sq[j] += term * term;
    }
  }
  GradientEstimate out;
  out.estimator = EstimatorKind::kEvolutionStrategies;
  out.sample_size = draws;
  out.grad.resize(d);
  std::vector<double> var(d);
  const double count = static_cast<double>(draws);
  for (std::size_t j = 0; j < d; ++j) {
    out.grad[j] = sum[j] / count;
    const double sample_var =
        (sum_sq[j] - count * out.grad[j] * out.grad[j]) / (count - 1.0);
    var[j] = std::max(sample_var, 0.0) / count;
  }
  out.per_parameter_variance = std::move(var);
  return out;
}

GradientEstimate estimate_es(const PolicyNet& net, const BidderBatch& values,
                             const MechanismSpec& spec,
                             const EstimatorConfig& config,
                             std::uint64_t seed) {
  check_shape(values, spec);
  if (net.head() != OutputHead::kBid || net.items() != spec.items) {
    throw ConfigError("evolution strategies need a bid-head policy");
  }
  const BidderBatch base = bids_from_output(
      net.bids(values.as_matrix()), spec.items, values.batch(), spec.bidders);
  std::vector<ItemRanking> ranking(values.batch() * spec.items);
  for (std::size_t b = 0; b < values.batch(); ++b) {
    for (std::size_t k = 0; k < spec.items; ++k) {
      ranking[b * spec.items + k] = rank_item(base, b, k);
    }
  }
  PolicyNet perturbed = net;
  const Objective objective = [&](std::span<const double> params) {
    perturbed.set_parameters(params);
    const Eigen::MatrixXd own = perturbed.bids(values.as_matrix());
    return mean_deviation_utility(values, own, ranking, spec);
  };
  EsSettings settings{config.population_size,
                      effective_sigma(config.sigma, net.parameter_count()),
                      config.antithetic};
  GradientEstimate out = es_gradient(net.parameters(), objective, settings, seed);
  out.sample_size = values.batch() * config.population_size;
  return out;
}

GaussianScore gaussian_log_density_gradient(double mean, double sigma,
                                            double action) {
  const double z = (action - mean) / sigma;
  return {z / sigma, (z * z - 1.0) / sigma};
}

GradientEstimate estimate_reinforce(const PolicyNet& net,
                                    const BidderBatch& values,
                                    const MechanismSpec& spec,
                                    std::uint64_t seed) {
  check_shape(values, spec);
  if (net.head() != OutputHead::kGaussian || net.items() != spec.items) {
    throw ConfigError(
        "REINFORCE needs a gaussian-head policy with 2 * items outputs");
  }
  const Index m = static_cast<Index>(spec.items);
  Eigen::MatrixXd noise(m, static_cast<Index>(values.rows()));
  Rng rng = make_rng(seed, Stream::kActionNoise);
  std::normal_distribution<double> normal;
  for (Index c = 0; c < noise.cols(); ++c) {
    for (Index r = 0; r < m; ++r) noise(r, c) = normal(rng);
  }
  const std::size_t n = spec.bidders;
  return grouped_pathwise(
      net, values, EstimatorKind::kReinforce,
      [&](const BidderBatch& part, const ForwardCache& cache,
          std::size_t begin) {
        const Eigen::MatrixXd& out = cache.output();
        const Index cols = out.cols();
        const auto z = noise.middleCols(static_cast<Index>(begin * n), cols);
        const Eigen::MatrixXd mean = out.topRows(m);
        const Eigen::MatrixXd rho = out.bottomRows(m);
        const Eigen::MatrixXd sigma =
            rho.unaryExpr([](double x) { return softplus(x); });
        const Eigen::MatrixXd action = mean + sigma.cwiseProduct(z);

        BidderBatch actions(part.batch(), n, spec.items, BatchRole::kBids);
        actions.as_matrix() = action.cwiseMax(0.0);
        const Eigen::MatrixXd utility = utility_exact(part, actions, spec);

        const double scale = 1.0 / static_cast<double>(part.batch() * n);
        Eigen::MatrixXd upstream(out.rows(), cols);
        for (Index c = 0; c < cols; ++c) {
          const double u = utility(c / static_cast<Index>(n),
                                   c % static_cast<Index>(n)) *
                           scale;
          for (Index r = 0; r < m; ++r) {
            const GaussianScore score = gaussian_log_density_gradient(
                mean(r, c), sigma(r, c), action(r, c));
            const double dsigma_drho = 1.0 / (1.0 + std::exp(-rho(r, c)));
            upstream(r, c) = u * score.d_mean;
            upstream(m + r, c) = u * score.d_sigma * dsigma_drho;
          }
        }
        return upstream;
      });
}

GradientEstimate estimate(const PolicyNet& net, const BidderBatch& values,
                          const MechanismSpec& spec,
                          const EstimatorConfig& config, std::uint64_t seed) {
  config.validate();
  switch (config.kind) {
    case EstimatorKind::kSmoothMarket:
      return estimate_sm(net, values, spec, config.temperature);
    case EstimatorKind::kEvolutionStrategies:
      return estimate_es(net, values, spec, config, seed);
    case EstimatorKind::kReinforce:
      return estimate_reinforce(net, values, spec, seed);
  }
  throw ConfigError("unknown estimator");
}

double gradient_variance(
    const std::function<GradientEstimate(std::size_t repeat)>& draw,
    std::size_t repeats) {
  if (repeats < 2) throw ConfigError("gradient variance needs >= 2 repeats");
  std::vector<double> mean;
  std::vector<double> m2;
  for (std::size_t r = 0; r < repeats; ++r) {
    const GradientEstimate g = draw(r);
    if (r == 0) {
      mean.assign(g.grad.size(), 0.0);
      m2.assign(g.grad.size(), 0.0);
    } else if (g.grad.size() != mean.size()) {
      throw ConfigError("gradient estimates differ in length");
    }
    // Welford update.
    const double count = static_cast<double>(r + 1);
    for (std::size_t j = 0; j < mean.size(); ++j) {
      const double delta = g.grad[j] - mean[j];
      mean[j] += delta / count;
      m2[j] += delta * (g.grad[j] - mean[j]);
    }
  }
  if (mean.empty()) return 0.0;
  double total = 0.0;
  for (double v : m2) total += v / static_cast<double>(repeats - 1);
  return total / static_cast<double>(mean.size());
}

double gradient_variance(const PolicyNet& net, const MechanismSpec& spec,
                         const EstimatorConfig& config, std::size_t batch,
                         std::size_t repeats, std::uint64_t seed) {
  return gradient_variance(
      [&](std::size_t r) {
        Rng rng = make_rng(seed, Stream::kVariance, r);
        const BidderBatch values = sample_valuations(spec, batch, rng);
        return estimate(net, values, spec, config,
                        derive_seed(seed, Stream::kPerturbation, r));
      },
      repeats);
}

}  // namespace smoothmarket
