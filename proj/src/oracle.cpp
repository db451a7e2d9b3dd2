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

#include "smoothmarket/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "smoothmarket/errors.hpp"
#include "smoothmarket/random.hpp"

namespace smoothmarket {

namespace {

constexpr double kPi2Over6 = std::numbers::pi * std::numbers::pi / 6.0;

// B_{2k} / (2k + 1)!, k = 1..11.
constexpr std::array<double, 11> kBernoulliTerms = {
    2.77777777777777762e-02,  -2.77777777777777778e-04,
    4.72411186696900978e-06,  -9.18577307466196408e-08,
    1.89788699889710005e-09,  -4.06476164514422560e-11,
    8.92169102045645230e-13,  -1.99392958607210744e-14,
    4.51898002961991825e-16,  -1.03565176121812472e-17,
    2.39521862102618698e-19,
};

// Li2 for x in [-1, 0.5] via the Bernoulli series in u = -ln(1 - x), which
// converges like (u / 2 pi)^2k with |u| <= ln 2.
double dilog_core(double x) {
  const double u = -std::log1p(-x);
  const double u2 = u * u;
  double sum = 0.0;
  double power = u * u2;
  for (double c : kBernoulliTerms) {
    sum += c * power;
    power *= u2;
  }
  return u - 0.25 * u2 + sum;
}

double softplus_stable(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

// Softmax share of bidder 1 against a single opponent bid.
double pairwise_share(double own, double rival, double temperature) {
  const double t = (rival - own) / temperature;
  if (t > 0.0) {
    const double e = std::exp(-t);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(t));
}

void check_linear_domain(double b1, double slope) {
  if (!(slope > 0.0) || slope > 1.0) {
    throw DomainError("opponent slope must lie in (0, 1]");
  }
  if (b1 < 0.0 || b1 > slope) {
    throw DomainError("bid must lie in [0, s], got " + std::to_string(b1));
  }
}

}  // namespace

void LinearOpponent::validate() const {
  if (!(slope > 0.0)) throw ConfigError("opponent slope must be positive");
}

double dilog(double x) {
  if (std::isnan(x) || x > 1.0) {
    throw DomainError("dilog is only defined here for x <= 1");
  }
  if (x == 1.0) return kPi2Over6;
  if (x > 0.5) {
    // Reflection.
    return kPi2Over6 - std::log(x) * std::log1p(-x) - dilog_core(1.0 - x);
  }
  if (x >= -1.0) return dilog_core(x);
  // Inversion.
  const double l = std::log(-x);
  return -kPi2Over6 - 0.5 * l * l - dilog_core(1.0 / x);
}

double interim_utility_original(double v1, double b1,
                                const LinearOpponent& opponent) {
  opponent.validate();
  if (opponent.intercept != 0.0) {
    throw DomainError("closed form assumes a zero intercept");
  }
  if (b1 < 0.0 || b1 > opponent.slope) {
    throw DomainError("bid must lie in [0, s]");
  }
  return (v1 - b1) * b1 / opponent.slope;
}

double interim_error_exact(double v1, double b1, double slope,
                           double temperature) {
  check_linear_domain(b1, slope);
  if (!(temperature > 0.0)) throw DomainError("temperature must be positive");
  const double lambda = temperature;
  const double a = (slope - b1) / lambda;
  const double c = b1 / lambda;
  // The closed form contains -s ln(e^a + 1), -lambda Li2(-e^a),
  // v1 ln(e^{s/lambda} + e^{b1/lambda}) and a 1/lambda polynomial. Splitting
  // ln(e^a + 1) = a + ln(1 + e^-a) and inverting Li2(-e^a) makes every
  // O(1/lambda) part cancel exactly; what remains has no overflow.
  const double tail = softplus_stable(-a);
  const double bracket =
      (v1 - slope) * tail +
      lambda * (std::numbers::pi * std::numbers::pi / 12.0 +
                dilog(-std::exp(-a))) +
      (b1 - v1) * softplus_stable(-c);
  return lambda / slope * bracket;
}

double ex_ante_bound(double slope, double temperature) {
  if (!(slope > 0.0)) throw DomainError("slope must be positive");
  if (temperature < 0.0) throw DomainError("temperature must be >= 0");
  return (std::numbers::ln2 + 1.0) * temperature / slope;
}

GaussLegendreRule gauss_legendre(std::size_t n) {
  if (n == 0) throw ConfigError("quadrature needs at least one node");
  if (n == 1) return {{0.0}, {2.0}};
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double dn = static_cast<double>(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (dn + 0.5));
    double derivative = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double dk = static_cast<double>(k);
        const double p2 = ((2.0 * dk - 1.0) * x * p1 - (dk - 1.0) * p0) / dk;
        p0 = p1;
        p1 = p2;
      }
      derivative = dn * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / derivative;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * derivative * derivative);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 const GaussLegendreRule& rule) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return half * sum;
}

double integrate_panels(const std::function<double(double)>& f,
                        const std::vector<double>& breakpoints,
                        const GaussLegendreRule& rule) {
  double total = 0.0;
  for (std::size_t j = 0; j + 1 < breakpoints.size(); ++j) {
    if (breakpoints[j + 1] > breakpoints[j]) {
      total += integrate(f, breakpoints[j], breakpoints[j + 1], rule);
    }
  }
  return total;
}

double interim_utility_smooth_quadrature(double v1, double b1, double slope,
                                         double temperature,
                                         std::size_t nodes) {
  if (nodes < 16) throw ConfigError("quadrature needs at least 16 nodes");
  if (!(slope > 0.0)) throw DomainError("slope must be positive");
  if (!(temperature > 0.0)) throw DomainError("temperature must be positive");
  const auto integrand = [&](double v2) {
    const double rival = slope * v2;
    return (v1 - std::max(b1, rival)) *
           pairwise_share(b1, rival, temperature);
  };
  // Panels double in width away from the kink, starting at a fraction of the
  // softmax transition width.
  const double kink = b1 / slope;
  const double width = temperature / slope;
  std::vector<double> breakpoints{0.0, 1.0};
  if (kink > 0.0 && kink < 1.0) breakpoints.push_back(kink);
  for (double delta = width / 8.0; delta < 1.0; delta *= 2.0) {
    for (double p : {kink - delta, kink + delta}) {
      if (p > 0.0 && p < 1.0) breakpoints.push_back(p);
    }
  }
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()),
                    breakpoints.end());
  return integrate_panels(integrand, breakpoints, gauss_legendre(nodes));
}

ExAnteErrorEstimate ex_ante_error_monte_carlo(double slope, double temperature,
                                              std::size_t samples,
                                              std::uint64_t seed) {
  if (samples < 2) throw ConfigError("need at least two samples");
  if (!(temperature > 0.0)) throw DomainError("temperature must be positive");
  Rng rng(seed);
  std::uniform_real_distribution<double> prior(0.0, 1.0);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const double v1 = prior(rng);
    const double v2 = prior(rng);
    const double b1 = slope * v1;
    const double b2 = slope * v2;
    const double exact = b1 >= b2 ? v1 - b1 : 0.0;
    const double smooth =
        (v1 - std::max(b1, b2)) * pairwise_share(b1, b2, temperature);
    const double d = smooth - exact;
    sum += d;
    sum_sq += d * d;
  }
  const double n = static_cast<double>(samples);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
  return {std::abs(mean), std::sqrt(var / n)};
}

std::vector<OracleRow> oracle_table(const std::vector<double>& values,
                                    const std::vector<double>& temperatures,
                                    double bid_slope, double opponent_slope,
                                    std::size_t nodes) {
  const LinearOpponent opponent{opponent_slope, 0.0};
  std::vector<OracleRow> rows;
  for (double v1 : values) {
    for (double lambda : temperatures) {
      OracleRow row;
      row.v1 = v1;
      row.b1 = bid_slope * v1;
      row.temperature = lambda;
      row.exact_error = interim_error_exact(v1, row.b1, opponent_slope, lambda);
      row.quadrature_error =
          std::abs(interim_utility_original(v1, row.b1, opponent) -
                   interim_utility_smooth_quadrature(v1, row.b1,
                                                     opponent_slope, lambda,
                                                     nodes));
      row.bound = ex_ante_bound(opponent_slope, lambda);
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace smoothmarket
