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
#include <vector>

namespace smoothmarket {

// Closed-form reference values for the two-bidder first-price auction with
// uniform [0, 1] valuations in which bidder 2 bids slope * v2. Used to check
// how far the smoothed game's utilities are from the exact game's.

struct LinearOpponent {
  double slope = 0.5;
  double intercept = 0.0;

  void validate() const;
};

// Spence's function Li2(x) = sum_k x^k / k^2 for x <= 1.
double dilog(double x);

// Expected utility of bidder 1 in the exact game: (v1 - b1) * b1 / s.
// Requires 0 <= b1 <= s.
double interim_utility_original(double v1, double b1,
                                const LinearOpponent& opponent);

// |interim utility in the exact game - interim utility in the smoothed game|
// in closed form. Requires 0 <= b1 <= s and temperature > 0.
double interim_error_exact(double v1, double b1, double slope,
                           double temperature);

// (ln 2 + 1) * temperature / slope.
double ex_ante_bound(double slope, double temperature);

// Interim utility of bidder 1 in the smoothed game by composite
// Gauss-Legendre quadrature over v2 in [0, 1], `nodes` points per panel and
// panels refined geometrically around the price kink v2 = b1 / s.
double interim_utility_smooth_quadrature(double v1, double b1, double slope,
                                         double temperature,
                                         std::size_t nodes = 16);

// Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendreRule gauss_legendre(std::size_t n);

// Integral of f over [a, b] with rule `rule`.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const GaussLegendreRule& rule);

// Integral over the union of panels between consecutive sorted breakpoints.
double integrate_panels(const std::function<double(double)>& f,
                        const std::vector<double>& breakpoints,
                        const GaussLegendreRule& rule);

// Monte Carlo estimate of |ex ante smoothed utility - ex ante exact utility|
// of bidder 1 when both bidders bid slope * v.
struct ExAnteErrorEstimate {
  double error = 0.0;
  double standard_error = 0.0;
};

ExAnteErrorEstimate ex_ante_error_monte_carlo(double slope, double temperature,
                                              std::size_t samples,
                                              std::uint64_t seed);

struct OracleRow {
  double v1 = 0.0;
  double b1 = 0.0;
  double temperature = 0.0;
  double exact_error = 0.0;
  double quadrature_error = 0.0;
  double bound = 0.0;
};

// One row per (v1, temperature) with b1 = bid_slope * v1 against an opponent
// bidding opponent_slope * v2.
std::vector<OracleRow> oracle_table(const std::vector<double>& values,
                                    const std::vector<double>& temperatures,
                                    double bid_slope, double opponent_slope,
                                    std::size_t nodes = 16);

}  // namespace smoothmarket
