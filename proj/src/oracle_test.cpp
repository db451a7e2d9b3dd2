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

#include <gsl/gsl_sf_dilog.h>
#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "smoothmarket/errors.hpp"

namespace smoothmarket {
namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

double SeriesDilog(double x) {
  double sum = 0.0;
  double power = x;
  for (int k = 1; k < 400; ++k) {
    sum += power / (static_cast<double>(k) * k);
    power *= x;
  }
  return sum;
}

// Smoothed interim utility by adaptive Gauss-Kronrod, split at the kink.
double SmoothUtilityReference(double v1, double b1, double s, double lambda) {
  const auto f = [&](double v2) {
    const double rival = s * v2;
    const double share = 1.0 / (1.0 + std::exp((rival - b1) / lambda));
    return (v1 - std::max(b1, rival)) * share;
  };
  using Rule = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double kink = std::clamp(b1 / s, 0.0, 1.0);
  double total = 0.0;
  if (kink > 0.0) total += Rule::integrate(f, 0.0, kink, 15, 1e-12);
  if (kink < 1.0) total += Rule::integrate(f, kink, 1.0, 15, 1e-12);
  return total;
}

TEST(DilogTest, SpecialValues) {
  EXPECT_EQ(dilog(0.0), 0.0);
  EXPECT_NEAR(dilog(1.0), kPi2 / 6.0, 1e-15);
  EXPECT_NEAR(dilog(-1.0), -kPi2 / 12.0, 1e-15);
  EXPECT_NEAR(dilog(0.5), kPi2 / 12.0 - 0.5 * std::log(2.0) * std::log(2.0),
              1e-15);
  EXPECT_THROW(dilog(1.5), DomainError);
  EXPECT_THROW(dilog(std::nan("")), DomainError);
}

TEST(DilogTest, MatchesSeries) {
  EXPECT_NEAR(dilog(-0.5), SeriesDilog(-0.5), 1e-14);
  for (double x = -0.9; x <= 0.9; x += 0.05) {
    EXPECT_NEAR(dilog(x), SeriesDilog(x), 1e-13) << x;
  }
}

TEST(DilogTest, MatchesGsl) {
  double worst = 0.0;
  for (double x = -200.0; x <= 1.0; x += 0.0137) {
    worst = std::max(worst, std::abs(dilog(x) - gsl_sf_dilog(x)));
  }
  for (double t = -30.0; t <= 30.0; t += 0.25) {
    const double x = -std::exp(t);
    worst = std::max(worst, std::abs(dilog(x) - gsl_sf_dilog(x)) /
                                std::max(1.0, std::abs(gsl_sf_dilog(x))));
  }
  EXPECT_LE(worst, 1e-12);
}

TEST(DilogTest, Identities) {
  for (double x = 0.01; x < 1.0; x += 0.01) {
    // Reflection.
    EXPECT_NEAR(dilog(x) + dilog(1.0 - x),
                kPi2 / 6.0 - std::log(x) * std::log(1.0 - x), 1e-10);
    // Duplication: Li2(x) + Li2(-x) = Li2(x^2) / 2.
    EXPECT_NEAR(dilog(x) + dilog(-x), 0.5 * dilog(x * x), 1e-10);
  }
  for (double y = 1.1; y < 50.0; y *= 1.3) {
    // Inversion.
    const double l = std::log(y);
    EXPECT_NEAR(dilog(-y) + dilog(-1.0 / y), -kPi2 / 6.0 - 0.5 * l * l, 1e-10);
  }
}

TEST(InterimUtilityTest, Examples) {
  const LinearOpponent half{0.5, 0.0};
  EXPECT_DOUBLE_EQ(interim_utility_original(1.0, 0.5, half), 0.5);
  EXPECT_EQ(interim_utility_original(0.7, 0.0, half), 0.0);
  EXPECT_DOUBLE_EQ(interim_utility_original(0.5, 0.25, half), 0.125);
  EXPECT_THROW(interim_utility_original(1.0, 0.6, half), DomainError);
  EXPECT_THROW(interim_utility_original(1.0, 0.2, LinearOpponent{0.5, 0.1}),
               DomainError);
}

// Values computed with mpmath at 50 digits from the closed form written out
// term by term, and confirmed by mpmath.quad of the integrand.
TEST(InterimErrorTest, FrozenReferenceValues) {
  struct Case {
    double v1;
    double lambda;
    double expected;
  };
  const Case cases[] = {
      {0.5, 0.1, 0.010895668568885488},
      {0.5, 0.01, 1.6449340661260533e-4},
      {0.5, 0.001, 1.6449340668482264e-6},
      {0.75, 0.1, 0.021937584546535473},
      {0.75, 0.01, 1.6451129458602286e-4},
      {0.75, 0.001, 1.6449340668482264e-6},
      {1.0, 0.1, 0.06864318320708272},
      {1.0, 0.01, 0.006931471805599453},
      {1.0, 0.001, 6.931471805599453e-4},
  };
  for (const Case& c : cases) {
    EXPECT_NEAR(interim_error_exact(c.v1, c.v1 / 2.0, 0.5, c.lambda),
                c.expected, 1e-13 * std::max(1.0, c.expected / 1e-4))
        << c.v1 << " " << c.lambda;
  }
}

TEST(InterimErrorTest, MatchesAdaptiveQuadrature) {
  const LinearOpponent half{0.5, 0.0};
  double worst = 0.0;
  for (double v1 : {0.5, 0.75, 1.0}) {
    for (double lambda : {0.1, 0.01, 0.001}) {
      const double b1 = v1 / 2.0;
      const double reference =
          interim_utility_original(v1, b1, half) -
          SmoothUtilityReference(v1, b1, 0.5, lambda);
      worst = std::max(
          worst, std::abs(interim_error_exact(v1, b1, 0.5, lambda) - reference));
    }
  }
  EXPECT_LE(worst, 1e-6);
}

TEST(InterimErrorTest, OffGridBidsAndSlopes) {
  for (double s : {0.3, 0.5, 1.0}) {
    for (double frac : {0.0, 0.2, 0.9, 1.0}) {
      for (double v1 : {0.1, 0.6, 1.0}) {
        const double b1 = frac * s;
        const double reference =
            (v1 - b1) * b1 / s - SmoothUtilityReference(v1, b1, s, 0.02);
        EXPECT_NEAR(interim_error_exact(v1, b1, s, 0.02), reference, 1e-9)
            << s << " " << b1 << " " << v1;
      }
    }
  }
  EXPECT_THROW(interim_error_exact(1.0, 0.6, 0.5, 0.01), DomainError);
  EXPECT_THROW(interim_error_exact(1.0, 0.2, 0.5, 0.0), DomainError);
}

TEST(InterimErrorTest, LimitBehaviour) {
  // Vanishes at v1 = 0.5 and is linear in lambda at v1 = 1.
  EXPECT_LT(interim_error_exact(0.5, 0.25, 0.5, 1e-4), 1e-7);
  const double r1 = interim_error_exact(1.0, 0.5, 0.5, 1e-3) / 1e-3;
  const double r2 = interim_error_exact(1.0, 0.5, 0.5, 1e-5) / 1e-5;
  EXPECT_GT(r1, 0.0);
  EXPECT_NEAR(r1, r2, 1e-6);
  for (double lambda : {0.5, 0.1, 0.01, 0.001, 1e-6}) {
    for (double v1 : {0.0, 0.3, 0.5, 0.8, 1.0}) {
      EXPECT_GE(interim_error_exact(v1, v1 / 2.0, 0.5, lambda), -1e-9);
    }
  }
}

TEST(QuadratureTest, GaussLegendreRule) {
  const GaussLegendreRule rule = gauss_legendre(16);
  double weight_sum = 0.0;
  for (double w : rule.weights) weight_sum += w;
  EXPECT_NEAR(weight_sum, 2.0, 1e-14);
  // Exact for polynomials up to degree 31.
  EXPECT_NEAR(integrate([](double x) { return std::pow(x, 30); }, -1.0, 1.0,
                        rule),
              2.0 / 31.0, 1e-14);
  EXPECT_NEAR(integrate([](double x) { return std::exp(x); }, 0.0, 2.0, rule),
              std::exp(2.0) - 1.0, 1e-13);
  EXPECT_THROW(gauss_legendre(0), ConfigError);
}

TEST(QuadratureTest, SmoothUtilityMatchesReference) {
  for (double lambda : {0.1, 0.01, 0.001}) {
    for (double v1 : {0.2, 0.5, 1.0}) {
      EXPECT_NEAR(interim_utility_smooth_quadrature(v1, v1 / 2.0, 0.5, lambda),
                  SmoothUtilityReference(v1, v1 / 2.0, 0.5, lambda), 1e-10);
    }
  }
  EXPECT_THROW(interim_utility_smooth_quadrature(1.0, 0.5, 0.5, 0.01, 8),
               ConfigError);
}

TEST(ExAnteBoundTest, Values) {
  EXPECT_NEAR(ex_ante_bound(0.5, 0.01), 0.033863, 5e-7);
  EXPECT_EQ(ex_ante_bound(0.5, 0.0), 0.0);
  EXPECT_THROW(ex_ante_bound(0.0, 0.01), DomainError);
}

// Ex ante error at the equilibrium: Monte Carlo against the integral of the
// closed-form interim error, and both below the bound.
TEST(ExAnteErrorTest, MonteCarloAgreesWithIntegralAndBound) {
  const GaussLegendreRule rule = gauss_legendre(64);
  for (double lambda : {0.1, 0.01, 0.001}) {
    std::vector<double> breaks{0.0, 1.0};
    for (double w = lambda; w < 1.0; w *= 2.0) breaks.push_back(1.0 - w);
    std::sort(breaks.begin(), breaks.end());
    const double integral = integrate_panels(
        [&](double v1) { return interim_error_exact(v1, v1 / 2.0, 0.5, lambda); },
        breaks, rule);
    const ExAnteErrorEstimate mc =
        ex_ante_error_monte_carlo(0.5, lambda, 1 << 18, 17);
    EXPECT_NEAR(mc.error, integral, 3.0 * mc.standard_error) << lambda;
    EXPECT_LT(mc.error, ex_ante_bound(0.5, lambda));
    EXPECT_LT(integral, ex_ante_bound(0.5, lambda));
  }
}

TEST(OracleTableTest, RowsAndEmptyGrid) {
  const auto rows = oracle_table({0.5, 1.0}, {0.1, 0.01}, 0.5, 0.5);
  ASSERT_EQ(rows.size(), 4u);
  for (const OracleRow& r : rows) {
    EXPECT_NEAR(r.exact_error, r.quadrature_error, 1e-6);
    EXPECT_DOUBLE_EQ(r.b1, r.v1 / 2.0);
    EXPECT_LE(r.exact_error, r.bound);
  }
  EXPECT_TRUE(oracle_table({}, {0.1}, 0.5, 0.5).empty());
}

}  // namespace
}  // namespace smoothmarket
