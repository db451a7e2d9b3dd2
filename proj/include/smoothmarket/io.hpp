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

#include <iosfwd>
#include <string>
#include <vector>

#include "smoothmarket/learner.hpp"
#include "smoothmarket/oracle.hpp"

namespace smoothmarket {

// Bumped whenever a CSV column is added, removed or reordered.
inline constexpr int kCsvSchemaVersion = 1;

// Fixed 10 significant digits, '.' decimal separator, "nan" for NaN.
std::string format_real(double x);

// iteration,l2,utility_loss,grad_variance,seconds_per_iter
// Missing optional metrics are left empty.
void write_metrics_csv(std::ostream& out,
                       const std::vector<MetricRecord>& records);

// lambda,seed,final_l2
void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& rows);

// v1,b1,lambda,exact_error,quadrature_error,bound
void write_oracle_csv(std::ostream& out, const std::vector<OracleRow>& rows);

struct VarianceRow {
  std::string estimator;
  double temperature = 0.0;  // NaN for estimators without a temperature
  std::size_t population = 0;
  std::size_t batch = 0;
  std::size_t repeats = 0;
  double variance = 0.0;
};

// estimator,lambda,population,batch,repeats,variance
void write_variance_csv(std::ostream& out, const std::vector<VarianceRow>& rows);

}  // namespace smoothmarket
