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

#include "smoothmarket/io.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace smoothmarket {

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.10g", x);
  return buffer;
}

namespace {

std::string optional_real(const std::optional<double>& x) {
  return x ? format_real(*x) : std::string();
}

}  // namespace

void write_metrics_csv(std::ostream& out,
                       const std::vector<MetricRecord>& records) {
  out << "iteration,l2,utility_loss,grad_variance,seconds_per_iter\n";
  for (const MetricRecord& r : records) {
    out << r.iteration << ',' << format_real(r.l2) << ','
        << optional_real(r.utility_loss) << ','
        << optional_real(r.grad_variance) << ','
        << optional_real(r.seconds_per_iter) << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& rows) {
  out << "lambda,seed,final_l2\n";
  for (const SweepPoint& r : rows) {
    out << format_real(r.temperature) << ',' << r.seed << ','
        << format_real(r.final_l2) << '\n';
  }
}

void write_oracle_csv(std::ostream& out, const std::vector<OracleRow>& rows) {
  out << "v1,b1,lambda,exact_error,quadrature_error,bound\n";
  for (const OracleRow& r : rows) {
    out << format_real(r.v1) << ',' << format_real(r.b1) << ','
        << format_real(r.temperature) << ',' << format_real(r.exact_error)
        << ',' << format_real(r.quadrature_error) << ','
        << format_real(r.bound) << '\n';
  }
}

void write_variance_csv(std::ostream& out,
                        const std::vector<VarianceRow>& rows) {
  out << "estimator,lambda,population,batch,repeats,variance\n";
  for (const VarianceRow& r : rows) {
    out << r.estimator << ',' << format_real(r.temperature) << ','
        << r.population << ',' << r.batch << ',' << r.repeats << ','
        << format_real(r.variance) << '\n';
  }
}

}  // namespace smoothmarket
