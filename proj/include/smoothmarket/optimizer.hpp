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
#include <vector>

namespace smoothmarket {

// Bias-corrected adaptive moment estimation.
struct AdamConfig {
  double step_size = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const;
};

class AdamOptimizer {
 public:
  AdamOptimizer(std::size_t parameter_count, AdamConfig config);

  // params += step along grad (maximization).
  void ascend(std::span<double> params, std::span<const double> grad);
  // params -= step along grad (minimization).
  void descend(std::span<double> params, std::span<const double> grad);

  // Schedules rescale the step; the moment estimates are kept.
  void set_step_size(double step_size);

  std::size_t steps() const { return steps_; }
  const AdamConfig& config() const { return config_; }

 private:
  void step(std::span<double> params, std::span<const double> grad,
            double sign);

  AdamConfig config_;
  std::vector<double> first_moment_;
  std::vector<double> second_moment_;
  std::size_t steps_ = 0;
};

}  // namespace smoothmarket
