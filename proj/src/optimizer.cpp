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

#include "smoothmarket/optimizer.hpp"

#include <cmath>

#include "smoothmarket/errors.hpp"

namespace smoothmarket {

void AdamConfig::validate() const {
  if (!(step_size > 0.0)) throw ConfigError("step size must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("moment decays must lie in [0, 1)");
  }
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
}

AdamOptimizer::AdamOptimizer(std::size_t parameter_count, AdamConfig config)
    : config_(config),
      first_moment_(parameter_count, 0.0),
      second_moment_(parameter_count, 0.0) {
  config_.validate();
}

void AdamOptimizer::ascend(std::span<double> params,
                           std::span<const double> grad) {
  step(params, grad, 1.0);
}

void AdamOptimizer::descend(std::span<double> params,
                            std::span<const double> grad) {
  step(params, grad, -1.0);
}

void AdamOptimizer::step(std::span<double> params,
                         std::span<const double> grad, double sign) {
  if (params.size() != first_moment_.size() || grad.size() != params.size()) {
    throw ConfigError("optimizer state does not match parameter count");
  }
  ++steps_;
  const double t = static_cast<double>(steps_);
  const double correction1 = 1.0 - std::pow(config_.beta1, t);
  const double correction2 = 1.0 - std::pow(config_.beta2, t);
  for (std::size_t j = 0; j < params.size(); ++j) {
    first_moment_[j] =
        config_.beta1 * first_moment_[j] + (1.0 - config_.beta1) * grad[j];
    second_moment_[j] = config_.beta2 * second_moment_[j] +
                        (1.0 - config_.beta2) * grad[j] * grad[j];
    const double m_hat = first_moment_[j] / correction1;
    const double v_hat = second_moment_[j] / correction2;
    params[j] +=
        sign * config_.step_size * m_hat / (std::sqrt(v_hat) + config_.epsilon);
  }
}

void AdamOptimizer::set_step_size(double step_size) {
  if (!(step_size > 0.0) || !std::isfinite(step_size)) {
    throw ConfigError("step size must be positive and finite");
  }
  config_.step_size = step_size;
}

}  // namespace smoothmarket
