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
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "smoothmarket/optimizer.hpp"
#include "smoothmarket/random.hpp"

namespace smoothmarket {

inline constexpr double kSeluAlpha = 1.6732632423543772;
inline constexpr double kSeluScale = 1.0507009873554805;

// kBid: one nonnegative bid per item (ReLU output).
// kGaussian: 2 * items outputs, the first half is the ReLU mean bid and the
// second half an unconstrained pre-softplus scale of a Gaussian mixed
// strategy.
enum class OutputHead { kBid, kGaussian };

std::string_view to_string(OutputHead head);

// kPreActivation treats the ReLU output units as identities, which lets a
// regression reach units that are inactive on every input.
enum class BackwardFrom { kOutput, kPreActivation };

// Activations saved by forward() for the reverse pass. All matrices are
// features x samples.
struct ForwardCache {
  Eigen::MatrixXd input;
  std::vector<Eigen::MatrixXd> pre_activations;
  std::vector<Eigen::MatrixXd> activations;

  const Eigen::MatrixXd& output() const { return activations.back(); }
};

// Fully connected bid network: SeLU hidden layers, ReLU bid outputs.
// Parameters live in one flat vector, layer by layer, each layer storing its
// weight matrix (out x in, column-major) followed by its bias.
class PolicyNet {
 public:
  PolicyNet(std::vector<std::size_t> layer_sizes,
            OutputHead head = OutputHead::kBid);

  // Fan-in scaled uniform initialization, U(-1/sqrt(in), 1/sqrt(in)).
  static PolicyNet initialized(std::vector<std::size_t> layer_sizes,
                               OutputHead head, std::uint64_t seed);

  // (items, hidden..., items) or (items, hidden..., 2 * items).
  static std::vector<std::size_t> default_layers(
      std::size_t items, OutputHead head,
      const std::vector<std::size_t>& hidden = {10, 10});

  const std::vector<std::size_t>& layer_sizes() const { return layer_sizes_; }
  OutputHead head() const { return head_; }
  std::size_t input_dim() const { return layer_sizes_.front(); }
  std::size_t output_dim() const { return layer_sizes_.back(); }
  std::size_t items() const { return input_dim(); }
  std::size_t layer_count() const { return layer_sizes_.size() - 1; }
  std::size_t parameter_count() const { return params_.size(); }

  std::span<const double> parameters() const { return params_; }
  std::span<double> parameters() { return params_; }
  void set_parameters(std::span<const double> params);

  ForwardCache forward(const Eigen::Ref<const Eigen::MatrixXd>& inputs) const;

  // Bid head only: items x samples.
  Eigen::MatrixXd bids(const Eigen::Ref<const Eigen::MatrixXd>& inputs) const;

  // Gradient of sum(upstream .* output) with respect to the parameters.
  std::vector<double> backward(
      const ForwardCache& cache,
      const Eigen::Ref<const Eigen::MatrixXd>& upstream,
      BackwardFrom from = BackwardFrom::kOutput) const;

  // Versioned text format.
  void save(std::ostream& out) const;
  static PolicyNet load(std::istream& in);

  bool operator==(const PolicyNet& other) const = default;

 private:
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const {
    return offsets_[layer] + layer_sizes_[layer] * layer_sizes_[layer + 1];
  }
  Eigen::Map<const Eigen::MatrixXd> weights(std::size_t layer) const;
  Eigen::Map<const Eigen::VectorXd> bias(std::size_t layer) const;
  std::size_t relu_outputs() const;

  std::vector<std::size_t> layer_sizes_;
  OutputHead head_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

double selu(double x);

struct PretrainConfig {
  std::size_t iterations = 50;
  std::size_t batch_size = 4096;
  AdamConfig optimizer{.step_size = 0.05};
  // Target standard deviation of the Gaussian head after pretraining.
  double initial_action_sigma = 0.1;
};

// Supervised regression of the bid head toward truthful bidding on uniform
// [0, max_value] samples. The squared error is taken before the output ReLU
// so that inactive output units still learn. A Gaussian head's scale output
// is pulled toward initial_action_sigma at the same time.
void pretrain(PolicyNet& net, double max_value, const PretrainConfig& config,
              std::uint64_t seed);

// Mean squared error between the bid head and the identity on `values`.
double truthful_mse(const PolicyNet& net,
                    const Eigen::Ref<const Eigen::MatrixXd>& values);

double softplus(double x);
double inverse_softplus(double y);

}  // namespace smoothmarket
