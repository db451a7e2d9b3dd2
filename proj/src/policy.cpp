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

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "smoothmarket/errors.hpp"

namespace smoothmarket {

namespace {

constexpr std::string_view kFormatTag = "smoothmarket-policy";
constexpr int kFormatVersion = 1;

using Eigen::Index;

}  // namespace

std::string_view to_string(OutputHead head) {
  return head == OutputHead::kBid ? "bid" : "gaussian";
}

double selu(double x) {
  return x > 0.0 ? kSeluScale * x : kSeluScale * kSeluAlpha * std::expm1(x);
}

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double inverse_softplus(double y) {
  if (!(y > 0.0)) throw DomainError("inverse_softplus needs y > 0");
  return y > 30.0 ? y + std::log1p(-std::exp(-y)) : std::log(std::expm1(y));
}

PolicyNet::PolicyNet(std::vector<std::size_t> layer_sizes, OutputHead head)
    : layer_sizes_(std::move(layer_sizes)), head_(head) {
  if (layer_sizes_.size() < 2) {
    throw ConfigError("a policy needs at least an input and an output layer");
  }
  for (std::size_t width : layer_sizes_) {
    if (width == 0) throw ConfigError("layer widths must be positive");
  }
  const std::size_t expected_out =
      head_ == OutputHead::kBid ? input_dim() : 2 * input_dim();
  if (output_dim() != expected_out) {
    throw ConfigError(head_ == OutputHead::kBid
                          ? "bid head needs as many outputs as inputs"
                          : "gaussian head needs twice as many outputs as "
                            "inputs");
  }
  std::size_t total = 0;
  for (std::size_t l = 0; l < layer_count(); ++l) {
    offsets_.push_back(total);
    total += (layer_sizes_[l] + 1) * layer_sizes_[l + 1];
  }
  params_.assign(total, 0.0);
}

PolicyNet PolicyNet::initialized(std::vector<std::size_t> layer_sizes,
                                 OutputHead head, std::uint64_t seed) {
  PolicyNet net(std::move(layer_sizes), head);
  Rng rng(seed);
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    const double bound =
        1.0 / std::sqrt(static_cast<double>(net.layer_sizes_[l]));
    std::uniform_real_distribution<double> dist(-bound, bound);
    const std::size_t end = l + 1 < net.layer_count() ? net.offsets_[l + 1]
                                                      : net.params_.size();
    for (std::size_t j = net.offsets_[l]; j < end; ++j) net.params_[j] = dist(rng);
  }
  return net;
}

std::vector<std::size_t> PolicyNet::default_layers(
    std::size_t items, OutputHead head,
    const std::vector<std::size_t>& hidden) {
  std::vector<std::size_t> sizes{items};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(head == OutputHead::kBid ? items : 2 * items);
  return sizes;
}

void PolicyNet::set_parameters(std::span<const double> params) {
  if (params.size() != params_.size()) {
    throw ConfigError("parameter vector has the wrong length");
  }
  std::copy(params.begin(), params.end(), params_.begin());
}

Eigen::Map<const Eigen::MatrixXd> PolicyNet::weights(std::size_t layer) const {
  return {params_.data() + weight_offset(layer),
          static_cast<Index>(layer_sizes_[layer + 1]),
          static_cast<Index>(layer_sizes_[layer])};
}

Eigen::Map<const Eigen::VectorXd> PolicyNet::bias(std::size_t layer) const {
  return {params_.data() + bias_offset(layer),
          static_cast<Index>(layer_sizes_[layer + 1])};
}

std::size_t PolicyNet::relu_outputs() const { return input_dim(); }

ForwardCache PolicyNet::forward(
    const Eigen::Ref<const Eigen::MatrixXd>& inputs) const {
  if (static_cast<std::size_t>(inputs.rows()) != input_dim()) {
    throw ConfigError("policy input has " + std::to_string(inputs.rows()) +
                      " features, expected " + std::to_string(input_dim()));
  }
  ForwardCache cache;
  cache.input = inputs;
  const Eigen::MatrixXd* previous = &cache.input;
  for (std::size_t l = 0; l < layer_count(); ++l) {
    Eigen::MatrixXd z = weights(l) * *previous;
    z.colwise() += bias(l);
    Eigen::MatrixXd a;
    if (l + 1 < layer_count()) {
      a = z.unaryExpr([](double x) { return selu(x); });
    } else {
      a = z;
      const Index relu_rows = static_cast<Index>(relu_outputs());
      a.topRows(relu_rows) = a.topRows(relu_rows).cwiseMax(0.0);
    }
    cache.pre_activations.push_back(std::move(z));
    cache.activations.push_back(std::move(a));
    previous = &cache.activations.back();
  }
  return cache;
}

Eigen::MatrixXd PolicyNet::bids(
    const Eigen::Ref<const Eigen::MatrixXd>& inputs) const {
  ForwardCache cache = forward(inputs);
  if (head_ == OutputHead::kBid) return std::move(cache.activations.back());
  return cache.output().topRows(static_cast<Index>(items()));
}

std::vector<double> PolicyNet::backward(
    const ForwardCache& cache,
    const Eigen::Ref<const Eigen::MatrixXd>& upstream,
    BackwardFrom from) const {
  if (cache.activations.size() != layer_count() ||
      cache.pre_activations.size() != layer_count()) {
    throw ConfigError("forward cache does not belong to this network");
  }
  const Eigen::MatrixXd& out = cache.output();
  if (upstream.rows() != out.rows() || upstream.cols() != out.cols() ||
      static_cast<std::size_t>(out.rows()) != output_dim()) {
    throw ConfigError("upstream gradient does not match the forward output");
  }
  std::vector<double> grad(params_.size(), 0.0);

  const std::size_t last = layer_count() - 1;
  const Index relu_rows = static_cast<Index>(relu_outputs());
  Eigen::MatrixXd delta = upstream;
  if (from == BackwardFrom::kOutput) {
    delta.topRows(relu_rows) =
        (cache.pre_activations[last].topRows(relu_rows).array() > 0.0)
            .select(delta.topRows(relu_rows), 0.0);
  }

  for (std::size_t l = last + 1; l-- > 0;) {
    const Eigen::MatrixXd& input =
        l == 0 ? cache.input : cache.activations[l - 1];
    Eigen::Map<Eigen::MatrixXd> grad_w(
        grad.data() + weight_offset(l), static_cast<Index>(layer_sizes_[l + 1]),
        static_cast<Index>(layer_sizes_[l]));
    Eigen::Map<Eigen::VectorXd> grad_b(grad.data() + bias_offset(l),
                                       static_cast<Index>(layer_sizes_[l + 1]));
    grad_w.noalias() = delta * input.transpose();
    grad_b = delta.rowwise().sum();
    if (l == 0) break;
    // selu'(z) = scale for z > 0, else selu(z) + scale * alpha.
    const Eigen::MatrixXd& z = cache.pre_activations[l - 1];
    const Eigen::MatrixXd& a = cache.activations[l - 1];
    Eigen::MatrixXd back = weights(l).transpose() * delta;
    delta = (z.array() > 0.0)
                .select(kSeluScale * back.array(),
                        back.array() * (a.array() + kSeluScale * kSeluAlpha));
  }
  return grad;
}

void PolicyNet::save(std::ostream& out) const {
  std::ostringstream body;
  body.precision(17);
  body << kFormatTag << ' ' << kFormatVersion << '\n';
  body << "head " << to_string(head_) << '\n';
  body << "activations selu relu\n";
  body << "layers " << layer_sizes_.size();
  for (std::size_t width : layer_sizes_) body << ' ' << width;
  body << "\nparams " << params_.size() << '\n';
  for (double p : params_) body << p << '\n';
  out << body.str();
}

PolicyNet PolicyNet::load(std::istream& in) {
  auto expect = [&](std::string_view word) {
    std::string token;
    if (!(in >> token) || token != word) {
      throw ConfigError("malformed policy file: expected '" +
                        std::string(word) + "'");
    }
  };
  expect(kFormatTag);
  int version = 0;
  in >> version;
  if (version != kFormatVersion) {
    throw ConfigError("unsupported policy file version " +
                      std::to_string(version));
  }
  expect("head");
  std::string head_name;
  in >> head_name;
  OutputHead head;
  if (head_name == "bid") {
    head = OutputHead::kBid;
  } else if (head_name == "gaussian") {
    head = OutputHead::kGaussian;
  } else {
    throw ConfigError("unknown policy head '" + head_name + "'");
  }
  expect("activations");
  expect("selu");
  expect("relu");
  expect("layers");
  std::size_t count = 0;
  in >> count;
  std::vector<std::size_t> sizes(count);
  for (auto& width : sizes) in >> width;
  expect("params");
  std::size_t n_params = 0;
  in >> n_params;
  if (!in) throw ConfigError("malformed policy file header");
  PolicyNet net(std::move(sizes), head);
  if (n_params != net.parameter_count()) {
    throw ConfigError("policy file parameter count does not match layers");
  }
  for (double& p : net.params_) {
    if (!(in >> p)) throw ConfigError("policy file truncated");
  }
  return net;
}

void pretrain(PolicyNet& net, double max_value, const PretrainConfig& config,
              std::uint64_t seed) {
  if (config.iterations == 0) return;
  if (config.batch_size == 0) throw ConfigError("pretrain batch must be >= 1");
  const Index items = static_cast<Index>(net.items());
  const Index batch = static_cast<Index>(config.batch_size);
  const double sigma_target =
      net.head() == OutputHead::kGaussian
          ? inverse_softplus(config.initial_action_sigma)
          : 0.0;
  AdamOptimizer optimizer(net.parameter_count(), config.optimizer);
  Rng rng(seed);
  std::uniform_real_distribution<double> prior(0.0, max_value);
  Eigen::MatrixXd values(items, batch);
  const double scale = 2.0 / static_cast<double>(items * batch);
  for (std::size_t it = 0; it < config.iterations; ++it) {
    for (Index c = 0; c < batch; ++c) {
      for (Index r = 0; r < items; ++r) values(r, c) = prior(rng);
    }
    const ForwardCache cache = net.forward(values);
    const Eigen::MatrixXd& z = cache.pre_activations.back();
    Eigen::MatrixXd upstream(z.rows(), batch);
    upstream.topRows(items) = scale * (z.topRows(items) - values);
    if (net.head() == OutputHead::kGaussian) {
      upstream.bottomRows(items) =
          scale * (cache.output().bottomRows(items).array() - sigma_target)
                      .matrix();
    }
    optimizer.descend(net.parameters(),
                      net.backward(cache, upstream, BackwardFrom::kPreActivation));
  }
}

double truthful_mse(const PolicyNet& net,
                    const Eigen::Ref<const Eigen::MatrixXd>& values) {
  const Eigen::MatrixXd b = net.bids(values);
  return (b - values).squaredNorm() / static_cast<double>(values.size());
}

}  // namespace smoothmarket
