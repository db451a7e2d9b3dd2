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

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "smoothmarket/errors.hpp"
#include "smoothmarket/estimators.hpp"
#include "smoothmarket/evaluation.hpp"
#include "smoothmarket/io.hpp"
#include "smoothmarket/learner.hpp"
#include "smoothmarket/mechanism.hpp"
#include "smoothmarket/oracle.hpp"
#include "smoothmarket/policy.hpp"
#include "smoothmarket/smoothing.hpp"

namespace py = pybind11;
using namespace smoothmarket;

namespace {

using Tensor = py::array_t<double, py::array::c_style | py::array::forcecast>;

// (batch, bidders, items) arrays share the BidderBatch layout.
BidderBatch ToBatch(const Tensor& a, BatchRole role) {
  if (a.ndim() != 3) {
    throw ConfigError("expected an array of shape (batch, bidders, items)");
  }
  std::vector<double> data(a.data(), a.data() + a.size());
  return {static_cast<std::size_t>(a.shape(0)),
          static_cast<std::size_t>(a.shape(1)),
          static_cast<std::size_t>(a.shape(2)), role, std::move(data)};
}

Tensor ToArray(const BidderBatch& b) {
  Tensor out({b.batch(), b.bidders(), b.items()});
  std::copy(b.data().begin(), b.data().end(), out.mutable_data());
  return out;
}

MechanismSpec CheckedSpec(const MechanismSpec& spec) {
  spec.validate();
  return spec;
}

std::string Csv(const std::vector<MetricRecord>& records) {
  std::ostringstream out;
  write_metrics_csv(out, records);
  return out.str();
}

}  // namespace

PYBIND11_MODULE(smoothmarket, m) {
  m.doc() = "Equilibrium learning in sealed-bid auctions through a softmax "
            "smoothed market";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

  py::enum_<PaymentRule>(m, "PaymentRule")
      .value("FIRST_PRICE", PaymentRule::kFirstPrice)
      .value("SECOND_PRICE", PaymentRule::kSecondPrice);

  py::enum_<EstimatorKind>(m, "EstimatorKind")
      .value("SM", EstimatorKind::kSmoothMarket)
      .value("ES", EstimatorKind::kEvolutionStrategies)
      .value("REINFORCE", EstimatorKind::kReinforce);

  py::enum_<OutputHead>(m, "OutputHead")
      .value("BID", OutputHead::kBid)
      .value("GAUSSIAN", OutputHead::kGaussian);

  py::enum_<StepSchedule>(m, "StepSchedule")
      .value("CONSTANT", StepSchedule::kConstant)
      .value("COSINE", StepSchedule::kCosine);

  py::class_<MechanismSpec>(m, "MechanismSpec")
      .def(py::init([](PaymentRule rule, std::size_t bidders, std::size_t items,
                       double max_value) {
             return CheckedSpec({rule, bidders, items, max_value});
           }),
           py::arg("payment_rule") = PaymentRule::kFirstPrice,
           py::arg("bidders") = 2, py::arg("items") = 1,
           py::arg("max_value") = 1.0)
      .def_readwrite("payment_rule", &MechanismSpec::payment_rule)
      .def_readwrite("bidders", &MechanismSpec::bidders)
      .def_readwrite("items", &MechanismSpec::items)
      .def_readwrite("max_value", &MechanismSpec::max_value);

  // Auction primitives on (batch, bidders, items) arrays.
  m.def(
      "allocate_exact",
      [](const Tensor& bids, const MechanismSpec& spec) {
        const AuctionOutcome out =
            allocate_exact(ToBatch(bids, BatchRole::kBids), spec);
        return py::make_tuple(ToArray(out.allocations), ToArray(out.payments));
      },
      py::arg("bids"), py::arg("spec"),
      "Winner-take-all allocations and payments.");
  m.def(
      "allocate_soft",
      [](const Tensor& bids, double temperature) {
        return ToArray(
            allocate_soft(ToBatch(bids, BatchRole::kBids), temperature)
                .allocations);
      },
      py::arg("bids"), py::arg("temperature"));
  m.def(
      "utility_exact",
      [](const Tensor& values, const Tensor& bids, const MechanismSpec& spec) {
        return utility_exact(ToBatch(values, BatchRole::kValuations),
                             ToBatch(bids, BatchRole::kBids), spec);
      },
      py::arg("values"), py::arg("bids"), py::arg("spec"));
  m.def(
      "utility_soft",
      [](const Tensor& values, const Tensor& bids, const MechanismSpec& spec,
         double temperature) {
        return utility_soft(ToBatch(values, BatchRole::kValuations),
                            ToBatch(bids, BatchRole::kBids), spec, temperature);
      },
      py::arg("values"), py::arg("bids"), py::arg("spec"),
      py::arg("temperature"));
  m.def(
      "grad_utility_soft_wrt_bid",
      [](const Tensor& values, const Tensor& bids, const MechanismSpec& spec,
         double temperature) {
        return ToArray(grad_utility_soft_wrt_bid(
            ToBatch(values, BatchRole::kValuations),
            ToBatch(bids, BatchRole::kBids), spec, temperature));
      },
      py::arg("values"), py::arg("bids"), py::arg("spec"),
      py::arg("temperature"));

  py::class_<PolicyNet>(m, "PolicyNet")
      .def(py::init<std::vector<std::size_t>, OutputHead>(),
           py::arg("layer_sizes"), py::arg("head") = OutputHead::kBid)
      .def_static("initialized", &PolicyNet::initialized,
                  py::arg("layer_sizes"), py::arg("head"), py::arg("seed"))
      .def_static("default_layers", &PolicyNet::default_layers,
                  py::arg("items"), py::arg("head") = OutputHead::kBid,
                  py::arg("hidden") = std::vector<std::size_t>{10, 10})
      .def_property_readonly("layer_sizes", &PolicyNet::layer_sizes)
      .def_property_readonly("head", &PolicyNet::head)
      .def_property_readonly("parameter_count", &PolicyNet::parameter_count)
      .def_property(
          "parameters",
          [](const PolicyNet& net) {
            const auto p = net.parameters();
            return std::vector<double>(p.begin(), p.end());
          },
          [](PolicyNet& net, const std::vector<double>& values) {
            auto p = net.parameters();
            if (values.size() != p.size()) {
              throw ConfigError("parameter vector has the wrong length");
            }
            std::copy(values.begin(), values.end(), p.begin());
          })
      .def(
          "bids",
          [](const PolicyNet& net, const Eigen::MatrixXd& values) {
            return net.bids(values);
          },
          py::arg("values"), "Bids for an items x count matrix of values.")
      .def("save",
           [](const PolicyNet& net) {
             std::ostringstream out;
             net.save(out);
             return out.str();
           })
      .def_static("load", [](const std::string& text) {
        std::istringstream in(text);
        return PolicyNet::load(in);
      });

  m.def(
      "pretrain",
      [](PolicyNet& net, double max_value, std::size_t iterations,
         std::uint64_t seed) {
        pretrain(net, max_value, PretrainConfig{.iterations = iterations},
                 seed);
      },
      py::arg("net"), py::arg("max_value") = 1.0, py::arg("iterations") = 50,
      py::arg("seed") = 0);

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_readwrite("mechanism", &ExperimentConfig::mechanism)
      .def_readwrite("iterations", &ExperimentConfig::iterations)
      .def_readwrite("batch_size", &ExperimentConfig::batch_size)
      .def_readwrite("seed", &ExperimentConfig::seed)
      .def_readwrite("eval_every", &ExperimentConfig::eval_every)
      .def_readwrite("eval_batch", &ExperimentConfig::eval_batch)
      .def_readwrite("hidden_layers", &ExperimentConfig::hidden_layers)
      .def_readwrite("schedule", &ExperimentConfig::schedule)
      .def_readwrite("track_utility_loss", &ExperimentConfig::track_utility_loss)
      .def_property(
          "estimator",
          [](const ExperimentConfig& c) { return c.estimator.kind; },
          [](ExperimentConfig& c, EstimatorKind k) { c.estimator.kind = k; })
      .def_property(
          "temperature",
          [](const ExperimentConfig& c) { return c.estimator.temperature; },
          [](ExperimentConfig& c, double x) { c.estimator.temperature = x; })
      .def_property(
          "population_size",
          [](const ExperimentConfig& c) { return c.estimator.population_size; },
          [](ExperimentConfig& c, std::size_t n) {
            c.estimator.population_size = n;
          })
      .def_property(
          "sigma", [](const ExperimentConfig& c) { return c.estimator.sigma; },
          [](ExperimentConfig& c, double x) { c.estimator.sigma = x; })
      .def_property(
          "step_size",
          [](const ExperimentConfig& c) { return c.optimizer.step_size; },
          [](ExperimentConfig& c, double x) { c.optimizer.step_size = x; })
      .def_property(
          "pretrain_iterations",
          [](const ExperimentConfig& c) { return c.pretraining.iterations; },
          [](ExperimentConfig& c, std::size_t n) {
            c.pretraining.iterations = n;
          })
      .def("validate", &ExperimentConfig::validate);

  py::class_<MetricRecord>(m, "MetricRecord")
      .def_readonly("iteration", &MetricRecord::iteration)
      .def_readonly("l2", &MetricRecord::l2)
      .def_readonly("utility_loss", &MetricRecord::utility_loss)
      .def_readonly("grad_variance", &MetricRecord::grad_variance);

  py::class_<TrainingResult>(m, "TrainingResult")
      .def_readonly("policy", &TrainingResult::policy)
      .def_readonly("records", &TrainingResult::records)
      .def_readonly("final_l2", &TrainingResult::final_l2)
      .def("metrics_csv",
           [](const TrainingResult& r) { return Csv(r.records); });

  m.def(
      "run_training",
      [](const ExperimentConfig& config) {
        py::gil_scoped_release release;
        return run_training(config);
      },
      py::arg("config"));
  m.def(
      "lambda_sweep",
      [](const ExperimentConfig& config, const std::vector<double>& lambdas) {
        std::vector<SweepPoint> points;
        {
          py::gil_scoped_release release;
          points = lambda_sweep(config, lambdas);
        }
        std::vector<std::pair<double, double>> out;
        for (const SweepPoint& p : points) {
          out.emplace_back(p.temperature, p.final_l2);
        }
        return out;
      },
      py::arg("config"), py::arg("temperatures"),
      "List of (temperature, final L2) pairs.");

  // Closed-form reference values.
  m.def("dilog", &dilog, py::arg("x"));
  m.def("interim_error_exact", &interim_error_exact, py::arg("v1"),
        py::arg("b1"), py::arg("slope"), py::arg("temperature"));
  m.def("interim_utility_smooth_quadrature",
        &interim_utility_smooth_quadrature, py::arg("v1"), py::arg("b1"),
        py::arg("slope"), py::arg("temperature"), py::arg("nodes") = 16);
  m.def("ex_ante_bound", &ex_ante_bound, py::arg("slope"),
        py::arg("temperature"));
  m.def(
      "ex_ante_error_monte_carlo",
      [](double slope, double temperature, std::size_t samples,
         std::uint64_t seed) {
        const ExAnteErrorEstimate e =
            ex_ante_error_monte_carlo(slope, temperature, samples, seed);
        return py::make_tuple(e.error, e.standard_error);
      },
      py::arg("slope"), py::arg("temperature"), py::arg("samples"),
      py::arg("seed") = 0, "(error, standard error)");
}
