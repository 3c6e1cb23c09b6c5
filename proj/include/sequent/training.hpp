#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "sequent/data.hpp"
#include "sequent/digest.hpp"
#include "sequent/errors.hpp"
#include "sequent/models.hpp"

namespace sequent {

struct TrainConfig {
  int epochs = 4;  // per phase for the two-phase procedure
  int batch_size = 32;
  AdamConfig adam;
  Loss loss = Loss::CrossEntropy;
  std::uint64_t seed = 1;

  void validate() const {
    if (epochs < 0) throw ConfigError("epochs must be >= 0");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (!(adam.learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  }
};

struct EpochMetrics {
  int epoch = 0;  // 1-based within its phase
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
};

struct PhaseReport {
  std::string name;
  std::vector<EpochMetrics> epochs;
  std::size_t trained_parameter_count = 0;
  std::string theta_digest_before;
  std::string theta_digest_after;
  std::string phi_digest_after;
};

struct TrainingReport {
  std::string model_kind;
  std::uint64_t seed = 0;
  std::vector<PhaseReport> phases;
  double final_test_accuracy = 0.0;
  std::vector<std::vector<long>> confusion;  // [true][predicted]
  double wall_clock_seconds = 0.0;           // volatile; not part of the serialized report
};

struct EvalResult {
  double accuracy = 0.0;
  std::vector<std::vector<long>> confusion;
};

inline int argmax_class(std::span<const double> logits) {
  return static_cast<int>(std::max_element(logits.begin(), logits.end()) - logits.begin());
}

template <typename Model>
EvalResult evaluate(const Model& model, const Dataset& ds) {
  if (ds.size() == 0) throw ConfigError("evaluate: empty dataset");
  EvalResult r;
  r.confusion.assign(static_cast<std::size_t>(ds.classes),
                     std::vector<long>(static_cast<std::size_t>(ds.classes), 0));
  long correct = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const int predicted = argmax_class(model.forward(ds.row(i)));
    const int truth = ds.labels[i];
    ++r.confusion[static_cast<std::size_t>(truth)][static_cast<std::size_t>(predicted)];
    if (predicted == truth) ++correct;
  }
  r.accuracy = static_cast<double>(correct) / static_cast<double>(ds.size());
  return r;
}

template <typename Model>
double mean_loss(const Model& model, const Dataset& ds, Loss loss) {
  double total = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    total += compute_loss(loss, model.forward(ds.row(i)), ds.labels[i]).loss;
  }
  return total / static_cast<double>(ds.size());
}

namespace detail {

enum class TrainSelection { ThetaOnly, PhiOnly, ThetaAndPhi };

/// Mini-batch Adam over the selected parameter partition. Per-sample
/// gradients are averaged in index order, so the result is bitwise
/// reproducible for a fixed shuffle stream.
template <typename Model>
PhaseReport train_phase(Model& model, const Dataset& train, const Dataset& test,
                        const TrainConfig& config, Rng& order_rng, const std::string& phase_name,
                        TrainSelection selection) {
  config.validate();
  train.validate();
  test.validate();

  PhaseReport report;
  report.name = phase_name;
  report.theta_digest_before = sha256_hex(theta_flat(model));

  const bool use_theta = selection != TrainSelection::PhiOnly;
  const bool use_phi = selection != TrainSelection::ThetaOnly;
  std::vector<double> theta = theta_flat(model);
  std::vector<double> phi = phi_flat(model);
  const std::size_t n_theta = use_theta ? theta.size() : 0;
  const std::size_t n_phi = use_phi ? phi.size() : 0;
  report.trained_parameter_count = n_theta + n_phi;

  std::vector<double> params(n_theta + n_phi);
  auto gather = [&] {
    if (use_theta) std::copy(theta.begin(), theta.end(), params.begin());
    if (use_phi) std::copy(phi.begin(), phi.end(), params.begin() + static_cast<std::ptrdiff_t>(n_theta));
  };
  auto scatter = [&] {
    if (use_theta) {
      std::copy(params.begin(), params.begin() + static_cast<std::ptrdiff_t>(n_theta), theta.begin());
      set_theta(model, theta);
    }
    if (use_phi) {
      std::copy(params.begin() + static_cast<std::ptrdiff_t>(n_theta), params.end(), phi.begin());
      set_phi(model, phi);
    }
  };
  gather();

  AdamOptimizer optimizer(params.size(), config.adam);
  std::vector<double> batch_grad(params.size());
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    order_rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      std::fill(batch_grad.begin(), batch_grad.end(), 0.0);
      for (std::size_t s = start; s < end; ++s) {
        const std::size_t i = order[s];
        const ModelGrads g = backward(model, train.row(i), train.labels[i], config.loss);
        epoch_loss += g.loss;
        if (use_theta) {
          for (std::size_t p = 0; p < n_theta; ++p) batch_grad[p] += g.theta[p];
        }
        if (use_phi) {
          for (std::size_t p = 0; p < n_phi; ++p) batch_grad[n_theta + p] += g.phi[p];
        }
      }
      const double inv = 1.0 / static_cast<double>(end - start);
      for (double& g : batch_grad) g *= inv;
      optimizer.step(params, batch_grad);
      scatter();
    }
    epoch_loss /= static_cast<double>(train.size());
    if (!std::isfinite(epoch_loss)) {
      throw TrainingError("training diverged: non-finite loss in epoch " + std::to_string(epoch) +
                          " of " + phase_name);
    }
    EpochMetrics em;
    em.epoch = epoch;
    em.train_loss = epoch_loss;
    em.train_accuracy = evaluate(model, train).accuracy;
    em.test_accuracy = evaluate(model, test).accuracy;
    report.epochs.push_back(em);
  }

  report.theta_digest_after = sha256_hex(theta_flat(model));
  report.phi_digest_after = sha256_hex(phi_flat(model));
  return report;
}

template <typename Model>
TrainingReport finish_report(const Model& model, const Dataset& test, std::string kind,
                             std::uint64_t seed, std::vector<PhaseReport> phases) {
  TrainingReport r;
  r.model_kind = std::move(kind);
  r.seed = seed;
  r.phases = std::move(phases);
  const EvalResult ev = evaluate(model, test);
  r.final_test_accuracy = ev.accuracy;
  r.confusion = ev.confusion;
  return r;
}

}  // namespace detail

inline TrainingReport train_classical(ClassicalBaseline& model, const Dataset& train,
                                      const Dataset& test, const TrainConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  Rng order_rng(derive_seed(config.seed, "batch-order"));
  auto phase = detail::train_phase(model, train, test, config, order_rng, "train",
                                   detail::TrainSelection::ThetaAndPhi);
  auto report = detail::finish_report(model, test, "classical", config.seed, {std::move(phase)});
  report.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

/// Joint training: classical dressing weights and circuit angles updated
/// concurrently by one optimizer.
inline TrainingReport train_dqc(DQCModel& model, const Dataset& train, const Dataset& test,
                                const TrainConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  Rng order_rng(derive_seed(config.seed, "batch-order"));
  auto phase = detail::train_phase(model, train, test, config, order_rng, "train",
                                   detail::TrainSelection::ThetaAndPhi);
  auto report = detail::finish_report(model, test, "dqc", config.seed, {std::move(phase)});
  report.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

/// Two sequential phases: classical pre-training of compression + surrogate,
/// then the surrogate is swapped for the circuit and only the angles train.
/// The classical weights are digest-checked to be bit-identical across
/// phase 2, and phase 2 trains exactly depth * num_qubits scalars.
inline TrainingReport train_sequent(SequentModel& model, const CircuitConfig& circuit,
                                    const Dataset& train, const Dataset& test,
                                    const TrainConfig& config) {
  if (!model.surrogate_mode()) {
    throw ConfigError("train_sequent: model must start in surrogate mode");
  }
  const auto t0 = std::chrono::steady_clock::now();
  Rng order_rng(derive_seed(config.seed, "batch-order"));
  auto phase1 = detail::train_phase(model, train, test, config, order_rng, "classical-pretrain",
                                    detail::TrainSelection::ThetaOnly);

  model = swap_surrogate_for_vqc(model, circuit, config.seed);
  auto phase2 = detail::train_phase(model, train, test, config, order_rng, "quantum-finetune",
                                    detail::TrainSelection::PhiOnly);

  if (phase2.theta_digest_before != phase2.theta_digest_after) {
    throw TrainingError("freeze violation: classical weights changed during quantum fine-tuning");
  }
  const auto expected = static_cast<std::size_t>(circuit.depth) *
                        static_cast<std::size_t>(circuit.num_qubits);
  if (phase2.trained_parameter_count != expected) {
    throw TrainingError("phase 2 trained " + std::to_string(phase2.trained_parameter_count) +
                        " parameters, expected depth*num_qubits = " + std::to_string(expected));
  }

  auto report = detail::finish_report(model, test, "sequent", config.seed,
                                      {std::move(phase1), std::move(phase2)});
  report.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace sequent
