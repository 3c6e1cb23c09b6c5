#pragma once

#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "sequent/data.hpp"
#include "sequent/errors.hpp"
#include "sequent/models.hpp"

namespace sequent {

using json = nlohmann::json;

inline json circuit_to_json(const CircuitConfig& c) {
  return json{{"num_qubits", c.num_qubits},
              {"depth", c.depth},
              {"num_outputs", c.num_outputs},
              {"embed_axis", std::string(1, axis_name(c.embed_axis))},
              {"entangle_axis", std::string(1, axis_name(c.entangle_axis))}};
}

inline CircuitConfig circuit_from_json(const json& j) {
  CircuitConfig c;
  c.num_qubits = j.at("num_qubits").get<int>();
  c.depth = j.at("depth").get<int>();
  c.num_outputs = j.at("num_outputs").get<int>();
  c.embed_axis = axis_from_char(j.at("embed_axis").get<std::string>().at(0));
  c.entangle_axis = axis_from_char(j.at("entangle_axis").get<std::string>().at(0));
  c.validate();
  return c;
}

/// A trained model together with everything needed to run it on raw inputs:
/// the feature standardization from its training run and the resolved run
/// configuration. Serialized losslessly (doubles round-trip bit-exactly).
struct Snapshot {
  std::string kind;  // classical | dqc | sequent
  std::variant<ClassicalBaseline, DQCModel, SequentModel> model;
  std::optional<FeatureStats> stats;
  json config_echo;
  std::uint64_t seed = 0;

  int input_dim() const {
    return std::visit([](const auto& m) { return m.input_dim(); }, model);
  }
  int num_classes() const {
    return std::visit([](const auto& m) { return m.num_classes(); }, model);
  }

  /// Logits for a raw (un-standardized) input row.
  std::vector<double> forward(std::span<const double> x) const {
    std::vector<double> row(x.begin(), x.end());
    if (stats) stats->apply(row);
    return std::visit([&row](const auto& m) { return m.forward(row); }, model);
  }
};

namespace detail {

inline json layer_meta(const DenseLayer& l) {
  const char* act = l.activation == Activation::Identity ? "identity"
                    : l.activation == Activation::Tanh   ? "tanh"
                                                         : "scaled-tanh";
  return json{{"in", l.in_dim}, {"out", l.out_dim}, {"activation", act}};
}

inline Activation activation_from_string(const std::string& s) {
  if (s == "identity") return Activation::Identity;
  if (s == "tanh") return Activation::Tanh;
  if (s == "scaled-tanh") return Activation::ScaledTanhHalfPi;
  throw ConfigError("unknown activation '" + s + "' in snapshot");
}

inline DenseLayer layer_from_meta(const json& j, std::span<const double>& theta) {
  DenseLayer l;
  l.in_dim = j.at("in").get<int>();
  l.out_dim = j.at("out").get<int>();
  l.activation = activation_from_string(j.at("activation").get<std::string>());
  l.weights.resize(static_cast<std::size_t>(l.in_dim) * l.out_dim);
  l.bias.resize(static_cast<std::size_t>(l.out_dim));
  if (theta.size() < l.weights.size() + l.bias.size()) {
    throw ConfigError("snapshot theta vector too short for the declared layers");
  }
  take(theta, l.weights);
  take(theta, l.bias);
  return l;
}

}  // namespace detail

inline json snapshot_to_json(const Snapshot& snap) {
  json j;
  j["format"] = "sequent-snapshot-v1";
  j["kind"] = snap.kind;
  j["seed"] = snap.seed;
  j["config"] = snap.config_echo;
  if (snap.stats) {
    j["standardizer"] = {{"mean", snap.stats->mean}, {"stddev", snap.stats->stddev}};
  }
  std::visit(
      [&j](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, ClassicalBaseline>) {
          j["layers"] = {detail::layer_meta(m.hidden), detail::layer_meta(m.output)};
        } else if constexpr (std::is_same_v<M, DQCModel>) {
          j["layers"] = {detail::layer_meta(m.pre), detail::layer_meta(m.post)};
          j["circuit"] = circuit_to_json(m.circuit);
        } else {
          j["layers"] = json::array({detail::layer_meta(m.compression)});
          j["mode"] = {{"surrogate", m.surrogate_mode()}, {"frozen_classical", m.frozen_classical}};
          if (m.surrogate_mode()) {
            j["layers"].push_back(detail::layer_meta(m.surrogate()));
          } else {
            j["circuit"] = circuit_to_json(m.quantum_head().circuit);
          }
        }
        j["theta"] = theta_flat(m);
        j["phi"] = phi_flat(m);
      },
      snap.model);
  return j;
}

inline Snapshot snapshot_from_json(const json& j) {
  if (j.value("format", "") != "sequent-snapshot-v1") {
    throw ConfigError("not a model snapshot (missing or wrong 'format' field)");
  }
  Snapshot snap;
  snap.kind = j.at("kind").get<std::string>();
  snap.seed = j.value("seed", std::uint64_t{0});
  snap.config_echo = j.value("config", json::object());
  if (j.contains("standardizer")) {
    FeatureStats st;
    st.mean = j["standardizer"].at("mean").get<std::vector<double>>();
    st.stddev = j["standardizer"].at("stddev").get<std::vector<double>>();
    snap.stats = std::move(st);
  }
  const std::vector<double> theta = j.at("theta").get<std::vector<double>>();
  const std::vector<double> phi = j.at("phi").get<std::vector<double>>();
  std::span<const double> theta_view(theta);
  const json& layers = j.at("layers");

  if (snap.kind == "classical") {
    ClassicalBaseline m;
    m.hidden = detail::layer_from_meta(layers.at(0), theta_view);
    m.output = detail::layer_from_meta(layers.at(1), theta_view);
    snap.model = std::move(m);
  } else if (snap.kind == "dqc") {
    DQCModel m;
    m.pre = detail::layer_from_meta(layers.at(0), theta_view);
    m.post = detail::layer_from_meta(layers.at(1), theta_view);
    m.circuit = circuit_from_json(j.at("circuit"));
    m.quantum = QuantumParams::zeros(m.circuit);
    if (phi.size() != m.quantum.angles.size()) {
      throw ConfigError("snapshot phi vector does not match circuit shape");
    }
    m.quantum.angles = phi;
    snap.model = std::move(m);
  } else if (snap.kind == "sequent") {
    SequentModel m;
    m.compression = detail::layer_from_meta(layers.at(0), theta_view);
    const json& mode = j.at("mode");
    m.frozen_classical = mode.at("frozen_classical").get<bool>();
    if (mode.at("surrogate").get<bool>()) {
      m.head = detail::layer_from_meta(layers.at(1), theta_view);
    } else {
      QuantumHead qh;
      qh.circuit = circuit_from_json(j.at("circuit"));
      qh.params = QuantumParams::zeros(qh.circuit);
      if (phi.size() != qh.params.angles.size()) {
        throw ConfigError("snapshot phi vector does not match circuit shape");
      }
      qh.params.angles = phi;
      m.head = std::move(qh);
    }
    snap.model = std::move(m);
  } else {
    throw ConfigError("unknown model kind '" + snap.kind + "' in snapshot");
  }
  if (!theta_view.empty()) {
    throw ConfigError("snapshot theta vector longer than the declared layers");
  }
  return snap;
}

inline void save_snapshot(const Snapshot& snap, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write snapshot '" + path + "'");
  out << snapshot_to_json(snap).dump(2) << '\n';
  if (!out) throw ConfigError("failed writing snapshot '" + path + "'");
}

inline Snapshot load_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open snapshot '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("corrupt snapshot '" + path + "': " + e.what());
  }
  try {
    return snapshot_from_json(j);
  } catch (const json::exception& e) {
    throw ConfigError("corrupt snapshot '" + path + "': " + e.what());
  }
}

}  // namespace sequent
