#pragma once

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "sequent/data.hpp"
#include "sequent/errors.hpp"
#include "sequent/models.hpp"
#include "sequent/snapshot.hpp"
#include "sequent/training.hpp"

namespace sequent {

/// Fully resolved run description. The JSON config file uses exactly the CLI
/// flag names as keys; flags passed on the command line override file values,
/// and the resolved merge is echoed into every artifact.
struct RunConfig {
  std::string model = "sequent";    // classical | dqc | sequent
  std::string dataset = "moons";    // moons | spirals | file
  std::string data_file;            // used when dataset == "file"
  int classes = 2;
  int samples = 2000;
  double noise = -1.0;              // -1 = per-dataset default
  double turns = 1.5;
  int qubits = 6;
  int depth = 10;
  std::string embed_axis = "Y";
  std::string entangle_axis = "Y";
  int epochs = -1;                  // -1 = per-model default (sequent: 2 per phase, others: 4)
  int batch = 32;
  double lr = 0.01;
  std::string loss = "cross-entropy";
  std::vector<std::uint64_t> seeds = {1};
  double test_fraction = 0.3;
  std::string out = "runs";

  static constexpr double kMoonsNoiseDefault = 0.1;
  static constexpr double kSpiralsNoiseDefault = 0.05;

  void resolve_defaults() {
    if (epochs < 0) epochs = (model == "sequent") ? 2 : 4;
    if (noise < 0.0) noise = (dataset == "spirals") ? kSpiralsNoiseDefault : kMoonsNoiseDefault;
  }

  void validate() const {
    if (model != "classical" && model != "dqc" && model != "sequent") {
      throw ConfigError("unknown model '" + model + "', expected classical, dqc or sequent");
    }
    if (dataset != "moons" && dataset != "spirals" && dataset != "file") {
      throw ConfigError("unknown dataset '" + dataset + "', expected moons, spirals or file");
    }
    if (dataset == "file" && data_file.empty()) {
      throw ConfigError("dataset 'file' requires --data-file");
    }
    if (classes < 2) throw ConfigError("classes must be >= 2");
    if (samples < 2) throw ConfigError("samples must be >= 2");
    if (noise < 0.0) throw ConfigError("noise must be >= 0");
    if (!(turns > 0.0)) throw ConfigError("turns must be > 0");
    if (qubits < 1 || qubits > StateVector::kMaxQubits) {
      throw ConfigError("qubits must be in [1, " + std::to_string(StateVector::kMaxQubits) + "]");
    }
    if (qubits < classes) {
      throw ConfigError("need at least as many qubits as classes (" + std::to_string(qubits) +
                        " < " + std::to_string(classes) + ")");
    }
    if (depth < 0) throw ConfigError("depth must be >= 0");
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (batch < 1) throw ConfigError("batch must be >= 1");
    if (!(lr > 0.0)) throw ConfigError("lr must be > 0");
    axis_from_char(embed_axis.empty() ? '?' : embed_axis[0]);
    axis_from_char(entangle_axis.empty() ? '?' : entangle_axis[0]);
    loss_from_string(loss);
    if (seeds.empty()) throw ConfigError("at least one seed is required");
    if (!(test_fraction > 0.0) || !(test_fraction < 1.0)) {
      throw ConfigError("test-fraction must lie strictly between 0 and 1");
    }
    if (out.empty()) throw ConfigError("output directory must not be empty");
  }

  json to_json() const {
    return json{{"model", model},
                {"dataset", dataset},
                {"data-file", data_file},
                {"classes", classes},
                {"samples", samples},
                {"noise", noise},
                {"turns", turns},
                {"qubits", qubits},
                {"depth", depth},
                {"embed-axis", embed_axis},
                {"entangle-axis", entangle_axis},
                {"epochs", epochs},
                {"batch", batch},
                {"lr", lr},
                {"loss", loss},
                {"seeds", seeds},
                {"test-fraction", test_fraction},
                {"out", out}};
  }

  static RunConfig from_json(const json& j) {
    RunConfig c;
    json src = j;
    // A report artifact embeds its resolved config under "config"; accept it
    // directly so a run can be reproduced from its own output.
    if (src.contains("config") && src["config"].is_object()) src = src["config"];
    for (const auto& [key, value] : src.items()) {
      if (key == "model") c.model = value.get<std::string>();
      else if (key == "dataset") c.dataset = value.get<std::string>();
      else if (key == "data-file") c.data_file = value.get<std::string>();
      else if (key == "classes") c.classes = value.get<int>();
      else if (key == "samples") c.samples = value.get<int>();
      else if (key == "noise") c.noise = value.get<double>();
      else if (key == "turns") c.turns = value.get<double>();
      else if (key == "qubits") c.qubits = value.get<int>();
      else if (key == "depth") c.depth = value.get<int>();
      else if (key == "embed-axis") c.embed_axis = value.get<std::string>();
      else if (key == "entangle-axis") c.entangle_axis = value.get<std::string>();
      else if (key == "epochs") c.epochs = value.get<int>();
      else if (key == "batch") c.batch = value.get<int>();
      else if (key == "lr") c.lr = value.get<double>();
      else if (key == "loss") c.loss = value.get<std::string>();
      else if (key == "seed") c.seeds = {value.get<std::uint64_t>()};
      else if (key == "seeds") c.seeds = value.get<std::vector<std::uint64_t>>();
      else if (key == "test-fraction") c.test_fraction = value.get<double>();
      else if (key == "out") c.out = value.get<std::string>();
      else if (key == "dataset-provenance") {}  // audit field echoed into reports
      else throw ConfigError("unknown config key '" + key + "'");
    }
    return c;
  }

  CircuitConfig circuit(int num_outputs) const {
    CircuitConfig cc;
    cc.num_qubits = qubits;
    cc.depth = depth;
    cc.num_outputs = num_outputs;
    cc.embed_axis = axis_from_char(embed_axis[0]);
    cc.entangle_axis = axis_from_char(entangle_axis[0]);
    return cc;
  }

  TrainConfig train_config(std::uint64_t seed) const {
    TrainConfig tc;
    tc.epochs = epochs;
    tc.batch_size = batch;
    tc.adam.learning_rate = lr;
    tc.loss = loss_from_string(loss);
    tc.seed = seed;
    return tc;
  }
};

inline RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid JSON in config file: ") + e.what());
  }
  return RunConfig::from_json(j);
}

struct RunResult {
  std::uint64_t seed = 0;
  TrainingReport report;
  Snapshot snapshot;
  json config_echo;
};

inline Dataset build_dataset(const RunConfig& config, std::uint64_t seed) {
  if (config.dataset == "moons") return make_moons(config.samples, config.noise, seed);
  if (config.dataset == "spirals") {
    return make_spirals(config.samples, config.noise, config.turns, seed);
  }
  Dataset ds = load_features_csv(config.data_file, config.classes);
  if (config.qubits < ds.classes) {
    throw ConfigError("need at least as many qubits as classes for the loaded data");
  }
  return ds;
}

/// Trains one model for one seed: generate/load, split, standardize, train.
inline RunResult run_single(const RunConfig& config, std::uint64_t seed) {
  config.validate();
  Dataset full = build_dataset(config, seed);
  auto [train, test] = split(full, config.test_fraction, seed);
  const FeatureStats stats = standardize(train, test);
  const TrainConfig tc = config.train_config(seed);

  RunResult result;
  result.seed = seed;
  result.config_echo = config.to_json();
  result.config_echo["seeds"] = std::vector<std::uint64_t>{seed};
  result.config_echo["dataset-provenance"] = full.provenance;

  Rng init_rng(derive_seed(seed, "init." + config.model));
  if (config.model == "classical") {
    // Hidden width equals the qubit count of the competing quantum models.
    ClassicalBaseline model = ClassicalBaseline::init(train.dim, config.qubits, train.classes, init_rng);
    result.report = train_classical(model, train, test, tc);
    result.snapshot.model = std::move(model);
  } else if (config.model == "dqc") {
    DQCModel model = DQCModel::init(train.dim, config.circuit(config.qubits), train.classes, init_rng);
    result.report = train_dqc(model, train, test, tc);
    result.snapshot.model = std::move(model);
  } else {
    SequentModel model = SequentModel::init(train.dim, config.qubits, train.classes, init_rng);
    result.report = train_sequent(model, config.circuit(train.classes), train, test, tc);
    result.snapshot.model = std::move(model);
  }
  result.snapshot.kind = config.model;
  result.snapshot.stats = stats;
  result.snapshot.seed = seed;
  result.snapshot.config_echo = result.config_echo;
  return result;
}

// --- artifact serialization ---------------------------------------------------

inline json report_to_json(const TrainingReport& report, const json& config_echo) {
  json phases = json::array();
  for (const auto& phase : report.phases) {
    json epochs = json::array();
    for (const auto& em : phase.epochs) {
      epochs.push_back(json{{"epoch", em.epoch},
                            {"train_loss", em.train_loss},
                            {"train_accuracy", em.train_accuracy},
                            {"test_accuracy", em.test_accuracy}});
    }
    phases.push_back(json{{"name", phase.name},
                          {"epochs", epochs},
                          {"trained_parameter_count", phase.trained_parameter_count},
                          {"theta_digest_before", phase.theta_digest_before},
                          {"theta_digest_after", phase.theta_digest_after},
                          {"phi_digest_after", phase.phi_digest_after}});
  }
  // Wall-clock time is deliberately left out: report files are bit-identical
  // for identical config and seed. Timing goes to the run log instead.
  return json{{"format", "sequent-report-v1"},
              {"model", report.model_kind},
              {"seed", report.seed},
              {"config", config_echo},
              {"phases", phases},
              {"final_test_accuracy", report.final_test_accuracy},
              {"confusion", report.confusion}};
}

inline std::string metrics_to_csv(const TrainingReport& report) {
  std::ostringstream os;
  os << "phase,epoch,train_loss,train_acc,test_acc\n";
  char buf[64];
  for (const auto& phase : report.phases) {
    for (const auto& em : phase.epochs) {
      os << phase.name << ',' << em.epoch << ',';
      std::snprintf(buf, sizeof(buf), "%.17g", em.train_loss);
      os << buf << ',';
      std::snprintf(buf, sizeof(buf), "%.17g", em.train_accuracy);
      os << buf << ',';
      std::snprintf(buf, sizeof(buf), "%.17g", em.test_accuracy);
      os << buf << '\n';
    }
  }
  return os.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw ConfigError("failed writing '" + path.string() + "'");
}

/// Artifact basename for one run, e.g. "sequent-moons-s42".
inline std::string run_stem(const RunConfig& config, std::uint64_t seed) {
  const std::string data_tag = config.dataset == "file"
                                   ? std::filesystem::path(config.data_file).stem().string()
                                   : config.dataset;
  return config.model + "-" + data_tag + "-s" + std::to_string(seed);
}

inline void write_run_artifacts(const RunConfig& config, const RunResult& result) {
  namespace fs = std::filesystem;
  const fs::path dir(config.out);
  fs::create_directories(dir);
  const std::string stem = run_stem(config, result.seed);
  write_text_file(dir / (stem + ".report.json"),
                  report_to_json(result.report, result.config_echo).dump(2) + "\n");
  write_text_file(dir / (stem + ".metrics.csv"), metrics_to_csv(result.report));
  save_snapshot(result.snapshot, (dir / (stem + ".snapshot.json")).string());
}

inline double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

/// Runs every seed in the config, writes per-seed artifacts plus an aggregate
/// summary, and returns the results.
inline std::vector<RunResult> cmd_train(const RunConfig& config, std::ostream& log = std::cout) {
  config.validate();
  // Fail before any artifact is written if the input data is unusable.
  for (std::uint64_t seed : config.seeds) build_dataset(config, seed).validate();

  std::vector<RunResult> results;
  std::vector<double> accuracies;
  for (std::uint64_t seed : config.seeds) {
    RunResult result = run_single(config, seed);
    write_run_artifacts(config, result);
    log << run_stem(config, seed) << ": test accuracy "
        << result.report.final_test_accuracy << " (" << result.report.wall_clock_seconds
        << " s)\n";
    accuracies.push_back(result.report.final_test_accuracy);
    results.push_back(std::move(result));
  }
  if (config.seeds.size() > 1) {
    json summary{{"model", config.model},
                 {"dataset", config.dataset},
                 {"seeds", config.seeds},
                 {"accuracies", accuracies},
                 {"median_test_accuracy", median(accuracies)},
                 {"min_test_accuracy", *std::min_element(accuracies.begin(), accuracies.end())},
                 {"max_test_accuracy", *std::max_element(accuracies.begin(), accuracies.end())}};
    const std::filesystem::path dir(config.out);
    write_text_file(dir / (config.model + "-" + config.dataset + ".summary.json"),
                    summary.dump(2) + "\n");
    log << "median test accuracy over " << config.seeds.size() << " seeds: "
        << median(accuracies) << "\n";
  }
  return results;
}

// --- decision-boundary grid ----------------------------------------------------

struct GridBounds {
  double x_min = -2.0, x_max = 2.0, y_min = -2.0, y_max = 2.0;
};

/// Evaluates a 2-input snapshot over a uniform resolution x resolution grid
/// and writes CSV rows x,y,predicted_class,score_0..score_{k-1}.
inline void cmd_grid(const std::string& snapshot_path, const GridBounds& bounds, int resolution,
                     const std::string& out_path) {
  if (resolution < 2) throw ConfigError("grid resolution must be >= 2");
  if (!(bounds.x_max > bounds.x_min) || !(bounds.y_max > bounds.y_min)) {
    throw ConfigError("grid bounds must satisfy min < max");
  }
  const Snapshot snap = load_snapshot(snapshot_path);
  if (snap.input_dim() != 2) {
    throw ConfigError("grid export requires a model with 2 input features, snapshot has " +
                      std::to_string(snap.input_dim()));
  }
  std::ostringstream os;
  os << "x,y,predicted_class";
  for (int k = 0; k < snap.num_classes(); ++k) os << ",score_" << k;
  os << '\n';
  char buf[64];
  for (int iy = 0; iy < resolution; ++iy) {
    const double y = bounds.y_min + (bounds.y_max - bounds.y_min) * iy / (resolution - 1);
    for (int ix = 0; ix < resolution; ++ix) {
      const double x = bounds.x_min + (bounds.x_max - bounds.x_min) * ix / (resolution - 1);
      const double point[2] = {x, y};
      const std::vector<double> scores = snap.forward(point);
      std::snprintf(buf, sizeof(buf), "%.17g", x);
      os << buf << ',';
      std::snprintf(buf, sizeof(buf), "%.17g", y);
      os << buf << ',' << argmax_class(scores);
      for (double s : scores) {
        std::snprintf(buf, sizeof(buf), "%.17g", s);
        os << ',' << buf;
      }
      os << '\n';
    }
  }
  write_text_file(out_path, os.str());
}

// --- benchmark ------------------------------------------------------------------

struct BenchmarkRow {
  std::string model;
  std::string dataset;
  double median_accuracy = 0.0;
  double min_accuracy = 0.0;
  double max_accuracy = 0.0;
  double mean_wall_clock = 0.0;
};

struct BenchmarkOptions {
  std::string out = "benchmark";
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  int samples = 2000;
  int qubits = 6;
  int depth = 10;
  int jobs = 0;  // 0 = hardware concurrency
};

/// Full reproduction: {classical, dqc, sequent} x {moons, spirals} x seeds
/// with the standard defaults. Jobs fan out across workers; aggregation is
/// deterministic after the join.
inline std::vector<BenchmarkRow> cmd_benchmark(const BenchmarkOptions& opts,
                                               std::ostream& log = std::cout) {
  const std::vector<std::string> datasets = {"moons", "spirals"};
  const std::vector<std::string> models = {"classical", "dqc", "sequent"};

  struct Job {
    RunConfig config;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& dataset : datasets) {
    for (const auto& model : models) {
      RunConfig config;
      config.model = model;
      config.dataset = dataset;
      config.samples = opts.samples;
      config.qubits = opts.qubits;
      config.depth = opts.depth;
      config.seeds = opts.seeds;
      config.out = opts.out;
      config.resolve_defaults();
      config.validate();
      for (std::uint64_t seed : opts.seeds) jobs.push_back({config, seed});
    }
  }

  std::vector<RunResult> results(jobs.size());
  std::atomic<std::size_t> next{0};
  const unsigned worker_count = std::max(1u, opts.jobs > 0
                                                 ? static_cast<unsigned>(opts.jobs)
                                                 : std::thread::hardware_concurrency());
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      results[i] = run_single(jobs[i].config, jobs[i].seed);
    }
  };
  if (worker_count <= 1 || jobs.size() <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < std::min<std::size_t>(worker_count, jobs.size()); ++w) {
      pool.emplace_back(worker);
    }
    for (auto& t : pool) t.join();
  }

  for (std::size_t i = 0; i < jobs.size(); ++i) {
    write_run_artifacts(jobs[i].config, results[i]);
  }

  std::vector<BenchmarkRow> rows;
  std::ostringstream csv;
  csv << "model,dataset,median_test_accuracy,min_test_accuracy,max_test_accuracy\n";
  std::size_t idx = 0;
  for (const auto& dataset : datasets) {
    for (const auto& model : models) {
      BenchmarkRow row;
      row.model = model;
      row.dataset = dataset;
      std::vector<double> acc;
      for (std::size_t s = 0; s < opts.seeds.size(); ++s, ++idx) {
        acc.push_back(results[idx].report.final_test_accuracy);
        row.mean_wall_clock += results[idx].report.wall_clock_seconds;
      }
      row.mean_wall_clock /= static_cast<double>(opts.seeds.size());
      row.median_accuracy = median(acc);
      row.min_accuracy = *std::min_element(acc.begin(), acc.end());
      row.max_accuracy = *std::max_element(acc.begin(), acc.end());
      rows.push_back(row);
      char buf[160];
      std::snprintf(buf, sizeof(buf), "%s,%s,%.4f,%.4f,%.4f\n", model.c_str(), dataset.c_str(),
                    row.median_accuracy, row.min_accuracy, row.max_accuracy);
      csv << buf;
    }
  }
  std::filesystem::create_directories(opts.out);
  write_text_file(std::filesystem::path(opts.out) / "summary.csv", csv.str());

  log << "\nmodel      dataset   median    min      max      mean s/run\n";
  for (const auto& row : rows) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-10s %-9s %-9.4f %-8.4f %-8.4f %.1f\n", row.model.c_str(),
                  row.dataset.c_str(), row.median_accuracy, row.min_accuracy, row.max_accuracy,
                  row.mean_wall_clock);
    log << buf;
  }
  return rows;
}

}  // namespace sequent
