// Command-line entry point: dataset generation, training, evaluation,
// decision-boundary grid export, self-verification and the full benchmark.
//
// Exit codes: 0 success, 1 verification failure, 2 configuration error,
// 3 numerical divergence during training.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sequent/verify.hpp"
#include "sequent/workbench.hpp"

namespace {

// One option set shared by train/evaluate; only flags the user actually
// passed override values from --config.
struct RunFlags {
  sequent::RunConfig values;
  std::uint64_t seed = 1;
  std::vector<std::uint64_t> seeds;

  CLI::Option* model = nullptr;
  CLI::Option* dataset = nullptr;
  CLI::Option* data_file = nullptr;
  CLI::Option* classes = nullptr;
  CLI::Option* samples = nullptr;
  CLI::Option* noise = nullptr;
  CLI::Option* turns = nullptr;
  CLI::Option* qubits = nullptr;
  CLI::Option* depth = nullptr;
  CLI::Option* embed_axis = nullptr;
  CLI::Option* entangle_axis = nullptr;
  CLI::Option* epochs = nullptr;
  CLI::Option* batch = nullptr;
  CLI::Option* lr = nullptr;
  CLI::Option* loss = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* seeds_opt = nullptr;
  CLI::Option* test_fraction = nullptr;
  CLI::Option* out = nullptr;

  void add_to(CLI::App* cmd) {
    model = cmd->add_option("--model", values.model, "classical | dqc | sequent");
    dataset = cmd->add_option("--dataset", values.dataset, "moons | spirals | file");
    data_file = cmd->add_option("--data-file", values.data_file, "CSV features file (dataset=file)");
    classes = cmd->add_option("--classes", values.classes, "class count for CSV data");
    samples = cmd->add_option("--samples", values.samples, "generated sample count");
    noise = cmd->add_option("--noise", values.noise, "generator noise std");
    turns = cmd->add_option("--turns", values.turns, "spiral turns");
    qubits = cmd->add_option("--qubits", values.qubits, "qubit count (and classical hidden width)");
    depth = cmd->add_option("--depth", values.depth, "entangling layer count");
    embed_axis = cmd->add_option("--embed-axis", values.embed_axis, "X | Y | Z");
    entangle_axis = cmd->add_option("--entangle-axis", values.entangle_axis, "X | Y | Z");
    epochs = cmd->add_option("--epochs", values.epochs, "epochs (per phase for sequent)");
    batch = cmd->add_option("--batch", values.batch, "mini-batch size");
    lr = cmd->add_option("--lr", values.lr, "Adam learning rate");
    loss = cmd->add_option("--loss", values.loss, "cross-entropy | squared-error");
    seed_opt = cmd->add_option("--seed", seed, "single seed");
    seeds_opt = cmd->add_option("--seeds", seeds, "seed list")->delimiter(',');
    test_fraction = cmd->add_option("--test-fraction", values.test_fraction, "held-out fraction");
    out = cmd->add_option("--out", values.out, "output directory");
  }

  sequent::RunConfig merge(const std::string& config_path) const {
    sequent::RunConfig merged;
    if (!config_path.empty()) merged = sequent::load_config_file(config_path);
    if (model->count()) merged.model = values.model;
    if (dataset->count()) merged.dataset = values.dataset;
    if (data_file->count()) merged.data_file = values.data_file;
    if (classes->count()) merged.classes = values.classes;
    if (samples->count()) merged.samples = values.samples;
    if (noise->count()) merged.noise = values.noise;
    if (turns->count()) merged.turns = values.turns;
    if (qubits->count()) merged.qubits = values.qubits;
    if (depth->count()) merged.depth = values.depth;
    if (embed_axis->count()) merged.embed_axis = values.embed_axis;
    if (entangle_axis->count()) merged.entangle_axis = values.entangle_axis;
    if (epochs->count()) merged.epochs = values.epochs;
    if (batch->count()) merged.batch = values.batch;
    if (lr->count()) merged.lr = values.lr;
    if (loss->count()) merged.loss = values.loss;
    if (seed_opt->count()) merged.seeds = {seed};
    if (seeds_opt->count()) merged.seeds = seeds;
    if (test_fraction->count()) merged.test_fraction = values.test_fraction;
    if (out->count()) merged.out = values.out;
    merged.resolve_defaults();
    return merged;
  }
};

int run_verify(bool inject_cnot_fault) {
  sequent::verify::VerifyOptions opts;
  opts.inject_cnot_fault = inject_cnot_fault;
  bool all_passed = true;
  for (const auto& check : sequent::verify::run_all_checks(opts)) {
    std::printf("[%s] %s: %s\n", check.passed ? " OK " : "FAIL", check.name.c_str(),
                check.detail.c_str());
    if (!check.passed) all_passed = false;
  }
  std::printf("%s\n", all_passed ? "all checks passed" : "verification FAILED");
  return all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hybrid quantum-classical classification workbench"};
  app.require_subcommand(1);

  // generate-data
  auto* gen = app.add_subcommand("generate-data", "write a generated dataset as CSV");
  std::string gen_dataset = "moons";
  int gen_samples = 2000;
  double gen_noise = -1.0;
  double gen_turns = 1.5;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  gen->add_option("--dataset", gen_dataset, "moons | spirals");
  gen->add_option("--samples", gen_samples, "sample count");
  gen->add_option("--noise", gen_noise, "noise std");
  gen->add_option("--turns", gen_turns, "spiral turns");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "output CSV path")->required();

  // train
  auto* train = app.add_subcommand("train", "train a model and write report/metrics/snapshot");
  std::string train_config_path;
  train->add_option("--config", train_config_path, "JSON config file (flags override)");
  RunFlags train_flags;
  train_flags.add_to(train);

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "evaluate a snapshot on a dataset");
  std::string eval_snapshot;
  std::string eval_config_path;
  eval->add_option("--snapshot", eval_snapshot, "model snapshot JSON")->required();
  eval->add_option("--config", eval_config_path, "JSON config file (flags override)");
  RunFlags eval_flags;
  eval_flags.add_to(eval);

  // grid
  auto* grid = app.add_subcommand("grid", "export decision-boundary grid CSV for a snapshot");
  std::string grid_snapshot;
  std::string grid_out;
  int grid_resolution = 100;
  std::vector<double> grid_bounds = {-2.0, 2.0, -2.0, 2.0};
  grid->add_option("--snapshot", grid_snapshot, "model snapshot JSON")->required();
  grid->add_option("--resolution", grid_resolution, "grid points per axis");
  grid->add_option("--bounds", grid_bounds, "x_min,x_max,y_min,y_max")
      ->delimiter(',')
      ->expected(4);
  grid->add_option("--out", grid_out, "output CSV path")->required();

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "run the fast invariant suite");
  bool inject_cnot_fault = false;
  verify_cmd->add_flag("--inject-cnot-fault", inject_cnot_fault)->group("");  // test hook

  // benchmark
  auto* bench = app.add_subcommand("benchmark", "run all models on moons and spirals");
  sequent::BenchmarkOptions bench_opts;
  bench->add_option("--out", bench_opts.out, "output directory");
  bench->add_option("--seeds", bench_opts.seeds, "seed list")->delimiter(',');
  bench->add_option("--samples", bench_opts.samples, "samples per dataset");
  bench->add_option("--qubits", bench_opts.qubits, "qubit count");
  bench->add_option("--depth", bench_opts.depth, "entangling layer count");
  bench->add_option("--jobs", bench_opts.jobs, "parallel workers (0 = auto)");

  try {
    app.parse(argc, argv);

    if (*gen) {
      if (gen_dataset != "moons" && gen_dataset != "spirals") {
        throw sequent::ConfigError("generate-data supports moons or spirals");
      }
      if (gen_noise < 0.0) {
        gen_noise = gen_dataset == "spirals" ? sequent::RunConfig::kSpiralsNoiseDefault
                                             : sequent::RunConfig::kMoonsNoiseDefault;
      }
      const sequent::Dataset ds =
          gen_dataset == "moons"
              ? sequent::make_moons(gen_samples, gen_noise, gen_seed)
              : sequent::make_spirals(gen_samples, gen_noise, gen_turns, gen_seed);
      sequent::save_features_csv(ds, gen_out);
      std::printf("wrote %zu samples (%s) to %s\n", ds.size(), ds.provenance.c_str(),
                  gen_out.c_str());
      return 0;
    }

    if (*train) {
      const sequent::RunConfig config = train_flags.merge(train_config_path);
      sequent::cmd_train(config);
      return 0;
    }

    if (*eval) {
      sequent::RunConfig config = eval_flags.merge(eval_config_path);
      config.resolve_defaults();
      config.validate();
      const sequent::Snapshot snap = sequent::load_snapshot(eval_snapshot);
      const std::uint64_t seed = config.seeds.front();
      const sequent::Dataset ds = sequent::build_dataset(config, seed);
      if (ds.dim != snap.input_dim()) {
        throw sequent::ConfigError("snapshot expects " + std::to_string(snap.input_dim()) +
                                   " features, dataset has " + std::to_string(ds.dim));
      }
      long correct = 0;
      std::vector<std::vector<long>> confusion(
          static_cast<std::size_t>(ds.classes),
          std::vector<long>(static_cast<std::size_t>(ds.classes), 0));
      for (std::size_t i = 0; i < ds.size(); ++i) {
        const int predicted = sequent::argmax_class(snap.forward(ds.row(i)));
        ++confusion[static_cast<std::size_t>(ds.labels[i])][static_cast<std::size_t>(predicted)];
        if (predicted == ds.labels[i]) ++correct;
      }
      std::printf("accuracy: %.4f over %zu samples (%s)\n",
                  static_cast<double>(correct) / static_cast<double>(ds.size()), ds.size(),
                  ds.provenance.c_str());
      std::printf("confusion (rows = true class):\n");
      for (const auto& row : confusion) {
        for (long v : row) std::printf(" %6ld", v);
        std::printf("\n");
      }
      return 0;
    }

    if (*grid) {
      sequent::GridBounds bounds{grid_bounds[0], grid_bounds[1], grid_bounds[2], grid_bounds[3]};
      sequent::cmd_grid(grid_snapshot, bounds, grid_resolution, grid_out);
      std::printf("wrote %d x %d grid to %s\n", grid_resolution, grid_resolution,
                  grid_out.c_str());
      return 0;
    }

    if (*verify_cmd) return run_verify(inject_cnot_fault);

    if (*bench) {
      sequent::cmd_benchmark(bench_opts);
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) return app.exit(e);
    app.exit(e);
    return 2;
  } catch (const sequent::TrainingError& e) {
    std::fprintf(stderr, "training error: %s\n", e.what());
    return 3;
  } catch (const sequent::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
