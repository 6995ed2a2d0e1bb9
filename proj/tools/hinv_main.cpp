#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hinv/error.hpp"
#include "hinv/experiment.hpp"

namespace fs = std::filesystem;

namespace {

struct Overrides {
  std::optional<std::int64_t> quiescence;
  std::optional<std::int64_t> max_iters;
  std::optional<double> theta0;
  std::optional<double> alpha;

  void add_to(CLI::App* app) {
    app->add_option("--quiescence", quiescence, "stop after N iterations without a change");
    app->add_option("--max-iters", max_iters, "iteration cap");
    app->add_option("--theta0", theta0, "initial temperature");
    app->add_option("--alpha", alpha, "cooling factor in [0, 1); 0 runs a greedy chain");
  }

  void apply(hinv::CoolingSchedule& schedule, hinv::StopRule& stop) const {
    if (quiescence) stop.quiescence = *quiescence;
    if (max_iters) stop.max_iterations = *max_iters;
    if (theta0) schedule.theta0 = *theta0;
    if (alpha) schedule.alpha = *alpha;
    schedule.validate();
    stop.validate();
  }
};

void print_summary(const hinv::RunSummary& r) {
  std::cout << r.directory.string() << ": seed " << r.seed << ", " << r.trace.iterations << " iterations"
            << (r.trace.quiescent ? " (quiescent)" : " (iteration cap)") << ", G " << r.trace.final_g;
  if (r.mean_abs_error) std::cout << ", mean_abs_error " << *r.mean_abs_error;
  std::cout << ", lambda1 " << r.forecast.lambda1 << " (" << hinv::to_string(r.forecast.verdict) << ")\n";
  for (const auto& w : r.trace.warnings) std::cerr << "warning: " << w << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Growth-rate reconstruction for logistic reaction-diffusion invasions"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "simulate a configured experiment, invert it and forecast");
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::vector<std::uint64_t> seeds;
  Overrides run_overrides;
  run->add_option("--config", config_path, "experiment config (JSON)")->required();
  run->add_option("--seed", seed, "annealing seed");
  run->add_option("--out", out_dir, "output directory (default: $HINV_OUTPUT_ROOT/<preset>-<timestamp>)");
  run->add_option("--seeds", seeds, "run one chain per seed concurrently")->delimiter(',');
  run_overrides.add_to(run);

  auto* inv = app.add_subcommand("invert", "reconstruct from a measurement file alone");
  std::string meas_path;
  std::string space_arg;
  std::uint64_t inv_seed = 1;
  std::string inv_out;
  std::vector<int> nodes;
  std::optional<double> gamma;
  Overrides inv_overrides;
  inv->add_option("--measurements", meas_path, "measurement file")->required();
  inv->add_option("--space", space_arg, "preset name or space file (JSON)")->required();
  inv->add_option("--seed", inv_seed, "annealing seed");
  inv->add_option("--out", inv_out, "output directory");
  inv->add_option("--nodes", nodes, "expected nodes per axis; refuses files on another grid")->delimiter(',');
  inv->add_option("--gamma", gamma, "saturation coefficient for the steady-state forecast");
  inv_overrides.add_to(inv);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      hinv::ExperimentConfig config = hinv::ExperimentConfig::load(config_path);
      if (seed) config.seed = *seed;
      run_overrides.apply(config.preset.schedule, config.preset.stop);
      const fs::path dir = out_dir.empty() ? hinv::default_output_dir(config.preset.name) : fs::path(out_dir);
      if (!seeds.empty()) {
        for (const auto& r : hinv::run_experiment_seeds(config, seeds, dir)) print_summary(r);
      } else {
        print_summary(hinv::run_experiment(config, dir));
      }
    } else if (*inv) {
      hinv::InvertOptions options;
      options.seed = inv_seed;
      options.gamma = gamma;
      if (!nodes.empty()) {
        if (nodes.size() > 2) throw hinv::InvalidArgument("--nodes takes one or two counts");
        options.expected_nodes = std::array<int, 2>{nodes[0], nodes.size() == 2 ? nodes[1] : 1};
      }
      inv_overrides.apply(options.schedule, options.stop);
      const hinv::ConfigurationSpace space = hinv::load_space(space_arg);
      const fs::path dir = inv_out.empty() ? hinv::default_output_dir("invert") : fs::path(inv_out);
      print_summary(hinv::invert_measurements(meas_path, space, options, dir));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
