#ifndef HINV_EXPERIMENT_HPP
#define HINV_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hinv/annealing.hpp"
#include "hinv/forecast.hpp"
#include "hinv/observation.hpp"
#include "hinv/presets.hpp"

namespace hinv {

/// A preset plus run-level settings. Every constant is explicit after loading.
struct ExperimentConfig {
  ExperimentPreset preset;
  std::uint64_t seed = 1;
  double noise_sigma = 0.0;

  /// Keys: preset, seed, nodes, diffusion, gamma, dt, t_end, window, initial,
  /// domain, space, truth, schedule, stop, noise_sigma. Missing keys keep the
  /// preset values; "custom" starts from an empty preset and needs domain,
  /// space and truth. Relative truth paths resolve against base_dir.
  static ExperimentConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
  static ExperimentConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

/// Objects derived from a preset: grid, spaces, truth and initial density.
struct Scenario {
  std::shared_ptr<const Grid> grid;
  std::shared_ptr<const ConfigurationSpace> space;
  HabitatConfiguration truth;
  Field mu_true;
  Field initial;
  ObservationWindow window;
  std::vector<std::string> warnings;
};

/// Warns when the initial density is not positive on the positivity ball.
Scenario build_scenario(const ExperimentPreset& preset);

/// Solves the logistic problem for the truth and samples the measurements.
MeasurementSet simulate_measurements(const Scenario& scenario, const ExperimentPreset& preset,
                                     double noise_sigma = 0.0, std::uint64_t noise_seed = 0);

struct RunSummary {
  std::filesystem::path directory;
  std::uint64_t seed = 0;
  std::optional<HabitatConfiguration> estimate;
  AnnealingTrace trace;
  std::optional<double> mean_abs_error;
  Forecast forecast;
  double seconds = 0.0;
};

/// Full pipeline into out_dir (created if needed). Throws on stage failure;
/// files written before the failure stay in place and are listed in the manifest.
RunSummary run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir);

/// One chain per seed on its own thread, in out_dir/seed-<s>.
std::vector<RunSummary> run_experiment_seeds(const ExperimentConfig& config, const std::vector<std::uint64_t>& seeds,
                                             const std::filesystem::path& out_dir);

struct InvertOptions {
  CoolingSchedule schedule;
  StopRule stop;
  std::uint64_t seed = 1;
  std::optional<std::array<int, 2>> expected_nodes;
  std::optional<double> gamma;
};

/// Blind reconstruction: reads only the measurement file.
RunSummary invert_measurements(const std::filesystem::path& measurements, const ConfigurationSpace& space,
                               const InvertOptions& options, const std::filesystem::path& out_dir);

/// Space from a preset name or a JSON file with domain, omega1, cells, levels, m, M.
ConfigurationSpace load_space(const std::string& preset_or_path);
ConfigurationSpace space_from_json(const nlohmann::json& j);

/// $HINV_OUTPUT_ROOT (or ./runs) / <label>-<UTC timestamp>.
std::filesystem::path default_output_dir(const std::string& label);

/// Writes manifest.txt listing "<crc32> <bytes> <name>" for every other file in dir.
void write_manifest(const std::filesystem::path& dir);

}  // namespace hinv

#endif  // HINV_EXPERIMENT_HPP
