#ifndef HINV_PRESETS_HPP
#define HINV_PRESETS_HPP

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "hinv/annealing.hpp"
#include "hinv/configuration.hpp"
#include "hinv/forward_solver.hpp"
#include "hinv/geometry.hpp"

namespace hinv {

/// Complete description of one reconstruction experiment.
///
/// Shared constants: D = 1, gamma = 0.1, t in (0, 0.5), window (0.1, 0.4),
/// schedule theta(n) = 100 * 0.99^n, stop after 500 unchanged iterations,
/// M = 2, m = -1.
///   1D: domain (0, 100), omega1 [10, 90] in 80 unit cells, omega = [55, 58].
///   2D: domain (0, 20)^2, omega1 [2, 18]^2 in 16 x 16 unit cells,
///       omega = closed ball of centre (7, 7) and radius 3.
/// Binary spaces take the values {m, M}; 21-level spaces m + j (M - m) / 20.
struct ExperimentPreset {
  std::string name;
  DomainSpec domain;
  ConfigurationSpace space;
  std::array<int, 2> nodes{201, 1};
  double diffusion = 1.0;
  double gamma = 0.1;
  double dt = 5e-4;
  double t_end = 0.5;
  double t0 = 0.1;
  double t1 = 0.4;
  int sample_stride = 10;
  InitialProfile profile = InitialProfile::Standard1D;
  double amplitude = 1.0;
  CoolingSchedule schedule;
  StopRule stop;
  std::vector<std::uint8_t> truth;
};

/// "example1" .. "example4", and "mini1d" (4 binary cells, for tests).
ExperimentPreset make_preset(const std::string& name);
std::vector<std::string> preset_names();

ConfigurationSpace example_space_1d(int levels);
ConfigurationSpace example_space_2d(int levels);

/// The 16 cells of the 2D lattice restricted to a 4 x 4 block, others frozen at m.
/// Used as the reduced variant of the 2D examples.
ConfigurationSpace reduced_space_2d(int levels);

}  // namespace hinv

#endif  // HINV_PRESETS_HPP
