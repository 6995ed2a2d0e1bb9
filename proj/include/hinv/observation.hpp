#ifndef HINV_OBSERVATION_HPP
#define HINV_OBSERVATION_HPP

#include <filesystem>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "hinv/forward_solver.hpp"
#include "hinv/geometry.hpp"

namespace hinv {

/// Time window (t0, t1) and observation mask. Densities inside the window are
/// sampled every `sample_stride` time steps; the snapshot time (t0 + t1) / 2
/// must fall on a sample.
struct ObservationWindow {
  double t0 = 0.1;
  double t1 = 0.4;
  int sample_stride = 10;
  NodeMask omega;

  double t_prime() const { return 0.5 * (t0 + t1); }
  void validate(double dt) const;
  std::vector<double> sample_times(double dt) const;
};

/// Everything the inversion sees. Holds neither the growth rate nor gamma.
struct MeasurementSet {
  std::shared_ptr<const Grid> grid;
  double diffusion = 1.0;
  double dt = 5e-4;
  double t0 = 0.1;
  double t1 = 0.4;
  int sample_stride = 10;
  std::vector<Index> omega;            // observed node indices, sorted
  Eigen::VectorXd initial_density;     // u_i on every node
  Eigen::MatrixXd dtu_record;          // du/dt, one row per sample, one column per omega node
  Eigen::VectorXd snapshot;            // u(T', .)
  Eigen::VectorXd snapshot_laplacian;  // lap u(T', .)

  double sample_spacing() const { return sample_stride * dt; }
  int sample_count() const { return static_cast<int>(dtu_record.rows()); }
  int t_prime_sample() const { return (sample_count() - 1) / 2; }
  std::vector<double> sample_times() const;
  ObservationWindow window() const;

  friend bool operator==(const MeasurementSet& a, const MeasurementSet& b);
};

/// Second-order finite differences in time of equally spaced samples (rows):
/// centred inside, one-sided three-point at both ends.
Eigen::MatrixXd time_derivative(const Eigen::MatrixXd& samples, double spacing);

MeasurementSet extract_measurements(const Trajectory& trajectory, const ObservationWindow& window);

/// Solver parameters that produce a trajectory compatible with `window`.
SolverParams measurement_solver_params(double diffusion, double gamma, double dt, double t_end,
                                       const ObservationWindow& window);

/// Additive Gaussian noise on the recorded data. Off unless called.
void add_measurement_noise(MeasurementSet& ms, double sigma, std::uint64_t seed);

void save_measurements(const MeasurementSet& ms, const std::filesystem::path& path);
MeasurementSet load_measurements(const std::filesystem::path& path);

}  // namespace hinv

#endif  // HINV_OBSERVATION_HPP
