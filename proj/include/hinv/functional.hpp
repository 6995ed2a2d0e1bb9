#ifndef HINV_FUNCTIONAL_HPP
#define HINV_FUNCTIONAL_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include "hinv/configuration.hpp"
#include "hinv/forward_solver.hpp"
#include "hinv/observation.hpp"

namespace hinv {

/// Misfit between measured data and the linear-model prediction of a candidate.
struct GValue {
  double total = 0.0;           // term_dtu + term_laplacian + term_snapshot
  double term_dtu = 0.0;        // ||du/dt - dv/dt||^2 over (t0, t1) x omega
  double term_laplacian = 0.0;  // ||lap u(T') - lap v(T')||^2 over the domain
  double term_snapshot = 0.0;   // ||u(T') - v(T')||^2 over the domain
  std::uint64_t candidate_id = 0;
  double wall_seconds = 0.0;
};

/// FNV-1a hash of a configuration's levels.
std::uint64_t configuration_id(const HabitatConfiguration& config);

/// Evaluates G for candidates against one measurement set.
///
/// The candidate density v solves the linear problem (gamma = 0) with the
/// measured initial density, on the measurement grid and time step, and is
/// sampled at exactly the measurement sample times. Diffusion factorization
/// and node-to-cell map are built once.
class GEvaluator {
 public:
  GEvaluator(std::shared_ptr<const MeasurementSet> measurements, std::shared_ptr<const ConfigurationSpace> space,
             DiffusionBackend backend = DiffusionBackend::Automatic);

  /// Throws GridMismatch unless the measurements live on `expected`.
  void require_grid(const Grid& expected) const;

  GValue evaluate(const HabitatConfiguration& candidate) const;
  /// G for an arbitrary growth-rate field on the measurement grid.
  GValue evaluate_field(const Field& mu) const;

  const MeasurementSet& measurements() const { return *ms_; }
  const ConfigurationSpace& space() const { return *space_; }
  const std::shared_ptr<const Grid>& grid_ptr() const { return ms_->grid; }
  const std::vector<int>& node_cells() const { return node_cells_; }

 private:
  GValue evaluate_interior(const Eigen::VectorXd& mu_interior) const;

  std::shared_ptr<const MeasurementSet> ms_;
  std::shared_ptr<const ConfigurationSpace> space_;
  ParabolicSolver solver_;
  std::vector<int> node_cells_;
  Eigen::VectorXd u0_interior_;
  double u0_max_ = 0.0;
  std::int64_t first_sample_step_ = 0;
  std::int64_t last_step_ = 0;
  std::vector<Index> omega_interior_;  // position of each omega node in interior vectors, -1 on the boundary
  Eigen::VectorXd omega_weights_;
  Eigen::VectorXd time_weights_;
};

GValue evaluate_G(const MeasurementSet& ms, const HabitatConfiguration& candidate);

}  // namespace hinv

#endif  // HINV_FUNCTIONAL_HPP
