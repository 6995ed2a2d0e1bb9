#ifndef HINV_FORWARD_SOLVER_HPP
#define HINV_FORWARD_SOLVER_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "hinv/diffusion.hpp"
#include "hinv/field.hpp"

namespace hinv {

/// Parameters of du/dt = D lap u + u (mu - gamma u), u = 0 on the boundary.
struct SolverParams {
  double diffusion = 1.0;
  double gamma = 0.0;
  double dt = 5e-4;
  double t_end = 0.5;
  std::vector<double> record_times;

  void validate() const;
  std::int64_t total_steps() const;
  /// Step index of every record time.
  std::vector<std::int64_t> record_steps() const;
};

/// Step index of t, or InvalidArgument if t is not a multiple of dt.
std::int64_t step_index(double t, double dt);

enum class InitialProfile { Standard1D, Standard2D, Custom };

/// Closed-form profiles used by the experiments, before amplitude scaling:
///   1D: 0.1 (1 - x/100) sin^2(pi x / 25)
///   2D: 0.1 x y / 400 sin^2(x/4) sin^2(y/4)
double standard_profile_1d(double x);
double standard_profile_2d(double x, double y);

struct InitialDensity {
  InitialProfile profile = InitialProfile::Standard1D;
  double amplitude = 1.0;
  std::optional<Field> custom;

  /// Profile on the grid, scaled by amplitude, boundary values set to zero.
  Field evaluate(std::shared_ptr<const Grid> grid) const;
};

/// Recorded states u(t, .) at params.record_times.
struct Trajectory {
  SolverParams params;
  Field mu;
  Field initial;
  std::vector<double> times;
  std::vector<Field> states;

  /// State at a record time (matched to within 1e-12 relative).
  const Field& at(double t) const;
};

/// Implicit-explicit Crank-Nicolson integrator on a fixed grid and step.
///
/// Diffusion is trapezoidal, the reaction u (mu - gamma u) is extrapolated
/// with Adams-Bashforth 2 (Heun on the first step). The diffusion matrix is
/// factorized once at construction and shared by every solve.
class ParabolicSolver {
 public:
  /// Called with (step, interior state) for step = 0..steps; return false to stop early.
  using Observer = std::function<bool(std::int64_t, const Eigen::VectorXd&)>;

  ParabolicSolver(std::shared_ptr<const Grid> grid, double diffusion, double dt,
                  DiffusionBackend backend = DiffusionBackend::Automatic);

  const Grid& grid() const { return *grid_; }
  const std::shared_ptr<const Grid>& grid_ptr() const { return grid_; }
  double diffusion() const { return diffusion_; }
  double dt() const { return dt_; }

  /// Marches interior vectors. Throws SolverError when |u| exceeds blowup_bound
  /// or turns non-finite.
  void march(const Eigen::VectorXd& mu, const Eigen::VectorXd& u0, double gamma, std::int64_t steps,
             double blowup_bound, const Observer& observer) const;

  Trajectory solve(const Field& mu, const Field& u0, const SolverParams& params) const;

 private:
  std::shared_ptr<const Grid> grid_;
  double diffusion_;
  double dt_;
  std::unique_ptr<const DiffusionSolver> implicit_;
};

Trajectory solve_parabolic(const Field& mu, const Field& u0, const SolverParams& params);

/// Divergence threshold 10 * max(u0) * exp(max(mu, 0) * t_end).
double blowup_threshold(double u0_max, double mu_max, double t_end);

struct SteadyStateOptions {
  double dt = 1e-2;
  double tolerance = 1e-8;      // relative change per unit time
  double max_time = 2e4;
  double extinction_tol = 1e-6;  // lambda1 >= -tol counts as extinction
};

/// Nonnegative steady state of -D lap p = p (mu - gamma p), by time marching
/// from a positive supersolution. Zero field when lambda1[mu] >= -extinction_tol.
Field solve_steady_state(const Field& mu, double gamma, double diffusion, const SteadyStateOptions& options = {});

/// ||D lap p + p (mu - gamma p)||_2 / ||p||_2 over interior nodes.
double steady_state_residual(const Field& p, const Field& mu, double gamma, double diffusion);

struct EigenOptions {
  double tolerance = 1e-10;  // on successive Rayleigh quotients
  int max_iterations = 200000;
};

struct EigenPair {
  double value = 0.0;
  Field vector;  // unit l2 norm over interior nodes, positive
  double residual = 0.0;
  int iterations = 0;
};

/// Principal eigenpair of psi -> -D lap psi - mu psi with Dirichlet conditions,
/// by inverse power iteration on a positive definite shift.
EigenPair principal_eigenpair(const Field& mu, double diffusion, const EigenOptions& options = {});
double principal_eigenvalue(const Field& mu, double diffusion, const EigenOptions& options = {});

/// Text manifest line followed by one binary block per record time.
void save_trajectory(const std::filesystem::path& path, const Trajectory& trajectory);

}  // namespace hinv

#endif  // HINV_FORWARD_SOLVER_HPP
