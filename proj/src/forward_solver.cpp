#include "hinv/forward_solver.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <Eigen/SparseCholesky>
#include <json.hpp>

#include "hinv/binary_io.hpp"
#include "hinv/error.hpp"

namespace hinv {

std::int64_t step_index(double t, double dt) {
  const double k = std::round(t / dt);
  if (std::abs(k * dt - t) > 1e-12 * std::max(std::abs(t), dt)) {
    throw InvalidArgument("time " + std::to_string(t) + " is not a multiple of dt");
  }
  return static_cast<std::int64_t>(k);
}

void SolverParams::validate() const {
  if (!(diffusion > 0.0)) throw InvalidArgument("diffusion coefficient must be positive");
  if (!(gamma >= 0.0)) throw InvalidArgument("gamma must be nonnegative");
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
  if (!(t_end >= 0.0)) throw InvalidArgument("t_end must be nonnegative");
  step_index(t_end, dt);
  for (std::size_t k = 0; k < record_times.size(); ++k) {
    const double t = record_times[k];
    if (t < 0.0 || t > t_end * (1 + 1e-12)) throw InvalidArgument("record time outside [0, t_end]");
    if (k > 0 && !(t > record_times[k - 1])) throw InvalidArgument("record times must increase strictly");
    step_index(t, dt);
  }
}

std::int64_t SolverParams::total_steps() const { return step_index(t_end, dt); }

std::vector<std::int64_t> SolverParams::record_steps() const {
  std::vector<std::int64_t> out;
  out.reserve(record_times.size());
  for (double t : record_times) out.push_back(step_index(t, dt));
  return out;
}

double standard_profile_1d(double x) {
  const double s = std::sin(std::numbers::pi * x / 25.0);
  return 0.1 * (1.0 - x / 100.0) * s * s;
}

double standard_profile_2d(double x, double y) {
  const double sx = std::sin(x / 4.0);
  const double sy = std::sin(y / 4.0);
  return 0.1 * x * y / 400.0 * sx * sx * sy * sy;
}

Field InitialDensity::evaluate(std::shared_ptr<const Grid> grid) const {
  if (!(amplitude >= 0.0)) throw InvalidArgument("initial density amplitude must be nonnegative");
  Eigen::VectorXd v(grid->node_count());
  switch (profile) {
    case InitialProfile::Standard1D:
      if (grid->dimension() != 1) throw InvalidArgument("1D profile on a 2D grid");
      for (Index n = 0; n < grid->node_count(); ++n) v[n] = standard_profile_1d(grid->coordinate(n, 0));
      break;
    case InitialProfile::Standard2D:
      if (grid->dimension() != 2) throw InvalidArgument("2D profile on a 1D grid");
      for (Index n = 0; n < grid->node_count(); ++n)
        v[n] = standard_profile_2d(grid->coordinate(n, 0), grid->coordinate(n, 1));
      break;
    case InitialProfile::Custom:
      if (!custom) throw InvalidArgument("custom initial density requires a field");
      require_same_grid(custom->grid(), *grid);
      v = custom->values();
      break;
  }
  v *= amplitude;
  for (Index n : grid->boundary()) v[n] = 0.0;
  if ((v.array() < 0.0).any()) throw InvalidArgument("initial density must be nonnegative");
  return Field(std::move(grid), std::move(v));
}

const Field& Trajectory::at(double t) const {
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (std::abs(times[k] - t) <= 1e-12 * std::max(1.0, std::abs(t))) return states[k];
  }
  throw InvalidArgument("time " + std::to_string(t) + " is not a record time of the trajectory");
}

double blowup_threshold(double u0_max, double mu_max, double t_end) {
  return 10.0 * u0_max * std::exp(std::max(mu_max, 0.0) * t_end);
}

ParabolicSolver::ParabolicSolver(std::shared_ptr<const Grid> grid, double diffusion, double dt,
                                 DiffusionBackend backend)
    : grid_(std::move(grid)), diffusion_(diffusion), dt_(dt) {
  if (!(diffusion > 0.0) || !(dt > 0.0)) throw InvalidArgument("diffusion and dt must be positive");
  implicit_ = make_diffusion_solver(*grid_, 0.5 * dt * diffusion, backend);
}

void ParabolicSolver::march(const Eigen::VectorXd& mu, const Eigen::VectorXd& u0, double gamma,
                            std::int64_t steps, double blowup_bound, const Observer& observer) const {
  const Index n = static_cast<Index>(grid_->interior().size());
  if (mu.size() != n || u0.size() != n) throw GridMismatch("interior vector size differs from the grid");
  const double c = 0.5 * dt_ * diffusion_;

  auto reaction = [&](const Eigen::VectorXd& u, Eigen::VectorXd& f) {
    f = u.array() * (mu.array() - gamma * u.array());
  };

  Eigen::VectorXd u = u0;
  Eigen::VectorXd lap(n), rhs(n), f_now(n), f_prev(n), next(n);
  if (!observer(0, u)) return;

  for (std::int64_t s = 1; s <= steps; ++s) {
    apply_interior_laplacian(*grid_, u, lap);
    reaction(u, f_now);
    if (s == 1) {
      rhs = u + c * lap + dt_ * f_now;
      implicit_->solve(rhs, next);
      reaction(next, f_prev);  // reaction at the predictor
      rhs = u + c * lap + 0.5 * dt_ * (f_now + f_prev);
    } else {
      rhs = u + c * lap + dt_ * (1.5 * f_now - 0.5 * f_prev);
    }
    implicit_->solve(rhs, next);
    f_prev.swap(f_now);
    u.swap(next);

    const double peak = u.cwiseAbs().maxCoeff();
    if (!std::isfinite(peak) || peak > blowup_bound) {
      throw SolverError("time stepping diverged at t = " + std::to_string(s * dt_) + " (|u| = " +
                        std::to_string(peak) + "); reduce dt");
    }
    if (!observer(s, u)) return;
  }
}

Trajectory ParabolicSolver::solve(const Field& mu, const Field& u0, const SolverParams& params) const {
  params.validate();
  require_same_grid(mu.grid(), *grid_);
  require_same_grid(u0.grid(), *grid_);
  if (std::abs(params.dt - dt_) > 1e-15 * dt_ || std::abs(params.diffusion - diffusion_) > 1e-15 * diffusion_)
    throw InvalidArgument("solver parameters differ from the cached factorization");
  if (!mu.all_finite()) throw InvalidArgument("growth rate must be finite");
  if ((u0.values().array() < 0.0).any()) throw InvalidArgument("initial density must be nonnegative");
  for (Index b : grid_->boundary()) {
    if (u0[b] != 0.0) throw InvalidArgument("initial density must vanish on the boundary");
  }

  const auto steps = params.record_steps();
  Trajectory traj{params, mu, u0, {}, {}};
  traj.times.reserve(steps.size());
  traj.states.reserve(steps.size());

  const Eigen::VectorXd mu_in = gather_interior(*grid_, mu.values());
  const Eigen::VectorXd u_in = gather_interior(*grid_, u0.values());
  const double bound = blowup_threshold(u0.values().maxCoeff(), mu_in.size() ? mu_in.maxCoeff() : 0.0, params.t_end);

  std::size_t next = 0;
  const std::int64_t last = steps.empty() ? 0 : steps.back();
  march(mu_in, u_in, params.gamma, last, bound, [&](std::int64_t s, const Eigen::VectorXd& u) {
    while (next < steps.size() && steps[next] == s) {
      Eigen::VectorXd full;
      scatter_interior(*grid_, u, full);
      traj.times.push_back(params.record_times[next]);
      traj.states.emplace_back(grid_, std::move(full));
      ++next;
    }
    return true;
  });
  return traj;
}

Trajectory solve_parabolic(const Field& mu, const Field& u0, const SolverParams& params) {
  params.validate();
  ParabolicSolver solver(mu.grid_ptr(), params.diffusion, params.dt);
  return solver.solve(mu, u0, params);
}

double steady_state_residual(const Field& p, const Field& mu, double gamma, double diffusion) {
  require_same_grid(p.grid(), mu.grid());
  const Grid& g = p.grid();
  const Eigen::VectorXd pi = gather_interior(g, p.values());
  const Eigen::VectorXd mi = gather_interior(g, mu.values());
  Eigen::VectorXd lap;
  apply_interior_laplacian(g, pi, lap);
  const Eigen::VectorXd r = diffusion * lap + (pi.array() * (mi.array() - gamma * pi.array())).matrix();
  const double norm = pi.norm();
  return norm > 0.0 ? r.norm() / norm : r.norm();
}

Field solve_steady_state(const Field& mu, double gamma, double diffusion, const SteadyStateOptions& options) {
  if (!(gamma > 0.0)) throw InvalidArgument("steady state requires gamma > 0");
  if (!(diffusion > 0.0)) throw InvalidArgument("diffusion coefficient must be positive");
  const auto& grid = mu.grid_ptr();

  const double lambda1 = principal_eigenvalue(mu, diffusion);
  if (lambda1 >= -options.extinction_tol) return Field::zeros(grid);

  const Eigen::VectorXd mu_in = gather_interior(*grid, mu.values());
  const double mu_max = mu_in.maxCoeff();
  const double mu_abs = mu_in.cwiseAbs().maxCoeff();
  // The constant mu_max / gamma is a supersolution; AB2 needs dt |f'| well below 1.
  const double dt = std::min(options.dt, 0.2 / (mu_abs + 2.0 * mu_max));
  ParabolicSolver solver(grid, diffusion, dt);

  const Eigen::VectorXd start = Eigen::VectorXd::Constant(mu_in.size(), mu_max / gamma);
  const auto max_steps = static_cast<std::int64_t>(std::ceil(options.max_time / dt));
  Eigen::VectorXd previous = start;
  Eigen::VectorXd result;
  double change = std::numeric_limits<double>::infinity();
  bool converged = false;
  solver.march(mu_in, start, gamma, max_steps, 10.0 * mu_max / gamma + 1.0,
               [&](std::int64_t s, const Eigen::VectorXd& u) {
                 if (s == 0) return true;
                 const double scale = u.cwiseAbs().maxCoeff();
                 change = (u - previous).cwiseAbs().maxCoeff() / (dt * std::max(scale, 1e-300));
                 previous = u;
                 if (change < options.tolerance) {
                   converged = true;
                   result = u;
                   return false;
                 }
                 return true;
               });
  if (!converged) {
    throw SolverError("steady state did not converge by t = " + std::to_string(options.max_time) +
                      " (relative change per unit time " + std::to_string(change) + ")");
  }
  Eigen::VectorXd full;
  scatter_interior(*grid, result.cwiseMax(0.0), full);
  return Field(grid, std::move(full));
}

EigenPair principal_eigenpair(const Field& mu, double diffusion, const EigenOptions& options) {
  if (!(diffusion > 0.0)) throw InvalidArgument("diffusion coefficient must be positive");
  if (!mu.all_finite()) throw InvalidArgument("growth rate must be finite");
  const auto& grid = mu.grid_ptr();
  const Eigen::VectorXd mu_in = gather_interior(*grid, mu.values());
  const Index n = mu_in.size();

  // L = -D lap - diag(mu). Since -D lap >= D lambda_ground, L + shift I with
  // shift = max(mu) - 0.9 D lambda_ground is positive definite.
  Eigen::SparseMatrix<double> op = -diffusion * interior_laplacian(*grid);
  for (Index k = 0; k < n; ++k) op.coeffRef(k, k) -= mu_in[k];
  const double shift = mu_in.maxCoeff() - 0.9 * diffusion * dirichlet_ground_eigenvalue(*grid);
  Eigen::SparseMatrix<double> shifted = op;
  for (Index k = 0; k < n; ++k) shifted.coeffRef(k, k) += shift;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(shifted);
  if (ldlt.info() != Eigen::Success) throw SolverError("shifted eigen operator is not positive definite");

  // Start from the discrete Dirichlet ground mode, positive in the interior.
  Eigen::VectorXd x(n);
  {
    Eigen::VectorXd node(grid->node_count());
    for (Index k = 0; k < grid->node_count(); ++k) {
      double v = 1.0;
      for (int a = 0; a < grid->dimension(); ++a) {
        const auto ij = grid->multi_index(k);
        v *= std::sin(std::numbers::pi * ij[a] / (grid->nodes(a) - 1));
      }
      node[k] = v;
    }
    x = gather_interior(*grid, node);
  }
  x.normalize();

  double theta = x.dot(op * x);
  int it = 0;
  bool converged = false;
  while (it < options.max_iterations) {
    ++it;
    x = ldlt.solve(x);
    x.normalize();
    const double next = x.dot(op * x);
    const double diff = std::abs(next - theta);
    theta = next;
    if (diff < options.tolerance * std::max(1.0, std::abs(theta))) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw SolverError("principal eigenvalue iteration did not converge in " + std::to_string(options.max_iterations) +
                      " iterations");
  }
  if (x.sum() < 0.0) x = -x;
  if (x.minCoeff() < -1e-10 * x.maxCoeff()) throw SolverError("principal eigenvector is not positive");

  const double residual = (op * x - theta * x).norm();
  Eigen::VectorXd full;
  scatter_interior(*grid, x, full);
  return EigenPair{theta, Field(grid, std::move(full)), residual, it};
}

double principal_eigenvalue(const Field& mu, double diffusion, const EigenOptions& options) {
  return principal_eigenpair(mu, diffusion, options).value;
}

void save_trajectory(const std::filesystem::path& path, const Trajectory& trajectory) {
  nlohmann::json manifest = {
      {"format", "hinv-trajectory"},
      {"version", 1},
      {"diffusion", trajectory.params.diffusion},
      {"gamma", trajectory.params.gamma},
      {"dt", trajectory.params.dt},
      {"t_end", trajectory.params.t_end},
      {"times", trajectory.times},
  };
  const std::string header = manifest.dump() + "\n";

  io::ByteWriter out;
  out.put_bytes(std::as_bytes(std::span<const char>(header.data(), header.size())));
  io::put_grid(out, trajectory.mu.grid());
  for (const auto& state : trajectory.states) {
    out.put_block(io::fourcc("STAT"), std::span<const double>(state.values().data(), state.size()));
  }
  out.write_file(path);
}

}  // namespace hinv
