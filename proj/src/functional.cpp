#include "hinv/functional.hpp"

#include <chrono>

#include "hinv/error.hpp"

namespace hinv {

std::uint64_t configuration_id(const HabitatConfiguration& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (auto l : config.levels()) {
    h ^= l;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {
std::shared_ptr<const MeasurementSet> checked(std::shared_ptr<const MeasurementSet> ms) {
  if (!ms || !ms->grid) throw InvalidArgument("evaluator requires a measurement set");
  return ms;
}
}  // namespace

GEvaluator::GEvaluator(std::shared_ptr<const MeasurementSet> measurements,
                       std::shared_ptr<const ConfigurationSpace> space, DiffusionBackend backend)
    : ms_(checked(std::move(measurements))),
      space_(std::move(space)),
      solver_(ms_->grid, ms_->diffusion, ms_->dt, backend) {
  const Grid& g = *ms_->grid;
  if (!space_) throw InvalidArgument("evaluator requires a configuration space");
  space_->validate();
  node_cells_ = hinv::node_cells(*space_, g);

  u0_interior_ = gather_interior(g, ms_->initial_density);
  u0_max_ = ms_->initial_density.maxCoeff();
  first_sample_step_ = step_index(ms_->t0, ms_->dt);
  last_step_ = first_sample_step_ + static_cast<std::int64_t>(ms_->sample_count() - 1) * ms_->sample_stride;

  std::vector<Index> interior_pos(g.node_count(), -1);
  for (std::size_t k = 0; k < g.interior().size(); ++k) interior_pos[g.interior()[k]] = static_cast<Index>(k);
  omega_interior_.reserve(ms_->omega.size());
  omega_weights_.resize(static_cast<Index>(ms_->omega.size()));
  for (std::size_t j = 0; j < ms_->omega.size(); ++j) {
    omega_interior_.push_back(interior_pos[ms_->omega[j]]);
    omega_weights_[static_cast<Index>(j)] = g.quadrature_weights()[ms_->omega[j]];
  }

  const int k = ms_->sample_count();
  time_weights_ = Eigen::VectorXd::Constant(k, ms_->sample_spacing());
  time_weights_[0] *= 0.5;
  time_weights_[k - 1] *= 0.5;
}

void GEvaluator::require_grid(const Grid& expected) const {
  if (!ms_->grid->same_layout(expected)) {
    throw GridMismatch("measurements were recorded on a grid with " + std::to_string(ms_->grid->nodes(0)) +
                       " nodes per axis (spacing " + std::to_string(ms_->grid->spacing(0)) +
                       "), expected " + std::to_string(expected.nodes(0)) + " (spacing " +
                       std::to_string(expected.spacing(0)) + ")");
  }
}

GValue GEvaluator::evaluate(const HabitatConfiguration& candidate) const {
  if (!candidate.space().same_partition(*space_)) throw GridMismatch("candidate uses a different cell partition");
  const Grid& g = *ms_->grid;
  Eigen::VectorXd mu(static_cast<Index>(g.interior().size()));
  const double m = space_->bounds.m;
  for (std::size_t k = 0; k < g.interior().size(); ++k) {
    const int c = node_cells_[g.interior()[k]];
    mu[static_cast<Index>(k)] = c < 0 ? m : candidate.value(c);
  }
  GValue v = evaluate_interior(mu);
  v.candidate_id = configuration_id(candidate);
  return v;
}

GValue GEvaluator::evaluate_field(const Field& mu) const {
  require_same_grid(mu.grid(), *ms_->grid);
  return evaluate_interior(gather_interior(*ms_->grid, mu.values()));
}

GValue GEvaluator::evaluate_interior(const Eigen::VectorXd& mu) const {
  const auto start = std::chrono::steady_clock::now();
  const Grid& g = *ms_->grid;
  const int samples = ms_->sample_count();
  const int t_prime = ms_->t_prime_sample();
  const Index n_omega = static_cast<Index>(omega_interior_.size());

  Eigen::MatrixXd v_omega(samples, n_omega);
  Eigen::VectorXd v_snapshot;
  const double bound = blowup_threshold(u0_max_, mu.size() ? mu.maxCoeff() : 0.0, last_step_ * ms_->dt);

  solver_.march(mu, u0_interior_, 0.0, last_step_, bound, [&](std::int64_t s, const Eigen::VectorXd& u) {
    const std::int64_t offset = s - first_sample_step_;
    if (offset < 0 || offset % ms_->sample_stride != 0) return true;
    const auto k = static_cast<int>(offset / ms_->sample_stride);
    for (Index j = 0; j < n_omega; ++j) {
      const Index p = omega_interior_[static_cast<std::size_t>(j)];
      v_omega(k, j) = p < 0 ? 0.0 : u[p];
    }
    if (k == t_prime) scatter_interior(g, u, v_snapshot);
    return true;
  });

  const Eigen::MatrixXd dv = time_derivative(v_omega, ms_->sample_spacing());
  const Eigen::MatrixXd diff = ms_->dtu_record - dv;
  GValue out;
  out.term_dtu = time_weights_.dot(diff.array().square().matrix() * omega_weights_);

  Eigen::VectorXd v_lap(g.node_count());
  apply_laplacian(g, v_snapshot, v_lap);
  const auto& w = g.quadrature_weights();
  out.term_laplacian = w.dot((ms_->snapshot_laplacian - v_lap).array().square().matrix());
  out.term_snapshot = w.dot((ms_->snapshot - v_snapshot).array().square().matrix());
  out.total = out.term_dtu + out.term_laplacian + out.term_snapshot;
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

GValue evaluate_G(const MeasurementSet& ms, const HabitatConfiguration& candidate) {
  GEvaluator evaluator(std::make_shared<const MeasurementSet>(ms), candidate.space_ptr());
  return evaluator.evaluate(candidate);
}

}  // namespace hinv
