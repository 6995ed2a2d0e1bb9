#include "hinv/configuration.hpp"

#include <cmath>
#include <string>

namespace hinv {

double ConfigurationSpace::cell_measure() const {
  return dimension() == 1 ? cell_width(0) : cell_width(0) * cell_width(1);
}

Box ConfigurationSpace::cell_box(int cell) const {
  Box b;
  b.dim = dimension();
  const int ci = cell % cells[0];
  const int cj = cell / cells[0];
  const std::array<int, 2> c{ci, cj};
  for (int a = 0; a < b.dim; ++a) {
    b.lower[a] = omega1.lower[a] + c[a] * cell_width(a);
    b.upper[a] = omega1.lower[a] + (c[a] + 1) * cell_width(a);
  }
  return b;
}

double ConfigurationSpace::log2_cardinality() const {
  return cell_count() * std::log2(static_cast<double>(levels));
}

void ConfigurationSpace::validate() const {
  bounds.validate();
  if (domain.dim != 1 && domain.dim != 2) throw InvalidArgument("space dimension must be 1 or 2");
  if (omega1.dim != domain.dim) throw InvalidArgument("omega1 dimension differs from the domain");
  if (!domain.contains(omega1)) throw InvalidArgument("omega1 must lie inside the domain");
  for (int a = 0; a < dimension(); ++a) {
    if (cells[a] < 1) throw InvalidArgument("a space needs at least one cell per axis");
  }
  if (levels < 1 || levels > 256) throw InvalidArgument("level count must lie in [1, 256]");
}

bool ConfigurationSpace::same_partition(const ConfigurationSpace& other) const {
  if (dimension() != other.dimension() || cell_count() != other.cell_count()) return false;
  for (int a = 0; a < dimension(); ++a) {
    if (cells[a] != other.cells[a] || omega1.lower[a] != other.omega1.lower[a] ||
        omega1.upper[a] != other.omega1.upper[a] || domain.lower[a] != other.domain.lower[a] ||
        domain.upper[a] != other.domain.upper[a])
      return false;
  }
  return bounds.m == other.bounds.m;
}

HabitatConfiguration::HabitatConfiguration(std::shared_ptr<const ConfigurationSpace> space,
                                           std::vector<std::uint8_t> levels)
    : space_(std::move(space)), levels_(std::move(levels)) {
  if (!space_) throw InvalidArgument("configuration requires a space");
  if (static_cast<int>(levels_.size()) != space_->cell_count())
    throw InvalidArgument("configuration has " + std::to_string(levels_.size()) + " cells, space has " +
                          std::to_string(space_->cell_count()));
  for (auto l : levels_) {
    if (l >= space_->levels) throw InvalidArgument("configuration level outside the value set");
  }
}

HabitatConfiguration HabitatConfiguration::uniform(std::shared_ptr<const ConfigurationSpace> space, int level) {
  const auto n = static_cast<std::size_t>(space->cell_count());
  return HabitatConfiguration(std::move(space), std::vector<std::uint8_t>(n, static_cast<std::uint8_t>(level)));
}

void HabitatConfiguration::set_level(int cell, int level) {
  if (level < 0 || level >= space_->levels) throw InvalidArgument("level outside the value set");
  levels_.at(cell) = static_cast<std::uint8_t>(level);
}

std::vector<int> node_cells(const ConfigurationSpace& space, const Grid& grid) {
  if (grid.dimension() != space.dimension()) throw GridMismatch("space and grid dimensions differ");
  if (!grid.extent().contains(space.omega1) || !space.domain.contains(grid.extent()) ||
      !grid.extent().contains(space.domain))
    throw GridMismatch("space domain differs from the grid extent");

  std::vector<int> out(grid.node_count(), -1);
  std::vector<int> hits(space.cell_count(), 0);
  for (Index n = 0; n < grid.node_count(); ++n) {
    std::array<int, 2> c{0, 0};
    bool inside = true;
    for (int a = 0; a < grid.dimension() && inside; ++a) {
      const double w = space.cell_width(a);
      const double t = (grid.coordinate(n, a) - space.omega1.lower[a]) / w;
      // A node within 1e-9 cell widths of an edge belongs to the cell on its right.
      const double k = std::floor(t + 1e-9);
      if (k < 0 || k >= space.cells[a]) inside = false;
      c[a] = static_cast<int>(k);
    }
    if (!inside) continue;
    const int cell = c[1] * space.cells[0] + c[0];
    out[n] = cell;
    ++hits[cell];
  }
  for (int k = 0; k < space.cell_count(); ++k) {
    if (hits[k] == 0) {
      throw GridMismatch("cell " + std::to_string(k) + " contains no grid node; refine the grid");
    }
  }
  return out;
}

Field habitat_to_field(const HabitatConfiguration& config, std::shared_ptr<const Grid> grid,
                       const std::vector<int>& cells_of_nodes) {
  if (static_cast<Index>(cells_of_nodes.size()) != grid->node_count())
    throw GridMismatch("node-to-cell map was built for another grid");
  Eigen::VectorXd v(grid->node_count());
  const double m = config.space().bounds.m;
  for (Index n = 0; n < grid->node_count(); ++n) {
    const int c = cells_of_nodes[n];
    v[n] = c < 0 ? m : config.value(c);
  }
  return Field(std::move(grid), std::move(v));
}

Field habitat_to_field(const HabitatConfiguration& config, std::shared_ptr<const Grid> grid) {
  const auto map = node_cells(config.space(), *grid);
  return habitat_to_field(config, std::move(grid), map);
}

namespace {
void require_comparable(const HabitatConfiguration& a, const HabitatConfiguration& b) {
  if (!a.space().same_partition(b.space())) throw InvalidArgument("configurations use different cell partitions");
}
}  // namespace

double mean_abs_error(const HabitatConfiguration& truth, const HabitatConfiguration& estimate) {
  require_comparable(truth, estimate);
  double sum = 0.0;
  for (int k = 0; k < truth.cell_count(); ++k) sum += std::abs(truth.value(k) - estimate.value(k));
  return sum * truth.space().cell_measure() / truth.space().domain.measure();
}

double l2_distance_squared(const HabitatConfiguration& a, const HabitatConfiguration& b) {
  require_comparable(a, b);
  double sum = 0.0;
  for (int k = 0; k < a.cell_count(); ++k) {
    const double d = a.value(k) - b.value(k);
    sum += d * d;
  }
  return sum * a.space().cell_measure();
}

}  // namespace hinv
