#ifndef HINV_CONFIGURATION_HPP
#define HINV_CONFIGURATION_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include "hinv/field.hpp"
#include "hinv/geometry.hpp"

namespace hinv {

/// Finite set of piecewise-constant growth-rate functions.
///
/// omega1 is split into `cells` equal sub-boxes per axis; each cell takes one
/// of `levels` equally spaced values m + j (M - m) / (levels - 1), and the
/// function equals m on the rest of the domain. Two configurations are
/// neighbours when they differ on exactly one cell by exactly one level step,
/// which for a binary space is a plain flip.
///
/// Cells are numbered with the x index fastest. Cell membership of a point is
/// half-open, [lo, hi) per axis, so the upper faces of omega1 map to m.
struct ConfigurationSpace {
  Box domain;
  Box omega1;
  std::array<int, 2> cells{1, 1};
  int levels = 2;
  HabitatBounds bounds;

  int dimension() const { return domain.dim; }
  int cell_count() const { return dimension() == 1 ? cells[0] : cells[0] * cells[1]; }
  double cell_width(int axis) const { return omega1.extent(axis) / cells[axis]; }
  double cell_measure() const;
  Box cell_box(int cell) const;
  double level_step() const { return levels > 1 ? (bounds.M - bounds.m) / (levels - 1) : 0.0; }
  double value(int level) const { return bounds.m + level * level_step(); }
  /// log2 of the number of configurations, cells * log2(levels).
  double log2_cardinality() const;

  void validate() const;
  bool same_partition(const ConfigurationSpace& other) const;
};

/// Element of a ConfigurationSpace, stored as one level index per cell.
class HabitatConfiguration {
 public:
  HabitatConfiguration(std::shared_ptr<const ConfigurationSpace> space, std::vector<std::uint8_t> levels);

  static HabitatConfiguration uniform(std::shared_ptr<const ConfigurationSpace> space, int level);

  const ConfigurationSpace& space() const { return *space_; }
  const std::shared_ptr<const ConfigurationSpace>& space_ptr() const { return space_; }
  const std::vector<std::uint8_t>& levels() const { return levels_; }
  int level(int cell) const { return levels_[cell]; }
  void set_level(int cell, int level);
  double value(int cell) const { return space_->value(levels_[cell]); }
  int cell_count() const { return static_cast<int>(levels_.size()); }

  friend bool operator==(const HabitatConfiguration& a, const HabitatConfiguration& b) {
    return a.levels_ == b.levels_;
  }

 private:
  std::shared_ptr<const ConfigurationSpace> space_;
  std::vector<std::uint8_t> levels_;
};

/// Cell index of every grid node, or -1 for nodes outside the cell partition.
/// Throws GridMismatch if some cell contains no node (the embedding would not
/// be injective).
std::vector<int> node_cells(const ConfigurationSpace& space, const Grid& grid);

Field habitat_to_field(const HabitatConfiguration& config, std::shared_ptr<const Grid> grid);
Field habitat_to_field(const HabitatConfiguration& config, std::shared_ptr<const Grid> grid,
                       const std::vector<int>& cells_of_nodes);

/// (1/|domain|) * integral of |truth - estimate|, exact for piecewise constants.
double mean_abs_error(const HabitatConfiguration& truth, const HabitatConfiguration& estimate);

/// Squared L2(omega1) distance between two configurations.
double l2_distance_squared(const HabitatConfiguration& a, const HabitatConfiguration& b);

}  // namespace hinv

#endif  // HINV_CONFIGURATION_HPP
