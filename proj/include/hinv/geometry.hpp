#ifndef HINV_GEOMETRY_HPP
#define HINV_GEOMETRY_HPP

#include <array>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace hinv {

using Index = Eigen::Index;

/// Axis-aligned closed box in one or two dimensions. A 1D box is an interval;
/// the second axis is ignored when dim == 1.
struct Box {
  int dim = 1;
  std::array<double, 2> lower{0.0, 0.0};
  std::array<double, 2> upper{0.0, 0.0};

  static Box interval(double lo, double hi) { return Box{1, {lo, 0.0}, {hi, 0.0}}; }
  static Box rectangle(double x0, double x1, double y0, double y1) {
    return Box{2, {x0, y0}, {x1, y1}};
  }

  double extent(int axis) const { return upper[axis] - lower[axis]; }
  double measure() const { return dim == 1 ? extent(0) : extent(0) * extent(1); }
  bool contains(const Box& inner) const;
  bool contains_point(std::span<const double> x, double tol = 0.0) const;
};

/// Closed Euclidean ball (a closed interval in 1D).
struct Ball {
  int dim = 1;
  std::array<double, 2> center{0.0, 0.0};
  double radius = 0.0;

  bool contains_point(std::span<const double> x, double tol = 0.0) const;
  Box bounding_box() const;
};

using RegionSpec = std::variant<Box, Ball>;

Box bounding_box(const RegionSpec& region);
bool region_contains(const RegionSpec& region, std::span<const double> x, double tol = 0.0);

/// Continuous problem geometry: the domain, the subregion where the growth
/// rate is unknown, the observation region and the optional positivity ball.
struct DomainSpec {
  Box extent;
  Box omega1;
  RegionSpec observation = Box{};
  std::optional<Ball> ball_eps;

  int dimension() const { return extent.dim; }
  // Throws InvalidArgument when a containment invariant fails.
  void validate() const;
};

/// Uniform tensor-product grid over a box, boundary nodes included.
/// Nodes are numbered with the x index running fastest.
class Grid {
 public:
  Grid(const Box& extent, std::array<int, 2> nodes_per_axis);

  int dimension() const { return extent_.dim; }
  const Box& extent() const { return extent_; }
  int nodes(int axis) const { return nodes_[axis]; }
  std::array<int, 2> nodes_per_axis() const { return nodes_; }
  double spacing(int axis) const { return spacing_[axis]; }
  Index node_count() const { return node_count_; }
  /// Volume element of a node: h in 1D, hx*hy in 2D.
  double cell_measure() const;

  Index flat_index(int i, int j = 0) const { return static_cast<Index>(j) * nodes_[0] + i; }
  std::array<int, 2> multi_index(Index node) const;
  double coordinate(Index node, int axis) const;
  std::array<double, 2> point(Index node) const;
  bool is_boundary(Index node) const;

  const std::vector<Index>& interior() const { return interior_; }
  const std::vector<Index>& boundary() const { return boundary_; }
  /// Interior nodes per axis (nodes - 2).
  int interior_nodes(int axis) const { return dimension() > axis ? nodes_[axis] - 2 : 1; }

  /// Trapezoidal weights: h per axis, halved on boundary nodes.
  const Eigen::VectorXd& quadrature_weights() const { return weights_; }

  bool same_layout(const Grid& other) const;

 private:
  Box extent_;
  std::array<int, 2> nodes_{1, 1};
  std::array<double, 2> spacing_{1.0, 1.0};
  Index node_count_ = 0;
  std::vector<Index> interior_;
  std::vector<Index> boundary_;
  Eigen::VectorXd weights_;
};

Grid build_grid(const Box& extent, std::span<const int> nodes_per_axis);
Grid build_grid(const DomainSpec& domain, std::span<const int> nodes_per_axis);

/// Sorted set of grid nodes.
class NodeMask {
 public:
  NodeMask() = default;
  NodeMask(Index node_count, std::vector<Index> nodes);

  static NodeMask all(const Grid& grid);

  Index node_count() const { return node_count_; }
  const std::vector<Index>& indices() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }
  bool contains(Index node) const;
  bool is_subset_of(const NodeMask& other) const;

 private:
  Index node_count_ = 0;
  std::vector<Index> nodes_;
};

/// Every node lying in the closed region, with tolerance 1e-9 h.
/// Throws InvalidArgument when the region leaves the domain or selects no node.
NodeMask region_mask(const Grid& grid, const RegionSpec& region);

}  // namespace hinv

#endif  // HINV_GEOMETRY_HPP
