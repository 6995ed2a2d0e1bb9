#include "hinv/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hinv/error.hpp"

namespace hinv {

namespace {

constexpr double kContainmentTol = 1e-12;

void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidArgument(message);
}

}  // namespace

bool Box::contains(const Box& inner) const {
  if (inner.dim != dim) return false;
  for (int a = 0; a < dim; ++a) {
    const double tol = kContainmentTol * std::max(1.0, std::abs(extent(a)));
    if (inner.lower[a] < lower[a] - tol || inner.upper[a] > upper[a] + tol) return false;
  }
  return true;
}

bool Box::contains_point(std::span<const double> x, double tol) const {
  for (int a = 0; a < dim; ++a) {
    if (x[a] < lower[a] - tol || x[a] > upper[a] + tol) return false;
  }
  return true;
}

bool Ball::contains_point(std::span<const double> x, double tol) const {
  double r2 = 0.0;
  for (int a = 0; a < dim; ++a) r2 += (x[a] - center[a]) * (x[a] - center[a]);
  const double r = radius + tol;
  return r2 <= r * r;
}

Box Ball::bounding_box() const {
  Box b;
  b.dim = dim;
  for (int a = 0; a < dim; ++a) {
    b.lower[a] = center[a] - radius;
    b.upper[a] = center[a] + radius;
  }
  return b;
}

Box bounding_box(const RegionSpec& region) {
  return std::visit(
      [](const auto& r) -> Box {
        if constexpr (std::is_same_v<std::decay_t<decltype(r)>, Box>)
          return r;
        else
          return r.bounding_box();
      },
      region);
}

bool region_contains(const RegionSpec& region, std::span<const double> x, double tol) {
  return std::visit([&](const auto& r) { return r.contains_point(x, tol); }, region);
}

void DomainSpec::validate() const {
  const int d = dimension();
  require(d == 1 || d == 2, "domain dimension must be 1 or 2");
  for (int a = 0; a < d; ++a) {
    require(extent.extent(a) > 0.0, "domain extent must be positive on every axis");
  }
  require(omega1.dim == d, "omega1 dimension differs from the domain");
  for (int a = 0; a < d; ++a) {
    require(omega1.lower[a] - extent.lower[a] > 0.0 && extent.upper[a] - omega1.upper[a] > 0.0,
            "omega1 must lie strictly inside the domain");
    require(omega1.extent(a) > 0.0, "omega1 must have positive extent");
  }
  const Box obs = bounding_box(observation);
  require(obs.dim == d, "observation region dimension differs from the domain");
  require(omega1.contains(obs), "observation region must lie inside omega1");
  if (const auto* ball = std::get_if<Ball>(&observation)) {
    require(ball->radius >= 0.0, "observation ball radius must be nonnegative");
  }
  if (ball_eps) {
    require(ball_eps->dim == d && ball_eps->radius > 0.0, "invalid positivity ball");
    require(omega1.contains(ball_eps->bounding_box()), "positivity ball must lie inside omega1");
  }
}

Grid::Grid(const Box& extent, std::array<int, 2> nodes_per_axis) : extent_(extent) {
  const int d = extent.dim;
  require(d == 1 || d == 2, "grid dimension must be 1 or 2");
  nodes_ = {1, 1};
  spacing_ = {1.0, 1.0};
  for (int a = 0; a < d; ++a) {
    require(extent.extent(a) > 0.0, "grid extent must be positive on every axis");
    require(nodes_per_axis[a] >= 3, "a grid needs at least 3 nodes per axis");
    nodes_[a] = nodes_per_axis[a];
    spacing_[a] = extent.extent(a) / (nodes_[a] - 1);
  }
  node_count_ = static_cast<Index>(nodes_[0]) * nodes_[1];

  weights_.resize(node_count_);
  interior_.reserve(node_count_);
  for (Index n = 0; n < node_count_; ++n) {
    double w = 1.0;
    const auto ij = multi_index(n);
    for (int a = 0; a < d; ++a) {
      const bool edge = ij[a] == 0 || ij[a] == nodes_[a] - 1;
      w *= edge ? 0.5 * spacing_[a] : spacing_[a];
    }
    weights_[n] = w;
    (is_boundary(n) ? boundary_ : interior_).push_back(n);
  }
}

double Grid::cell_measure() const {
  return dimension() == 1 ? spacing_[0] : spacing_[0] * spacing_[1];
}

std::array<int, 2> Grid::multi_index(Index node) const {
  return {static_cast<int>(node % nodes_[0]), static_cast<int>(node / nodes_[0])};
}

double Grid::coordinate(Index node, int axis) const {
  const auto ij = multi_index(node);
  if (ij[axis] == nodes_[axis] - 1) return extent_.upper[axis];
  return extent_.lower[axis] + ij[axis] * spacing_[axis];
}

std::array<double, 2> Grid::point(Index node) const {
  std::array<double, 2> p{0.0, 0.0};
  for (int a = 0; a < dimension(); ++a) p[a] = coordinate(node, a);
  return p;
}

bool Grid::is_boundary(Index node) const {
  const auto ij = multi_index(node);
  for (int a = 0; a < dimension(); ++a) {
    if (ij[a] == 0 || ij[a] == nodes_[a] - 1) return true;
  }
  return false;
}

bool Grid::same_layout(const Grid& other) const {
  if (dimension() != other.dimension()) return false;
  for (int a = 0; a < dimension(); ++a) {
    if (nodes_[a] != other.nodes_[a]) return false;
    const double tol = 1e-12 * std::max(1.0, std::abs(extent_.extent(a)));
    if (std::abs(extent_.lower[a] - other.extent_.lower[a]) > tol ||
        std::abs(extent_.upper[a] - other.extent_.upper[a]) > tol)
      return false;
  }
  return true;
}

Grid build_grid(const Box& extent, std::span<const int> nodes_per_axis) {
  require(static_cast<int>(nodes_per_axis.size()) == extent.dim,
          "one node count per axis is required");
  std::array<int, 2> n{1, 1};
  for (int a = 0; a < extent.dim; ++a) n[a] = nodes_per_axis[a];
  return Grid(extent, n);
}

Grid build_grid(const DomainSpec& domain, std::span<const int> nodes_per_axis) {
  domain.validate();
  return build_grid(domain.extent, nodes_per_axis);
}

NodeMask::NodeMask(Index node_count, std::vector<Index> nodes)
    : node_count_(node_count), nodes_(std::move(nodes)) {
  std::sort(nodes_.begin(), nodes_.end());
  nodes_.erase(std::unique(nodes_.begin(), nodes_.end()), nodes_.end());
  require(nodes_.empty() || (nodes_.front() >= 0 && nodes_.back() < node_count_),
          "mask node index out of range");
}

NodeMask NodeMask::all(const Grid& grid) {
  std::vector<Index> nodes(grid.node_count());
  for (Index n = 0; n < grid.node_count(); ++n) nodes[n] = n;
  return NodeMask(grid.node_count(), std::move(nodes));
}

bool NodeMask::contains(Index node) const {
  return std::binary_search(nodes_.begin(), nodes_.end(), node);
}

bool NodeMask::is_subset_of(const NodeMask& other) const {
  return std::includes(other.nodes_.begin(), other.nodes_.end(), nodes_.begin(), nodes_.end());
}

NodeMask region_mask(const Grid& grid, const RegionSpec& region) {
  const Box bb = bounding_box(region);
  require(bb.dim == grid.dimension(), "region dimension differs from the grid");
  require(grid.extent().contains(bb), "region must lie inside the domain");

  double h = grid.spacing(0);
  if (grid.dimension() == 2) h = std::min(h, grid.spacing(1));
  const double tol = 1e-9 * h;

  std::vector<Index> selected;
  for (Index n = 0; n < grid.node_count(); ++n) {
    const auto p = grid.point(n);
    if (region_contains(region, std::span<const double>(p.data(), 2), tol)) selected.push_back(n);
  }
  if (selected.empty()) {
    throw InvalidArgument("region contains no grid node; refine the grid");
  }
  return NodeMask(grid.node_count(), std::move(selected));
}

}  // namespace hinv
