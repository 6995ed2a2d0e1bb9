#ifndef HINV_FIELD_HPP
#define HINV_FIELD_HPP

#include <filesystem>
#include <memory>
#include <string>

#include <Eigen/Core>

#include "hinv/binary_io.hpp"
#include "hinv/error.hpp"
#include "hinv/geometry.hpp"

namespace hinv {

/// One value per grid node, sharing ownership of the grid.
template <typename Scalar>
class ScalarField {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  ScalarField(std::shared_ptr<const Grid> grid, Vector values)
      : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw InvalidArgument("field requires a grid");
    if (values_.size() != grid_->node_count())
      throw InvalidArgument("field value count differs from the grid node count");
  }

  static ScalarField zeros(std::shared_ptr<const Grid> grid) {
    const Index n = grid->node_count();
    return ScalarField(std::move(grid), Vector::Zero(n));
  }
  static ScalarField constant(std::shared_ptr<const Grid> grid, Scalar value) {
    const Index n = grid->node_count();
    return ScalarField(std::move(grid), Vector::Constant(n, value));
  }
  template <typename Fn>
  static ScalarField from_function(std::shared_ptr<const Grid> grid, Fn&& fn) {
    Vector v(grid->node_count());
    for (Index n = 0; n < grid->node_count(); ++n) v[n] = fn(grid->point(n));
    return ScalarField(std::move(grid), std::move(v));
  }

  const Grid& grid() const { return *grid_; }
  const std::shared_ptr<const Grid>& grid_ptr() const { return grid_; }
  const Vector& values() const { return values_; }
  Vector& values() { return values_; }
  Index size() const { return values_.size(); }
  Scalar operator[](Index n) const { return values_[n]; }
  Scalar& operator[](Index n) { return values_[n]; }

  bool all_finite() const { return values_.allFinite(); }

 private:
  std::shared_ptr<const Grid> grid_;
  Vector values_;
};

using Field = ScalarField<double>;

/// Bounds of the admissible growth-rate set: |rho| <= M, rho = m off omega1.
struct HabitatBounds {
  double m = -1.0;
  double M = 2.0;

  void validate() const {
    if (!(M > 0.0)) throw InvalidArgument("habitat bound M must be positive");
    if (m < -M || m > M) throw InvalidArgument("habitat anchor m must lie in [-M, M]");
  }
};

inline void require_same_grid(const Grid& a, const Grid& b) {
  if (&a != &b && !a.same_layout(b)) throw GridMismatch("fields live on different grids");
}

/// Trapezoidal quadrature of f*g over the masked nodes.
template <typename Scalar>
Scalar l2_inner(const ScalarField<Scalar>& f, const ScalarField<Scalar>& g, const NodeMask& mask) {
  require_same_grid(f.grid(), g.grid());
  if (mask.node_count() != f.grid().node_count())
    throw GridMismatch("mask was built for another grid");
  const auto& w = f.grid().quadrature_weights();
  Scalar sum{0};
  for (Index n : mask.indices()) sum += Scalar(w[n]) * f[n] * g[n];
  return sum;
}

template <typename Scalar>
Scalar l2_inner(const ScalarField<Scalar>& f, const ScalarField<Scalar>& g) {
  require_same_grid(f.grid(), g.grid());
  return (f.grid().quadrature_weights().template cast<Scalar>().array() * f.values().array() *
          g.values().array())
      .sum();
}

/// Second-order central Laplacian on interior nodes of a node vector; boundary
/// entries of `out` are zero. Boundary entries of `in` are used as given.
template <typename In, typename Out>
void apply_laplacian(const Grid& grid, const Eigen::MatrixBase<In>& in, Eigen::MatrixBase<Out>& out) {
  using Scalar = typename Out::Scalar;
  const int nx = grid.nodes(0);
  const Scalar ix2 = Scalar(1) / (Scalar(grid.spacing(0)) * Scalar(grid.spacing(0)));
  out.setZero();
  if (grid.dimension() == 1) {
    for (int i = 1; i < nx - 1; ++i) out[i] = (in[i - 1] - Scalar(2) * in[i] + in[i + 1]) * ix2;
    return;
  }
  const int ny = grid.nodes(1);
  const Scalar iy2 = Scalar(1) / (Scalar(grid.spacing(1)) * Scalar(grid.spacing(1)));
  for (int j = 1; j < ny - 1; ++j) {
    for (int i = 1; i < nx - 1; ++i) {
      const Index c = static_cast<Index>(j) * nx + i;
      out[c] = (in[c - 1] - Scalar(2) * in[c] + in[c + 1]) * ix2 +
               (in[c - nx] - Scalar(2) * in[c] + in[c + nx]) * iy2;
    }
  }
}

template <typename Scalar>
ScalarField<Scalar> discrete_laplacian(const ScalarField<Scalar>& f) {
  typename ScalarField<Scalar>::Vector out(f.size());
  apply_laplacian(f.grid(), f.values(), out);
  return ScalarField<Scalar>(f.grid_ptr(), std::move(out));
}

// Serialization. CSV rows are "index,x[,y],value"; the binary layout is
// documented in field_io.cpp.
void write_field_csv(const std::filesystem::path& path, const Field& field);
void write_field_binary(const std::filesystem::path& path, const Field& field);
Field read_field_binary(const std::filesystem::path& path);

namespace io {
// Grid descriptor: dim u8, nodes u32[2], lower f64[2], upper f64[2].
void put_grid(ByteWriter& out, const Grid& grid);
Grid get_grid(ByteReader& in);
}  // namespace io

}  // namespace hinv

#endif  // HINV_FIELD_HPP
