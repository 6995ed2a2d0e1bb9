#include "hinv/diffusion.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "hinv/error.hpp"

namespace hinv {

namespace {

int interior_count(const Grid& g, int axis) { return axis < g.dimension() ? g.nodes(axis) - 2 : 1; }

class LdltDiffusionSolver final : public DiffusionSolver {
 public:
  LdltDiffusionSolver(const Grid& grid, double c) : DiffusionSolver(c) {
    const Eigen::SparseMatrix<double> lap = interior_laplacian(grid);
    Eigen::SparseMatrix<double> a(lap.rows(), lap.cols());
    a.setIdentity();
    a -= c * lap;
    ldlt_.compute(a);
    if (ldlt_.info() != Eigen::Success) throw SolverError("diffusion matrix factorization failed");
  }

  void solve(const Eigen::VectorXd& rhs, Eigen::VectorXd& x) const override { x = ldlt_.solve(rhs); }

 private:
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
};

// Orthonormal DST-I matrix; symmetric, its own inverse.
Eigen::MatrixXd sine_basis(int n) {
  Eigen::MatrixXd q(n, n);
  const double s = std::sqrt(2.0 / (n + 1));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) q(i, j) = s * std::sin(std::numbers::pi * (i + 1) * (j + 1) / (n + 1));
  return q;
}

// Eigenvalues of the 1D Dirichlet -Laplacian_h in the DST-I basis order.
Eigen::VectorXd sine_eigenvalues(int n, double h) {
  Eigen::VectorXd lam(n);
  for (int k = 0; k < n; ++k) {
    const double s = std::sin(std::numbers::pi * (k + 1) / (2.0 * (n + 1)));
    lam[k] = 4.0 * s * s / (h * h);
  }
  return lam;
}

class SineDiffusionSolver final : public DiffusionSolver {
 public:
  SineDiffusionSolver(const Grid& grid, double c) : DiffusionSolver(c) {
    nx_ = interior_count(grid, 0);
    ny_ = interior_count(grid, 1);
    qx_ = sine_basis(nx_);
    const Eigen::VectorXd lx = sine_eigenvalues(nx_, grid.spacing(0));
    Eigen::VectorXd ly = Eigen::VectorXd::Zero(1);
    if (grid.dimension() == 2) {
      qy_ = sine_basis(ny_);
      ly = sine_eigenvalues(ny_, grid.spacing(1));
    } else {
      qy_ = Eigen::MatrixXd::Identity(1, 1);
    }
    inverse_symbol_.resize(nx_, ny_);
    for (int j = 0; j < ny_; ++j)
      for (int i = 0; i < nx_; ++i) inverse_symbol_(i, j) = 1.0 / (1.0 + c * (lx[i] + ly[j]));
  }

  void solve(const Eigen::VectorXd& rhs, Eigen::VectorXd& x) const override {
    Eigen::Map<const Eigen::MatrixXd> b(rhs.data(), nx_, ny_);
    Eigen::MatrixXd t(nx_, ny_);
    Eigen::MatrixXd s(nx_, ny_);
    t.noalias() = qx_ * b;
    s.noalias() = t * qy_;
    s.array() *= inverse_symbol_.array();
    t.noalias() = qx_ * s;
    x.resize(rhs.size());
    Eigen::Map<Eigen::MatrixXd> out(x.data(), nx_, ny_);
    out.noalias() = t * qy_;
  }

 private:
  int nx_ = 0;
  int ny_ = 1;
  Eigen::MatrixXd qx_;
  Eigen::MatrixXd qy_;
  Eigen::MatrixXd inverse_symbol_;
};

}  // namespace

Eigen::VectorXd gather_interior(const Grid& grid, const Eigen::VectorXd& node_values) {
  const auto& idx = grid.interior();
  Eigen::VectorXd out(static_cast<Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out[static_cast<Index>(k)] = node_values[idx[k]];
  return out;
}

void scatter_interior(const Grid& grid, const Eigen::VectorXd& interior, Eigen::VectorXd& node_values) {
  node_values.setZero(grid.node_count());
  const auto& idx = grid.interior();
  for (std::size_t k = 0; k < idx.size(); ++k) node_values[idx[k]] = interior[static_cast<Index>(k)];
}

Eigen::SparseMatrix<double> interior_laplacian(const Grid& grid) {
  const int nx = interior_count(grid, 0);
  const int ny = interior_count(grid, 1);
  const Index n = static_cast<Index>(nx) * ny;
  const double ix2 = 1.0 / (grid.spacing(0) * grid.spacing(0));
  const double iy2 = grid.dimension() == 2 ? 1.0 / (grid.spacing(1) * grid.spacing(1)) : 0.0;

  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(5 * n));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const Index c = static_cast<Index>(j) * nx + i;
      t.emplace_back(c, c, -2.0 * ix2 - 2.0 * iy2);
      if (i > 0) t.emplace_back(c, c - 1, ix2);
      if (i < nx - 1) t.emplace_back(c, c + 1, ix2);
      if (grid.dimension() == 2) {
        if (j > 0) t.emplace_back(c, c - nx, iy2);
        if (j < ny - 1) t.emplace_back(c, c + nx, iy2);
      }
    }
  }
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

void apply_interior_laplacian(const Grid& grid, const Eigen::VectorXd& in, Eigen::VectorXd& out) {
  const int nx = interior_count(grid, 0);
  const int ny = interior_count(grid, 1);
  const double ix2 = 1.0 / (grid.spacing(0) * grid.spacing(0));
  out.resize(in.size());
  if (grid.dimension() == 1) {
    for (int i = 0; i < nx; ++i) {
      const double left = i > 0 ? in[i - 1] : 0.0;
      const double right = i < nx - 1 ? in[i + 1] : 0.0;
      out[i] = (left - 2.0 * in[i] + right) * ix2;
    }
    return;
  }
  const double iy2 = 1.0 / (grid.spacing(1) * grid.spacing(1));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const Index c = static_cast<Index>(j) * nx + i;
      const double l = i > 0 ? in[c - 1] : 0.0;
      const double r = i < nx - 1 ? in[c + 1] : 0.0;
      const double d = j > 0 ? in[c - nx] : 0.0;
      const double u = j < ny - 1 ? in[c + nx] : 0.0;
      out[c] = (l - 2.0 * in[c] + r) * ix2 + (d - 2.0 * in[c] + u) * iy2;
    }
  }
}

double dirichlet_ground_eigenvalue(const Grid& grid) {
  double lam = 0.0;
  for (int a = 0; a < grid.dimension(); ++a) {
    const double h = grid.spacing(a);
    const double s = std::sin(std::numbers::pi / (2.0 * (grid.nodes(a) - 1)));
    lam += 4.0 * s * s / (h * h);
  }
  return lam;
}

std::unique_ptr<const DiffusionSolver> make_diffusion_solver(const Grid& grid, double coefficient,
                                                             DiffusionBackend backend) {
  if (!(coefficient > 0.0)) throw InvalidArgument("diffusion solver coefficient must be positive");
  if (backend == DiffusionBackend::Automatic)
    backend = grid.dimension() == 1 ? DiffusionBackend::SparseLdlt : DiffusionBackend::SineTransform;
  if (backend == DiffusionBackend::SparseLdlt) return std::make_unique<LdltDiffusionSolver>(grid, coefficient);
  return std::make_unique<SineDiffusionSolver>(grid, coefficient);
}

}  // namespace hinv
