#ifndef HINV_DIFFUSION_HPP
#define HINV_DIFFUSION_HPP

#include <memory>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "hinv/geometry.hpp"

namespace hinv {

// Interior vectors hold the unknowns of a Dirichlet problem: interior nodes
// only, x index fastest, size (nx - 2) * (ny - 2).

Eigen::VectorXd gather_interior(const Grid& grid, const Eigen::VectorXd& node_values);
/// Writes interior values into a node vector whose boundary entries are zeroed.
void scatter_interior(const Grid& grid, const Eigen::VectorXd& interior, Eigen::VectorXd& node_values);

/// Dirichlet Laplacian restricted to interior unknowns.
Eigen::SparseMatrix<double> interior_laplacian(const Grid& grid);
void apply_interior_laplacian(const Grid& grid, const Eigen::VectorXd& in, Eigen::VectorXd& out);

/// Smallest eigenvalue of -Laplacian_h on the grid (closed form).
double dirichlet_ground_eigenvalue(const Grid& grid);

/// Solver for (I - c Laplacian_h) x = b on interior unknowns, c > 0.
/// Factorized once; solve() is const and safe to call concurrently.
class DiffusionSolver {
 public:
  explicit DiffusionSolver(double coefficient) : coefficient_(coefficient) {}
  virtual ~DiffusionSolver() = default;

  virtual void solve(const Eigen::VectorXd& rhs, Eigen::VectorXd& x) const = 0;
  double coefficient() const { return coefficient_; }

 private:
  double coefficient_;
};

enum class DiffusionBackend {
  Automatic,      // sparse LDLT in 1D, sine basis in 2D
  SparseLdlt,     // Eigen::SimplicialLDLT of the assembled matrix
  SineTransform,  // dense DST-I fast diagonalization on the tensor grid
};

std::unique_ptr<const DiffusionSolver> make_diffusion_solver(const Grid& grid, double coefficient,
                                                             DiffusionBackend backend = DiffusionBackend::Automatic);

}  // namespace hinv

#endif  // HINV_DIFFUSION_HPP
