#pragma once

#include <memory>
#include <mutex>
#include <string>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include "ndlab/operator.hpp"

namespace ndlab {

struct SolverOptions {
  /// Direct sparse LU up to this many unknowns, preconditioned BiCGSTAB above.
  Eigen::Index direct_limit = 40000;
  double krylov_tolerance = 1e-10;
  int max_iterations = 10000;
};

struct SolverStats {
  int iterations = 0;
  std::string method;
};

/// Factorization of (shift * I - A_h) for repeated solves. For a certified
/// monotone operator with a real shift >= 0 the LU keeps diagonal pivots, so
/// elimination never mixes signs and positivity of the inverse survives in
/// floating point.
template <class Scalar>
class ShiftedSolver {
 public:
  using VectorS = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using MatrixS = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Sparse = Eigen::SparseMatrix<Scalar>;

  ShiftedSolver(const DiscreteOperator& op, Scalar shift, SolverOptions options = {});
  ~ShiftedSolver();
  ShiftedSolver(ShiftedSolver&&) noexcept;
  ShiftedSolver& operator=(ShiftedSolver&&) noexcept;

  /// Solves (shift I - A_h) u = rhs.
  VectorS solve(const VectorS& rhs) const;
  /// Solves (shift I - A_h)^T u = rhs.
  VectorS solve_transposed(const VectorS& rhs) const;
  MatrixS dense_inverse() const;

  const Sparse& matrix() const { return matrix_; }
  Scalar shift() const { return shift_; }
  const SolverStats& stats() const { return stats_; }
  Eigen::Index size() const { return matrix_.rows(); }

  /// ||M u - rhs|| / ||rhs|| (0 when rhs == 0 and u == 0).
  double relative_residual(const VectorS& u, const VectorS& rhs) const;

 private:
  using Krylov = Eigen::BiCGSTAB<Sparse, Eigen::IncompleteLUT<Scalar>>;

  Sparse matrix_;
  Scalar shift_;
  SolverOptions options_;
  mutable SolverStats stats_;
  std::unique_ptr<Eigen::SparseLU<Sparse, Eigen::COLAMDOrdering<int>>> lu_;
  std::unique_ptr<Krylov> krylov_;
  mutable std::unique_ptr<Krylov> krylov_t_;
  mutable std::unique_ptr<std::once_flag> transpose_once_;
  mutable Sparse matrix_t_;
};

using RealSolver = ShiftedSolver<double>;
using ComplexSolver = ShiftedSolver<Complex>;

extern template class ShiftedSolver<double>;
extern template class ShiftedSolver<Complex>;

}  // namespace ndlab
