#include "ndlab/linear_solver.hpp"

#include <type_traits>

#include "ndlab/error.hpp"

namespace ndlab {

template <class Scalar>
ShiftedSolver<Scalar>::ShiftedSolver(const DiscreteOperator& op, Scalar shift, SolverOptions options)
    : shift_(shift), options_(options), transpose_once_(std::make_unique<std::once_flag>()) {
  const Eigen::Index n = op.size();
  matrix_ = -op.interior_matrix().template cast<Scalar>();
  Sparse identity(n, n);
  identity.setIdentity();
  matrix_ += shift * identity;
  matrix_.makeCompressed();

  if (n <= options_.direct_limit) {
    lu_ = std::make_unique<Eigen::SparseLU<Sparse, Eigen::COLAMDOrdering<int>>>();
    bool diagonal_pivots = false;
    if constexpr (std::is_same_v<Scalar, double>) diagonal_pivots = op.certified() && shift >= 0.0;
    if (diagonal_pivots) lu_->setPivotThreshold(0.0);
    lu_->analyzePattern(matrix_);
    lu_->factorize(matrix_);
    if (lu_->info() != Eigen::Success)
      throw Error(ErrorCode::SingularSystem, "sparse LU failed: " + lu_->lastErrorMessage());
    stats_.method = "sparse_lu";
  } else {
    krylov_ = std::make_unique<Krylov>();
    krylov_->setTolerance(options_.krylov_tolerance);
    krylov_->setMaxIterations(options_.max_iterations);
    krylov_->compute(matrix_);
    if (krylov_->info() != Eigen::Success) throw Error(ErrorCode::SingularSystem, "ILUT preconditioner failed");
    stats_.method = "bicgstab_ilut";
  }
}

template <class Scalar>
ShiftedSolver<Scalar>::~ShiftedSolver() = default;
template <class Scalar>
ShiftedSolver<Scalar>::ShiftedSolver(ShiftedSolver&&) noexcept = default;
template <class Scalar>
ShiftedSolver<Scalar>& ShiftedSolver<Scalar>::operator=(ShiftedSolver&&) noexcept = default;

template <class Scalar>
typename ShiftedSolver<Scalar>::VectorS ShiftedSolver<Scalar>::solve(const VectorS& rhs) const {
  if (rhs.size() != size()) throw Error(ErrorCode::DimensionMismatch, "right-hand side has wrong length");
  if (lu_) return lu_->solve(rhs);
  VectorS u = krylov_->solve(rhs);
  stats_.iterations = static_cast<int>(krylov_->iterations());
  if (krylov_->info() != Eigen::Success)
    throw Error(ErrorCode::SolverDivergence, "BiCGSTAB stopped at relative residual " +
                                                 std::to_string(krylov_->error()));
  return u;
}

template <class Scalar>
typename ShiftedSolver<Scalar>::VectorS ShiftedSolver<Scalar>::solve_transposed(const VectorS& rhs) const {
  if (rhs.size() != size()) throw Error(ErrorCode::DimensionMismatch, "right-hand side has wrong length");
  if (lu_) return lu_->transpose().solve(rhs);
  std::call_once(*transpose_once_, [this] {
    matrix_t_ = Sparse(matrix_.transpose());
    krylov_t_ = std::make_unique<Krylov>();
    krylov_t_->setTolerance(options_.krylov_tolerance);
    krylov_t_->setMaxIterations(options_.max_iterations);
    krylov_t_->compute(matrix_t_);
  });
  VectorS u = krylov_t_->solve(rhs);
  if (krylov_t_->info() != Eigen::Success)
    throw Error(ErrorCode::SolverDivergence, "BiCGSTAB (transposed) did not converge");
  return u;
}

template <class Scalar>
typename ShiftedSolver<Scalar>::MatrixS ShiftedSolver<Scalar>::dense_inverse() const {
  const Eigen::Index n = size();
  if (lu_) return lu_->solve(MatrixS::Identity(n, n));
  MatrixS inv(n, n);
  for (Eigen::Index j = 0; j < n; ++j) inv.col(j) = solve(VectorS::Unit(n, j));
  return inv;
}

template <class Scalar>
double ShiftedSolver<Scalar>::relative_residual(const VectorS& u, const VectorS& rhs) const {
  const double r = (matrix_ * u - rhs).norm();
  const double b = rhs.norm();
  if (b == 0.0) return r;
  return r / b;
}

template class ShiftedSolver<double>;
template class ShiftedSolver<Complex>;

}  // namespace ndlab
