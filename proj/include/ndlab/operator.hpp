#pragma once

#include <iosfwd>
#include <memory>

#include <Eigen/SparseCore>

#include "ndlab/coefficient_field.hpp"
#include "ndlab/domain_grid.hpp"
#include "ndlab/types.hpp"

namespace ndlab {

enum class Scheme { Central, Upwind };
enum class Monotonicity { Unknown, Certified, Violated };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Finite-difference realization A_h of the non-divergence operator on the
/// interior nodes of a grid. A_h u = interior_matrix * u + boundary_coupling * g
/// where g holds boundary-node values.
class DiscreteOperator {
 public:
  const DomainGrid& grid() const { return *grid_; }
  const std::shared_ptr<const DomainGrid>& grid_ptr() const { return grid_; }
  const SparseMatrix& interior_matrix() const { return interior_; }
  const SparseMatrix& boundary_coupling() const { return coupling_; }
  double h() const { return grid_->h(); }
  Scheme scheme() const { return scheme_; }
  Monotonicity monotone() const { return monotone_; }
  bool certified() const { return monotone_ == Monotonicity::Certified; }
  Eigen::Index size() const { return interior_.rows(); }

 private:
  friend DiscreteOperator assemble(std::shared_ptr<const DomainGrid>, const CoefficientField&, Scheme);

  std::shared_ptr<const DomainGrid> grid_;
  SparseMatrix interior_;
  SparseMatrix coupling_;
  Scheme scheme_ = Scheme::Upwind;
  Monotonicity monotone_ = Monotonicity::Unknown;
};

/// Second derivatives by central differences; the cross term 2 a12 d_xy uses
/// the NE/SW diagonal second difference where a12 >= 0 and the NW/SE one
/// where a12 < 0. First-order terms follow `scheme`. Rejects fields with c > 0
/// or failing their ellipticity certificate (InvalidCoefficient).
DiscreteOperator assemble(std::shared_ptr<const DomainGrid> grid, const CoefficientField& field,
                          Scheme scheme = Scheme::Upwind);

/// interior_matrix * u + boundary_coupling * g. Throws DimensionMismatch.
Vector apply(const DiscreteOperator& op, const Vector& u, const Vector& g);
Vector apply(const DiscreteOperator& op, const Vector& u);

struct MonotonicityReport {
  bool monotone = false;
  std::size_t worst_node = 0;  // interior row with the smallest off-diagonal weight
  double min_offdiagonal = 0.0;
  double max_diagonal = 0.0;
  /// min over rows of -(row sum) = min(-c); zero for c == 0.
  double slack = 0.0;
};

/// monotone iff every off-diagonal stencil weight (including boundary
/// coupling) is >= 0 and every diagonal is <= 0.
MonotonicityReport monotonicity_certificate(const DiscreteOperator& op);

/// Coordinate-format dump: "# interior rows cols nnz" followed by
/// "row col value" lines, then the same for the boundary coupling.
/// Indices are 0-based, values use 17 significant digits.
void write_coordinate_format(const DiscreteOperator& op, std::ostream& out);

}  // namespace ndlab
