#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "ndlab/coefficient_field.hpp"
#include "ndlab/linear_solver.hpp"
#include "ndlab/operator.hpp"

namespace ndlab {

struct EllipticSolution {
  GridFunction u;
  double residual_norm = 0.0;  // relative
  SolverStats stats;
};

struct EllipticOptions {
  SolverOptions solver;
  double residual_tolerance = 1e-10;
};

/// (mu I - A_h) u = f with zero boundary data. mu >= 0.
EllipticSolution solve_poisson(const DiscreteOperator& op, const Vector& f, double mu = 0.0,
                               const EllipticOptions& options = {});

/// A_h u = 0 in the interior, u = g on the boundary nodes.
EllipticSolution solve_dirichlet_direct(const DiscreteOperator& op, const Vector& g,
                                        const EllipticOptions& options = {});

/// -A_h u = f, u = g on the boundary, as u0 + u1 with -A_h u0 = f (zero
/// boundary) and A_h u1 = 0 (boundary g).
EllipticSolution solve_full_problem(const DiscreteOperator& op, const Vector& f, const Vector& g,
                                    const EllipticOptions& options = {});

struct BallSolveInfo {
  double ball_radius = 0.0;
  double collar_width = 0.0;
  std::size_t ball_unknowns = 0;
};

/// Solves -A_h u = f, u = g through an enclosing ball: extend the
/// coefficients (and f by zero) to the ball, solve the zero-boundary problem
/// there for v, then correct with the A_h-harmonic w on the original grid
/// whose boundary values are v - g, and return u = v - w.
EllipticSolution dirichlet_via_ball(std::shared_ptr<const DomainGrid> grid, const CoefficientField& field,
                                    Scheme scheme, const Vector& f, const Vector& g, double margin,
                                    const ExtensionRecipe& recipe = {}, BallSolveInfo* info = nullptr,
                                    const EllipticOptions& options = {});

/// max over interior nodes i of ||row_i((mu - A_h)^-1)||_2 / h: the smallest C
/// with sup u <= C ||f+||_L2 for zero boundary data. Exact (dense inverse,
/// InvalidArgument above `dense_limit` unknowns).
double sup_over_l2_constant(const DiscreteOperator& op, double mu = 0.0, Eigen::Index dense_limit = 6000);

struct AleksandrovReport {
  double sup_u = 0.0;
  double sup_boundary_positive = 0.0;
  double l2_f_positive = 0.0;
  /// (sup u - sup_boundary u+)+ / ||f+||_L2; zero when f+ vanishes.
  double measured_c1 = 0.0;
  double bound = 0.0;
  bool sign_case = false;  // f <= 0 and g == 0
  bool pass = false;
};

/// Checks sup u <= sup_boundary u+ + factor * c1 * ||f+||_L2, and u <= 1e-12
/// when f <= 0, g == 0. Throws NotMonotone without a certificate.
AleksandrovReport aleksandrov_check(const DiscreteOperator& op, const EllipticSolution& solution, const Vector& f,
                                    const Vector& g, double c1_calibrated, double factor = 1.0);

/// max over node pairs of |u(p) - u(q)| / |p - q|^alpha. Boundary nodes sit at
/// their trace. Above `pair_scan_limit` nodes, `sampled_pairs` random pairs
/// are scanned instead.
double holder_seminorm(const GridFunction& u, const DomainGrid& grid, double alpha,
                       std::size_t pair_scan_limit = 20000, std::uint64_t seed = 0,
                       std::size_t sampled_pairs = 4000000);

/// Largest alpha in {0.1, ..., 0.9} with seminorm(fine) <= ratio * seminorm(coarse),
/// or 0 if none.
double largest_stable_holder_exponent(const GridFunction& coarse, const DomainGrid& coarse_grid,
                                      const GridFunction& fine, const DomainGrid& fine_grid, double ratio = 1.5);

/// Samples an expression at interior nodes / at boundary traces.
Vector sample_interior(const CoeffExpr& e, const DomainGrid& grid);
Vector sample_boundary(const CoeffExpr& e, const DomainGrid& grid);

}  // namespace ndlab
