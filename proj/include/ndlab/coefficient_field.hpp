#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ndlab/domain_grid.hpp"
#include "ndlab/expr.hpp"
#include "ndlab/types.hpp"

namespace ndlab {

/// Symbolic source of a coefficient set. a21 is a12 by construction.
struct CoefficientExprs {
  CoeffExpr a11 = CoeffExpr::constant(1.0);
  CoeffExpr a12 = CoeffExpr::constant(0.0);
  CoeffExpr a22 = CoeffExpr::constant(1.0);
  CoeffExpr b1 = CoeffExpr::constant(0.0);
  CoeffExpr b2 = CoeffExpr::constant(0.0);
  CoeffExpr c = CoeffExpr::constant(0.0);
};

/// Coefficients of  sum a_ij d_ij u + sum b_j d_j u + c u  sampled at every
/// node of a grid (interior nodes at their position, boundary nodes at their
/// boundary trace). Symmetric by construction: only a12 is stored.
struct CoefficientField {
  Vector a11, a12, a22;
  Vector b1, b2;
  Vector c;
  double lambda_lower = 0.0;
  /// Present when the field was sampled from expressions.
  std::optional<CoefficientExprs> exprs;

  std::size_t size() const { return static_cast<std::size_t>(a11.size()); }
};

/// Throws InvalidCoefficient on non-finite samples or any c > 0.
CoefficientField sample_field(const CoefficientExprs& exprs, double lambda_lower, const DomainGrid& grid);

/// Builds a field from raw node samples; a21 must equal a12 entrywise
/// (AsymmetricInput otherwise).
CoefficientField field_from_samples(Vector a11, Vector a12, const Vector& a21, Vector a22, Vector b1, Vector b2,
                                    Vector c, double lambda_lower);

/// Smallest eigenvalue of [[a11, a12], [a12, a22]].
double min_eigenvalue(double a11, double a12, double a22);

struct EllipticityCertificate {
  double min_quadform = 0.0;    // sampled over unit directions (diagnostic)
  double min_eigenvalue = 0.0;  // exact; decides `pass`
  std::size_t worst_node = 0;
  bool pass = false;
};

EllipticityCertificate check_ellipticity(const CoefficientField& field, const DomainGrid& grid, int n_dirs = 360);

struct ExtensionRecipe {
  /// Width of the collar over which the extension blends from the clamped
  /// field to (lambda/2) * identity.
  double collar_width = 0.25;
};

/// Partition-of-unity weight of the clamped field at distance d from the
/// boundary: 1 at d = 0, 0 for d >= width, C^1 in between.
double blend_weight(double d, double width);

/// Extension of a field on Omega to its enclosing ball. Values at every node
/// of `grid` are copied bit-exactly; elsewhere the field is clamped to its
/// value at the nearest boundary point and blended toward (lambda/2) I; b and
/// c are extended by zero. The result has lambda_lower = lambda/2.
/// Throws BlendFailure if the collar is narrower than two mesh cells.
CoefficientField extend_to_ball(const CoefficientField& field, const DomainGrid& grid, const EnclosingBall& ball,
                                const ExtensionRecipe& recipe);

struct MollifierSpec {
  int k = 4;  // support radius 1/k
};

struct KernelTap {
  int di = 0;
  int dj = 0;
  double weight = 0.0;
};

/// Sampled bump exp(-1/(1-(rk)^2)) on the lattice, renormalized to unit mass.
std::vector<KernelTap> mollifier_kernel(const MollifierSpec& spec, double h);

/// Convolves the second-order coefficients of a ball field with the discrete
/// mollifier, evaluated at the nodes of the source grid. First- and
/// zeroth-order coefficients are carried over unchanged. Throws
/// SupportOverrun if a kernel window leaves the ball grid.
CoefficientField mollify(const CoefficientField& ball_field, const EnclosingBall& ball, const MollifierSpec& spec);

/// Max over nodes and second-order components of |a - b|.
double sup_distance(const CoefficientField& a, const CoefficientField& b);

struct ReducedDrift {
  Vector b1;  // interior nodes
  Vector b2;
  double max_difference_quotient = 0.0;
  bool lipschitz_warning = false;
};

/// b~_j = b_j - sum_i D_i a_ij at interior nodes. Central differences where
/// both neighbours are interior, second-order one-sided differences next to
/// the boundary. Flags (without failing) difference quotients above
/// `lipschitz_bound`.
ReducedDrift divergence_reduction(const CoefficientField& field, const DomainGrid& grid,
                                  double lipschitz_bound = 1e3);

}  // namespace ndlab
