#include "ndlab/elliptic.hpp"

#include <algorithm>
#include <cmath>

#include "ndlab/error.hpp"
#include "ndlab/rng.hpp"

namespace ndlab {

namespace {

void check_residual(double r, const EllipticOptions& options) {
  if (!(r <= options.residual_tolerance)) {
    throw Error(ErrorCode::SolverDivergence, "relative residual " + std::to_string(r) + " exceeds " +
                                                 std::to_string(options.residual_tolerance));
  }
}

void check_sizes(const DiscreteOperator& op, const Vector* f, const Vector* g) {
  if (f && f->size() != op.size()) {
    throw Error(ErrorCode::DimensionMismatch, "source has " + std::to_string(f->size()) + " entries, expected " +
                                                  std::to_string(op.size()));
  }
  if (g && g->size() != op.boundary_coupling().cols()) {
    throw Error(ErrorCode::DimensionMismatch, "boundary data has " + std::to_string(g->size()) +
                                                  " entries, expected " +
                                                  std::to_string(op.boundary_coupling().cols()));
  }
}

}  // namespace

EllipticSolution solve_poisson(const DiscreteOperator& op, const Vector& f, double mu,
                               const EllipticOptions& options) {
  check_sizes(op, &f, nullptr);
  if (!(mu >= 0.0)) throw Error(ErrorCode::InvalidArgument, "shift must be >= 0");
  RealSolver solver(op, mu, options.solver);
  EllipticSolution out;
  out.u.interior = solver.solve(f);
  out.u.boundary = Vector::Zero(static_cast<Eigen::Index>(op.grid().num_boundary()));
  out.residual_norm = solver.relative_residual(out.u.interior, f);
  out.stats = solver.stats();
  check_residual(out.residual_norm, options);
  return out;
}

EllipticSolution solve_dirichlet_direct(const DiscreteOperator& op, const Vector& g,
                                        const EllipticOptions& options) {
  check_sizes(op, nullptr, &g);
  const Vector rhs = op.boundary_coupling() * g;
  RealSolver solver(op, 0.0, options.solver);
  EllipticSolution out;
  out.u.interior = solver.solve(rhs);
  out.u.boundary = g;
  out.residual_norm = solver.relative_residual(out.u.interior, rhs);
  out.stats = solver.stats();
  check_residual(out.residual_norm, options);
  return out;
}

EllipticSolution solve_full_problem(const DiscreteOperator& op, const Vector& f, const Vector& g,
                                    const EllipticOptions& options) {
  check_sizes(op, &f, &g);
  RealSolver solver(op, 0.0, options.solver);
  const Vector coupled = op.boundary_coupling() * g;
  const Vector u0 = solver.solve(f);
  const Vector u1 = solver.solve(coupled);
  EllipticSolution out;
  out.u.interior = u0 + u1;
  out.u.boundary = g;
  out.residual_norm = solver.relative_residual(out.u.interior, Vector(f + coupled));
  out.stats = solver.stats();
  check_residual(out.residual_norm, options);
  return out;
}

EllipticSolution dirichlet_via_ball(std::shared_ptr<const DomainGrid> grid, const CoefficientField& field,
                                    Scheme scheme, const Vector& f, const Vector& g, double margin,
                                    const ExtensionRecipe& recipe, BallSolveInfo* info,
                                    const EllipticOptions& options) {
  if (f.size() != static_cast<Eigen::Index>(grid->num_interior()) ||
      g.size() != static_cast<Eigen::Index>(grid->num_boundary())) {
    throw Error(ErrorCode::DimensionMismatch, "source or boundary data does not match the grid");
  }
  EnclosingBall ball = enclosing_ball(*grid, margin);
  CoefficientField extended = extend_to_ball(field, *grid, ball, recipe);
  auto ball_grid = std::make_shared<const DomainGrid>(ball.grid);
  const DiscreteOperator ball_op = assemble(ball_grid, extended, scheme);

  Vector f_ball = Vector::Zero(ball_op.size());
  for (std::size_t k = 0; k < grid->num_interior(); ++k) f_ball[ball.injection[k]] = f[static_cast<Eigen::Index>(k)];
  const EllipticSolution v = solve_poisson(ball_op, f_ball, 0.0, options);

  const std::size_t ni = grid->num_interior();
  Vector v_interior(static_cast<Eigen::Index>(ni));
  for (std::size_t k = 0; k < ni; ++k) v_interior[static_cast<Eigen::Index>(k)] = v.u.interior[ball.injection[k]];
  Vector v_boundary(g.size());
  for (std::size_t k = 0; k < grid->num_boundary(); ++k) {
    v_boundary[static_cast<Eigen::Index>(k)] = v.u.interior[ball.injection[ni + k]];
  }

  const DiscreteOperator op = assemble(grid, field, scheme);
  const EllipticSolution w = solve_dirichlet_direct(op, Vector(v_boundary - g), options);

  EllipticSolution out;
  out.u.interior = v_interior - w.u.interior;
  out.u.boundary = g;
  const Vector residual = -apply(op, out.u.interior, g) - f;
  const double scale = std::max(f.norm(), (op.boundary_coupling() * g).norm());
  out.residual_norm = scale > 0.0 ? residual.norm() / scale : residual.norm();
  out.stats = w.stats;
  if (info) {
    info->ball_radius = ball.radius;
    info->collar_width = recipe.collar_width;
    info->ball_unknowns = static_cast<std::size_t>(ball_op.size());
  }
  return out;
}

double sup_over_l2_constant(const DiscreteOperator& op, double mu, Eigen::Index dense_limit) {
  if (op.size() > dense_limit) {
    throw Error(ErrorCode::InvalidArgument, "dense inverse limited to " + std::to_string(dense_limit) + " unknowns");
  }
  RealSolver solver(op, mu);
  const DenseMatrix inv = solver.dense_inverse();
  return inv.rowwise().norm().maxCoeff() / op.h();
}

AleksandrovReport aleksandrov_check(const DiscreteOperator& op, const EllipticSolution& solution, const Vector& f,
                                    const Vector& g, double c1_calibrated, double factor) {
  if (!op.certified()) throw Error(ErrorCode::NotMonotone, "maximum principle needs a monotone operator");
  check_sizes(op, &f, &g);
  AleksandrovReport r;
  r.sup_u = solution.u.interior.size() ? solution.u.interior.maxCoeff() : -INFINITY;
  if (g.size()) r.sup_u = std::max(r.sup_u, g.maxCoeff());
  r.sup_boundary_positive = g.size() ? std::max(0.0, g.maxCoeff()) : 0.0;
  r.l2_f_positive = l2_norm(positive_part(f), op.h());
  const double excess = std::max(0.0, r.sup_u - r.sup_boundary_positive);
  r.measured_c1 = r.l2_f_positive > 0.0 ? excess / r.l2_f_positive : 0.0;
  r.bound = r.sup_boundary_positive + factor * c1_calibrated * r.l2_f_positive;
  r.pass = r.sup_u <= r.bound + 1e-12 * std::max(1.0, std::abs(r.bound));
  r.sign_case = (f.size() == 0 || f.maxCoeff() <= 0.0) && (g.size() == 0 || sup_norm(g) == 0.0);
  if (r.sign_case) r.pass = r.pass && r.sup_u <= 1e-12;
  return r;
}

double holder_seminorm(const GridFunction& u, const DomainGrid& grid, double alpha, std::size_t pair_scan_limit,
                       std::uint64_t seed, std::size_t sampled_pairs) {
  if (static_cast<std::size_t>(u.interior.size()) != grid.num_interior() ||
      static_cast<std::size_t>(u.boundary.size()) != grid.num_boundary()) {
    throw Error(ErrorCode::DimensionMismatch, "grid function does not match the grid");
  }
  const auto nodes = grid.nodes();
  const std::size_t n = nodes.size();
  std::vector<Point> pos(n);
  std::vector<double> val(n);
  for (std::size_t k = 0; k < n; ++k) {
    const bool inner = grid.is_interior(k);
    pos[k] = inner ? nodes[k].pos : nodes[k].trace;
    val[k] = inner ? u.interior[static_cast<Eigen::Index>(k)]
                   : u.boundary[static_cast<Eigen::Index>(k - grid.num_interior())];
  }
  const double half_alpha = 0.5 * alpha;
  auto quotient = [&](std::size_t a, std::size_t b) {
    const double du = std::abs(val[a] - val[b]);
    if (du == 0.0) return 0.0;
    const double dx = pos[a].x - pos[b].x;
    const double dy = pos[a].y - pos[b].y;
    const double d2 = dx * dx + dy * dy;
    if (d2 == 0.0) return 0.0;  // two boundary nodes sharing a trace
    return du / std::pow(d2, half_alpha);
  };
  double best = 0.0;
  if (n <= pair_scan_limit) {
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) best = std::max(best, quotient(a, b));
    }
    return best;
  }
  CounterRng rng(seed, "holder_pairs");
  for (std::size_t s = 0; s < sampled_pairs; ++s) {
    const std::size_t a = rng.next() % n;
    const std::size_t b = rng.next() % n;
    best = std::max(best, quotient(a, b));
  }
  return best;
}

double largest_stable_holder_exponent(const GridFunction& coarse, const DomainGrid& coarse_grid,
                                      const GridFunction& fine, const DomainGrid& fine_grid, double ratio) {
  double found = 0.0;
  for (int k = 1; k <= 9; ++k) {
    const double alpha = 0.1 * k;
    const double sc = holder_seminorm(coarse, coarse_grid, alpha);
    const double sf = holder_seminorm(fine, fine_grid, alpha);
    if (sf <= ratio * sc) found = alpha;
  }
  return found;
}

Vector sample_interior(const CoeffExpr& e, const DomainGrid& grid) {
  Vector v(static_cast<Eigen::Index>(grid.num_interior()));
  const auto nodes = grid.interior();
  for (std::size_t k = 0; k < nodes.size(); ++k) v[static_cast<Eigen::Index>(k)] = e(nodes[k].pos.x, nodes[k].pos.y);
  return v;
}

Vector sample_boundary(const CoeffExpr& e, const DomainGrid& grid) {
  Vector v(static_cast<Eigen::Index>(grid.num_boundary()));
  const auto nodes = grid.boundary();
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    v[static_cast<Eigen::Index>(k)] = e(nodes[k].trace.x, nodes[k].trace.y);
  }
  return v;
}

}  // namespace ndlab
