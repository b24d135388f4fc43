#include "ndlab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "ndlab/elliptic.hpp"
#include "ndlab/error.hpp"
#include "ndlab/parallel.hpp"
#include "ndlab/rng.hpp"

namespace ndlab {

using nlohmann::json;

namespace {

struct Skip {
  std::string reason;
};

struct Context {
  const ExperimentConfig& config;
  const Problem& base;
  const Problem& fine;
};

Vector random_vector(CounterRng& rng, Eigen::Index n, double lo, double hi) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.uniform(lo, hi);
  return v;
}

ComplexVector random_complex(CounterRng& rng, Eigen::Index n) {
  ComplexVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double re = rng.uniform(-1.0, 1.0);
    const double im = rng.uniform(-1.0, 1.0);
    v[i] = {re, im};
  }
  return v;
}

void require_monotone(const DiscreteOperator& op) {
  if (!op.certified()) throw Error(ErrorCode::NotMonotone, "operator is not monotone under this scheme");
}

void require_size(const DiscreteOperator& op, Eigen::Index limit, const char* what) {
  if (op.size() > limit) {
    throw Skip{std::string(what) + " limited to " + std::to_string(limit) + " unknowns"};
  }
}

Vector smooth_profile(const DomainGrid& grid) {
  return sample_interior(CoeffExpr::parse("sin(pi*x)*sin(pi*y)"), grid);
}

bool has_drift(const CoefficientExprs& e) {
  const CoeffExpr zero = CoeffExpr::constant(0.0);
  return !(e.b1 == zero) || !(e.b2 == zero);
}

std::size_t central_node(const DomainGrid& grid) {
  double mx = 0.0, my = 0.0;
  for (const auto& n : grid.interior()) {
    mx += n.pos.x;
    my += n.pos.y;
  }
  const double count = static_cast<double>(grid.num_interior());
  const Point mean{mx / count, my / count};
  std::size_t best = 0;
  double best_d = INFINITY;
  for (std::size_t k = 0; k < grid.num_interior(); ++k) {
    const double d = distance(grid.interior()[k].pos, mean);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

using CheckFn = std::function<void(const Context&, CheckRecord&, CounterRng&)>;

struct CheckDef {
  CheckInfo info;
  CheckFn run;
};

void set(CheckRecord& r, bool pass) { r.status = pass ? CheckStatus::Pass : CheckStatus::Fail; }

const std::vector<CheckDef>& battery() {
  static const std::vector<CheckDef> checks = {
      {{"ellipticity", "uniform ellipticity"},
       [](const Context& c, CheckRecord& r, CounterRng&) {
         const auto cert = check_ellipticity(c.base.field, *c.base.grid);
         r.measured = {{"min_eigenvalue", cert.min_eigenvalue},
                       {"min_quadform", cert.min_quadform},
                       {"worst_node", cert.worst_node}};
         r.tolerances = {{"lambda", c.config.lambda}};
         set(r, cert.pass);
       }},
      {{"monotonicity", "monotone scheme and M-matrix structure"},
       [](const Context& c, CheckRecord& r, CounterRng&) {
         const auto m = monotonicity_certificate(c.base.op);
         r.measured = {{"min_offdiagonal", m.min_offdiagonal},
                       {"max_diagonal", m.max_diagonal},
                       {"slack", m.slack},
                       {"worst_node", m.worst_node}};
         r.tolerances = {{"min_offdiagonal", 0.0}};
         set(r, m.monotone);
       }},
      {{"dissipativity", "m-dissipativity"},
       [](const Context& c, CheckRecord& r, CounterRng&) {
         const auto d = dissipativity_check(c.base.op, {0.1, 1.0, 10.0, 100.0});
         r.measured = {{"lambdas", d.lambdas}, {"lambda_times_norm", d.values}, {"method", d.method}};
         r.tolerances = {{"max", 1.0 + 1e-12}};
         set(r, d.pass);
       }},
      {{"resolvent_positivity", "positivity of the resolvent"},
       [](const Context& c, CheckRecord& r, CounterRng&) {
         require_monotone(c.base.op);
         bool pass = true;
         json per = json::array();
         for (double lambda : {0.1, 1.0, 10.0}) {
           const auto p = positivity_check(c.base.op, lambda, 20, c.config.seed);
           per.push_back({{"lambda", lambda},
                          {"min_solution_entry", p.min_solution_entry},
                          {"min_inverse_entry", p.dense_checked ? json(p.min_inverse_entry) : json(nullptr)}});
           pass = pass && p.pass;
         }
         r.measured = {{"per_lambda", per}, {"trials", 20}};
         r.tolerances = {{"min_entry", -1e-12}};
         set(r, pass);
       }},
      {{"aleksandrov", "Aleksandrov maximum principle"},
       [](const Context& c, CheckRecord& r, CounterRng& rng) {
         require_monotone(c.base.op);
         require_monotone(c.fine.op);
         require_size(c.base.op, 6000, "calibration");
         const double c1 = sup_over_l2_constant(c.base.op);
         bool pass = true;
         double worst = 0.0;
         const Problem* problems[] = {&c.base, &c.fine};
         for (const Problem* p : problems) {
           for (int trial = 0; trial < 20; ++trial) {
             const Vector f = random_vector(rng, p->op.size(), -1.0, 1.0);
             // Odd trials add small boundary data; even ones isolate the source term.
             const Eigen::Index nb = p->op.boundary_coupling().cols();
             const Vector g = trial % 2 ? random_vector(rng, nb, -0.1, 0.1) : Vector(Vector::Zero(nb));
             const EllipticSolution u = solve_full_problem(p->op, f, g);
             const auto rep = aleksandrov_check(p->op, u, f, g, c1, 1.25);
             worst = std::max(worst, rep.measured_c1);
             pass = pass && rep.pass;
           }
           const Vector f = -random_vector(rng, p->op.size(), 0.0, 1.0);
           const Vector g = Vector::Zero(p->op.boundary_coupling().cols());
           const auto rep = aleksandrov_check(p->op, solve_poisson(p->op, f), f, g, c1, 1.25);
           pass = pass && rep.pass;
         }
         r.measured = {{"c1_calibrated", c1}, {"max_measured_c1", worst}};
         r.tolerances = {{"factor", 1.25}, {"sign_case_max", 1e-12}};
         set(r, pass);
       }},
      {{"harmonic_max_principle", "maximum principle for A-harmonic functions"},
       [](const Context& c, CheckRecord& r, CounterRng& rng) {
         require_monotone(c.base.op);
         double worst = -INFINITY;
         for (int trial = 0; trial < 10; ++trial) {
           const Vector g = random_vector(rng, c.base.op.boundary_coupling().cols(), -1.0, 1.0);
           const auto u = solve_dirichlet_direct(c.base.op, g);
           worst = std::max(worst, sup_norm(u.u.interior) - sup_norm(g));
         }
         r.measured = {{"max_interior_minus_boundary", worst}};
         r.tolerances = {{"max", 1e-12}};
         set(r, worst <= 1e-12);
       }},
      {{"shift_consistency", "invertibility of mu - A for every mu >= 0"},
       [](const Context& c, CheckRecord& r, CounterRng& rng) {
         const DiscreteOperator& op = c.base.op;
         const Vector zero_g = Vector::Zero(op.boundary_coupling().cols());
         double worst = 0.0;
         for (double mu : {0.0, 0.5, 1.0, 10.0, 100.0}) {
           const Vector f = random_vector(rng, op.size(), -1.0, 1.0);
           const auto s = solve_poisson(op, f, mu);
           const Vector back = mu * s.u.interior - apply(op, s.u.interior, zero_g);
           worst = std::max(worst, (back - f).norm() / f.norm());
         }
         r.measured = {{"max_relative_round_trip", worst}};
         r.tolerances = {{"max", 1e-10}};
         set(r, worst <= 1e-10);
       }},
      {{"uniform_bound", "uniform sup-norm bound for mu - A"},
       [](const Context& c, CheckRecord& r, CounterRng&) {
         require_size(c.fine.op, 6000, "dense sup/L2 constant");
         double cb = 0.0, cf = 0.0;
         for (double mu : {0.0, 0.5, 1.0, 10.0, 100.0}) {
           cb = std::max(cb, sup_over_l2_constant(c.base.op, mu));
           cf = std::max(cf, sup_over_l2_constant(c.fine.op, mu));
         }
         r.measured = {{"C_h", cb}, {"C_h_half", cf}};
         r.tolerances = {{"max_ratio", 1.25}};
         set(r, cf <= 1.25 * cb);
       }},
      {{"ball_equivalence", "Dirichlet problem through an enclosing ball"},
       [](const Context& c, CheckRecord& r, CounterRng& rng) {
         const DiscreteOperator& op = c.base.op;
         double worst = 0.0;
         for (int trial = 0; trial < 3; ++trial) {
           const Vector f = random_vector(rng, op.size(), -1.0, 1.0);
           const Vector g = random_vector(rng, op.boundary_coupling().cols(), -1.0, 1.0);
           const auto direct = solve_full_problem(op, f, g);
           const auto ball = dirichlet_via_ball(c.base.grid, c.base.field, c.config.scheme, f, g, 0.5);
           worst = std::max(worst, sup_norm(Vector(direct.u.interior - ball.u.interior)));
         }
         r.measured = {{"max_sup_difference", worst}};
         r.tolerances = {{"max", 5e-9}};
         set(r, worst <= 5e-9);
       }},
      {{"complex_max_principle", "maximum principle for the complexified operator"},
       [](const Context& c, CheckRecord& r, CounterRng&) {
         const auto rep = complex_max_principle_trials(c.base.op, {{1.0, 0.0}, {1.0, 2.0}, {0.1, 5.0}}, 50,
                                                       c.config.seed);
         r.measured = {{"trials", rep.trials}, {"failures", rep.failures}, {"worst_margin", rep.worst_margin}};
         r.tolerances = {{"margin", 1e-12}};
         set(r, rep.pass);
       }},
      {{"sector_sweep", "bounded holomorphic semigroup (sectorial resolvent bound)"},
       [](const Context& c, CheckRecord& r, CounterRng&) {
         SweepConfig sweep;
         sweep.norm.seed = c.config.seed;
         const auto coarse = sector_sweep(c.base.op, sweep);
         const auto fine = sector_sweep(c.fine.op, sweep);
         const double ratio = coarse.M_measured / fine.M_measured;
         r.measured = {{"M_h", coarse.M_measured},
                       {"M_h_half", fine.M_measured},
                       {"ratio", ratio},
                       {"omega", coarse.omega},
                       {"failures", coarse.failures + fine.failures},
                       {"real_ray_max", coarse.real_ray_max},
                       {"holomorphy_angle_deg", coarse.holomorphy_angle_deg}};
         r.tolerances = {{"ratio_min", 0.5}, {"ratio_max", 2.0}};
         set(r, coarse.finite && fine.finite && ratio >= 0.5 && ratio <= 2.0);
       }},
      {{"yosida_convergence", "Yosida approximation of the semigroup"},
       [](const Context& c, CheckRecord& r, CounterRng&) {
         const DiscreteOperator& op = c.base.op;
         const Vector u0 = smooth_profile(op.grid());
         const auto ref = reference_evolution(op, u0, 0.1);
         const double e16 = sup_norm(Vector(yosida_evolve(op, u0, 0.1, 16) - ref.u));
         const double e256 = sup_norm(Vector(yosida_evolve(op, u0, 0.1, 256) - ref.u));
         r.measured = {{"error_n16", e16}, {"error_n256", e256}, {"reference", ref.method}};
         r.tolerances = {{"max_ratio", 0.25}};
         set(r, e256 < 0.25 * e16);
       }},
      {{"strict_positivity", "strict positivity of the semigroup"},
       [](const Context& c, CheckRecord& r, CounterRng&) {
         const DiscreteOperator& op = c.base.op;
         Vector f = Vector::Zero(op.size());
         f[static_cast<Eigen::Index>(central_node(op.grid()))] = 1.0;
         const auto rep = strict_positivity_check(op, f);
         r.measured = {{"times", rep.times}, {"min_values", rep.min_values}};
         r.tolerances = {{"min_exclusive", 0.0}, {"steps", 1024}};
         set(r, rep.pass);
       }},
      {{"compactness", "compact resolvent"},
       [](const Context& c, CheckRecord& r, CounterRng&) {
         require_size(c.base.op, 2500, "singular value decomposition");
         const auto coarse = compactness_proxy(c.base.op, 1.0);
         r.measured = {{"ratio_quarter", coarse.ratio_quarter}, {"ratio_half", coarse.ratio_half}};
         bool pass = coarse.ratio_half < 1.0;
         if (c.fine.op.size() <= 2500) {
           const auto fine = compactness_proxy(c.fine.op, 1.0);
           r.measured["ratio_half_refined"] = fine.ratio_half;
           pass = pass && fine.ratio_half < coarse.ratio_half;
         }
         r.tolerances = {{"refined_ratio_decreases", true}};
         set(r, pass);
       }},
      {{"gradient_bound", "gradient bound on the generator domain"},
       [](const Context& c, CheckRecord& r, CounterRng& rng) {
         const DomainGrid& grid = c.base.op.grid();
         std::vector<GridFunction> family;
         family.push_back({smooth_profile(grid), Vector::Zero(static_cast<Eigen::Index>(grid.num_boundary()))});
         for (int k = 0; k < 50; ++k) {
           const double cx = rng.uniform(0.1, 0.9);
           const double cy = rng.uniform(0.1, 0.9);
           const double w = rng.uniform(0.05, 0.2);
           auto bump = [&](Point p) {
             return std::exp(-((p.x - cx) * (p.x - cx) + (p.y - cy) * (p.y - cy)) / (2.0 * w * w));
           };
           GridFunction u{Vector(grid.num_interior()), Vector(grid.num_boundary())};
           for (std::size_t i = 0; i < grid.num_interior(); ++i) u.interior[i] = bump(grid.interior()[i].pos);
           for (std::size_t i = 0; i < grid.num_boundary(); ++i) u.boundary[i] = bump(grid.boundary()[i].trace);
           family.push_back(std::move(u));
         }
         const auto rep = gradient_bound_probe(c.base.op, family);
         r.measured = {{"epsilons", rep.epsilons}, {"c_eps", rep.c_eps}};
         r.tolerances = {{"finite", true}, {"nonincreasing_in_eps", true}};
         set(r, rep.pass);
       }},
      {{"divergence_reduction", "reduction of divergence form to non-divergence form"},
       [](const Context& c, CheckRecord& r, CounterRng&) {
         const CoefficientExprs& e = c.config.coefficients;
         std::vector<double> errors;
         bool warning = false;
         for (int level = 0; level < 3; ++level) {
           const double h = c.config.h / (1 << level);
           const DomainGrid grid = build_domain(c.config.domain, h);
           const CoefficientField field = sample_field(e, c.config.lambda, grid);
           errors.push_back(divergence_reduction_error(field, grid, e));
           warning = warning || divergence_reduction(field, grid).lipschitz_warning;
         }
         const auto ord = observed_order(errors);
         const bool smooth = e.a11.smooth() && e.a12.smooth() && e.a22.smooth();
         r.measured = {{"errors", errors},
                       {"order", ord.exact ? json("exact") : json(ord.order)},
                       {"lipschitz_warning", warning},
                       {"smooth_coefficients", smooth}};
         r.tolerances = {{"min_order", 1.9}, {"roundoff_floor", kRoundoffFloor}};
         set(r, smooth ? (ord.exact || ord.order >= 1.9) : !warning);
       }},
      {{"mollification", "mollified coefficients"},
       [](const Context& c, CheckRecord& r, CounterRng&) {
         const DomainGrid& grid = *c.base.grid;
         // A kernel of support 1/k <= h is a single tap; k = 8 and k = 16 would tie.
         if (1.0 / 8 <= grid.h()) throw Skip{"mollifier support 1/8 not resolved at this h"};
         const EnclosingBall ball = enclosing_ball(grid, 0.5);
         const CoefficientField ext = extend_to_ball(c.base.field, grid, ball, ExtensionRecipe{0.25});
         std::vector<double> dist, min_eig;
         bool elliptic = true;
         for (int k : {4, 8, 16}) {
           const CoefficientField m = mollify(ext, ball, MollifierSpec{k});
           double lo = INFINITY;
           for (std::size_t i = 0; i < m.size(); ++i) lo = std::min(lo, min_eigenvalue(m.a11[i], m.a12[i], m.a22[i]));
           min_eig.push_back(lo);
           elliptic = elliptic && lo >= 0.5 * c.config.lambda - 1e-12;
           dist.push_back(sup_distance(m, c.base.field));
         }
         const bool decreasing = dist[0] > dist[1] && dist[1] > dist[2];
         r.measured = {{"k", {4, 8, 16}}, {"sup_distance", dist}, {"min_eigenvalue", min_eig}};
         r.tolerances = {{"min_eigenvalue", 0.5 * c.config.lambda}, {"strictly_decreasing", true}};
         set(r, elliptic && decreasing);
       }},
      {{"extension", "extension of coefficients to a ball"},
       [](const Context& c, CheckRecord& r, CounterRng&) {
         const DomainGrid& grid = *c.base.grid;
         const CoefficientField& field = c.base.field;
         const EnclosingBall ball = enclosing_ball(grid, 0.5);
         const CoefficientField ext = extend_to_ball(field, grid, ball, ExtensionRecipe{0.25});
         bool copied = true;
         std::vector<char> inside(ext.size(), 0);
         for (std::size_t k = 0; k < grid.num_nodes(); ++k) {
           const auto b = static_cast<Eigen::Index>(ball.injection[k]);
           const auto s = static_cast<Eigen::Index>(k);
           inside[static_cast<std::size_t>(b)] = 1;
           copied = copied && ext.a11[b] == field.a11[s] && ext.a12[b] == field.a12[s] &&
                    ext.a22[b] == field.a22[s] && ext.b1[b] == field.b1[s] && ext.b2[b] == field.b2[s] &&
                    ext.c[b] == field.c[s];
         }
         bool zero_outside = true;
         double lo = INFINITY;
         for (std::size_t i = 0; i < ext.size(); ++i) {
           const auto e = static_cast<Eigen::Index>(i);
           lo = std::min(lo, min_eigenvalue(ext.a11[e], ext.a12[e], ext.a22[e]));
           if (!inside[i]) zero_outside = zero_outside && ext.b1[e] == 0.0 && ext.b2[e] == 0.0 && ext.c[e] == 0.0;
         }
         r.measured = {{"bit_exact_on_domain", copied}, {"lower_order_zero_outside", zero_outside},
                       {"min_eigenvalue", lo}, {"ball_radius", ball.radius}};
         r.tolerances = {{"min_eigenvalue", 0.5 * c.config.lambda}};
         set(r, copied && zero_outside && lo >= 0.5 * c.config.lambda - 1e-12);
       }},
      {{"holder_stability", "interior Hoelder regularity"},
       [](const Context& c, CheckRecord& r, CounterRng&) {
         const CoeffExpr one = CoeffExpr::constant(1.0);
         const auto ub = solve_poisson(c.base.op, sample_interior(one, *c.base.grid));
         const auto uf = solve_poisson(c.fine.op, sample_interior(one, *c.fine.grid));
         const double sb = holder_seminorm(ub.u, *c.base.grid, 0.4, 20000, c.config.seed);
         const double sf = holder_seminorm(uf.u, *c.fine.grid, 0.4, 20000, c.config.seed);
         const double alpha = largest_stable_holder_exponent(ub.u, *c.base.grid, uf.u, *c.fine.grid);
         r.measured = {{"seminorm_h", sb}, {"seminorm_h_half", sf}, {"largest_stable_alpha", alpha}};
         r.tolerances = {{"alpha", 0.4}, {"max_ratio", 1.5}};
         set(r, sf <= 1.5 * sb);
       }},
      {{"consistency_order", "consistency of the difference scheme"},
       [](const Context& c, CheckRecord& r, CounterRng&) {
         const CoeffExpr u = CoeffExpr::parse("sin(pi*x)*cos(pi*y/2) + exp(x*y)/2");
         std::vector<double> errors;
         for (int level = 0; level < 3; ++level) {
           const Problem p = build_problem(c.config, c.config.h / (1 << level));
           errors.push_back(truncation_error(p.op, c.config.coefficients, u));
         }
         const auto ord = observed_order(errors);
         const double expected =
             c.config.scheme == Scheme::Upwind && has_drift(c.config.coefficients) ? 0.9 : 1.9;
         r.measured = {{"errors", errors}, {"order", ord.exact ? json("exact") : json(ord.order)}};
         r.tolerances = {{"min_order", expected}};
         set(r, ord.exact || ord.order >= expected);
       }},
      {{"resolvent_identity", "resolvent identity"},
       [](const Context& c, CheckRecord& r, CounterRng& rng) {
         const DiscreteOperator& op = c.base.op;
         const std::pair<Complex, Complex> pairs[] = {{{1, 0}, {2, 0}}, {{1, 1}, {3, 0}}, {{10, 0}, {0.1, 0}}};
         double worst = 0.0;
         for (const auto& [l, m] : pairs) {
           const ComplexSolver rl(op, l);
           const ComplexSolver rm(op, m);
           for (int k = 0; k < 20; ++k) {
             const ComplexVector f = random_complex(rng, op.size());
             const ComplexVector lhs = rl.solve(f) - rm.solve(f);
             const ComplexVector rhs = (m - l) * rl.solve(rm.solve(f));
             worst = std::max(worst, (lhs - rhs).norm() / std::max(lhs.norm(), rhs.norm()));
           }
         }
         r.measured = {{"max_relative_error", worst}};
         r.tolerances = {{"max", 1e-8}};
         set(r, worst <= 1e-8);
       }},
      {{"semigroup_property", "semigroup property"},
       [](const Context& c, CheckRecord& r, CounterRng& rng) {
         const DiscreteOperator& op = c.base.op;
         const Vector u0 = random_vector(rng, op.size(), 0.0, 1.0);
         const Vector joint = evolve_backward_euler(op, u0, 0.15, 192);
         const Vector split = evolve_backward_euler(op, evolve_backward_euler(op, u0, 0.05, 64), 0.1, 128);
         const double aligned = sup_norm(Vector(joint - split));
         std::vector<double> misaligned;
         for (int steps : {15, 60, 240}) {
           const Vector a = evolve_backward_euler(op, u0, 0.15, steps);
           const Vector b = evolve_backward_euler(op, evolve_backward_euler(op, u0, 0.05, steps), 0.1, steps);
           misaligned.push_back(sup_norm(Vector(a - b)));
         }
         r.measured = {{"aligned_difference", aligned}, {"misaligned_differences", misaligned}};
         r.tolerances = {{"aligned_max", 1e-12}};
         set(r, aligned <= 1e-12 && misaligned[2] < misaligned[0]);
       }},
      {{"restriction_consistency", "restriction of the semigroup to functions vanishing on the boundary"},
       [](const Context& c, CheckRecord& r, CounterRng& rng) {
         const DiscreteOperator& op = c.base.op;
         const DomainGrid& grid = op.grid();
         Vector u0 = random_vector(rng, op.size(), 0.0, 1.0);
         for (std::size_t k = 0; k < grid.num_interior(); ++k) {
           const GridNode& n = grid.interior()[k];
           for (int dj = -1; dj <= 1; ++dj) {
             for (int di = -1; di <= 1; ++di) {
               const int nb = grid.find(n.i + di, n.j + dj);
               if (nb >= 0 && !grid.is_interior(static_cast<std::size_t>(nb))) u0[static_cast<Eigen::Index>(k)] = 0.0;
             }
           }
         }
         const Vector zero = Vector::Zero(op.boundary_coupling().cols());
         const Vector a = evolve_backward_euler(op, u0, 0.1, 64, &zero);
         const Vector b = evolve_backward_euler(op, u0, 0.1, 64);
         const bool identical = (a.array() == b.array()).all();
         r.measured = {{"bit_identical", identical}};
         r.tolerances = {{"bit_identical", true}};
         set(r, identical);
       }},
  };
  return checks;
}

}  // namespace

std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Skipped: return "skipped";
  }
  return {};
}

const std::vector<CheckInfo>& verify_checks() {
  static const std::vector<CheckInfo> infos = [] {
    std::vector<CheckInfo> out;
    for (const auto& d : battery()) out.push_back(d.info);
    return out;
  }();
  return infos;
}

VerifyReport run_verify(const ExperimentConfig& config, int jobs) {
  const Problem base = build_problem(config);
  const Problem fine = build_problem(config, config.h / 2.0);
  const Context ctx{config, base, fine};
  const auto& defs = battery();
  VerifyReport report;
  report.checks.resize(defs.size());
  parallel_for(defs.size(), jobs, [&](std::size_t k) {
    CheckRecord& r = report.checks[k];
    r.name = defs[k].info.name;
    r.anchor = defs[k].info.anchor;
    CounterRng rng(config.seed, r.name);
    try {
      defs[k].run(ctx, r, rng);
    } catch (const Skip& s) {
      r.status = CheckStatus::Skipped;
      r.message = s.reason;
    } catch (const Error& e) {
      const bool gate = e.code() == ErrorCode::NotMonotone || e.code() == ErrorCode::DisconnectedDomain;
      r.status = gate ? CheckStatus::Skipped : CheckStatus::Fail;
      r.message = e.what();
    } catch (const std::exception& e) {
      r.status = CheckStatus::Fail;
      r.message = e.what();
    }
  });
  for (const auto& r : report.checks) {
    switch (r.status) {
      case CheckStatus::Pass: ++report.passed; break;
      case CheckStatus::Fail: ++report.failed; break;
      case CheckStatus::Skipped: ++report.skipped; break;
    }
  }
  return report;
}

json report_to_json(const VerifyReport& report, const ExperimentConfig& config) {
  ExperimentConfig echo = config;
  echo.output.clear();
  json j;
  j["config"] = config_to_json(echo);
  j["checks"] = json::array();
  for (const auto& r : report.checks) {
    json c = {{"name", r.name},
              {"paper_anchor", r.anchor},
              {"status", to_string(r.status)},
              {"measured", r.measured},
              {"tolerances", r.tolerances}};
    if (!r.message.empty()) c["message"] = r.message;
    j["checks"].push_back(c);
  }
  j["summary"] = {{"passed", report.passed},
                  {"failed", report.failed},
                  {"skipped", report.skipped},
                  {"total", report.checks.size()}};
  return j;
}

double truncation_error(const DiscreteOperator& op, const CoefficientExprs& e, const CoeffExpr& u) {
  const DomainGrid& grid = op.grid();
  Vector ui(static_cast<Eigen::Index>(grid.num_interior()));
  Vector ub(static_cast<Eigen::Index>(grid.num_boundary()));
  for (std::size_t k = 0; k < grid.num_interior(); ++k) {
    ui[static_cast<Eigen::Index>(k)] = u(grid.interior()[k].pos.x, grid.interior()[k].pos.y);
  }
  for (std::size_t k = 0; k < grid.num_boundary(); ++k) {
    ub[static_cast<Eigen::Index>(k)] = u(grid.boundary()[k].pos.x, grid.boundary()[k].pos.y);
  }
  const Vector discrete = apply(op, ui, ub);
  double worst = 0.0;
  for (std::size_t k = 0; k < grid.num_interior(); ++k) {
    const Point p = grid.interior()[k].pos;
    const Jet d = u.jet(p.x, p.y);
    const double exact = e.a11(p.x, p.y) * d.dxx + 2.0 * e.a12(p.x, p.y) * d.dxy + e.a22(p.x, p.y) * d.dyy +
                         e.b1(p.x, p.y) * d.dx + e.b2(p.x, p.y) * d.dy + e.c(p.x, p.y) * d.v;
    worst = std::max(worst, std::abs(discrete[static_cast<Eigen::Index>(k)] - exact));
  }
  return worst;
}

double divergence_reduction_error(const CoefficientField& field, const DomainGrid& grid,
                                  const CoefficientExprs& e) {
  const ReducedDrift drift = divergence_reduction(field, grid);
  double worst = 0.0;
  for (std::size_t k = 0; k < grid.num_interior(); ++k) {
    const Point p = grid.interior()[k].pos;
    const Jet a11 = e.a11.jet(p.x, p.y);
    const Jet a12 = e.a12.jet(p.x, p.y);
    const Jet a22 = e.a22.jet(p.x, p.y);
    const double b1 = e.b1(p.x, p.y) - a11.dx - a12.dy;
    const double b2 = e.b2(p.x, p.y) - a12.dx - a22.dy;
    const auto i = static_cast<Eigen::Index>(k);
    worst = std::max({worst, std::abs(drift.b1[i] - b1), std::abs(drift.b2[i] - b2)});
  }
  return worst;
}

OrderEstimate observed_order(const std::vector<double>& errors) {
  OrderEstimate est;
  if (std::all_of(errors.begin(), errors.end(), [](double e) { return e <= kRoundoffFloor; })) {
    est.exact = true;
    est.order = std::numeric_limits<double>::infinity();
    return est;
  }
  est.order = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < errors.size(); ++k) {
    est.order = std::min(est.order, std::log2(errors[k] / errors[k + 1]));
  }
  return est;
}

}  // namespace ndlab
