#include "ndlab/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "ndlab/error.hpp"
#include "ndlab/parallel.hpp"
#include "ndlab/rng.hpp"

namespace ndlab {

namespace {

template <class Scalar>
double column_norm1(const Eigen::SparseMatrix<Scalar>& m) {
  double best = 0.0;
  for (Eigen::Index c = 0; c < m.outerSize(); ++c) {
    double s = 0.0;
    for (typename Eigen::SparseMatrix<Scalar>::InnerIterator it(m, c); it; ++it) s += std::abs(it.value());
    best = std::max(best, s);
  }
  return best;
}

template <class Scalar>
Scalar unit_sign(Scalar v) {
  const double a = std::abs(v);
  return a == 0.0 ? Scalar(1.0) : v / a;
}

template <class Scalar>
double condition_estimate_impl(const ShiftedSolver<Scalar>& solver) {
  using VectorS = typename ShiftedSolver<Scalar>::VectorS;
  const Eigen::Index n = solver.size();
  if (n == 0) return 0.0;
  VectorS x = VectorS::Constant(n, Scalar(1.0 / static_cast<double>(n)));
  double estimate = 0.0;
  for (int iter = 0; iter < 5; ++iter) {
    const VectorS y = solver.solve(x);
    const double next = y.cwiseAbs().sum();
    if (iter > 0 && next <= estimate) break;
    estimate = next;
    VectorS xi = y.unaryExpr([](Scalar v) { return unit_sign(v); });
    const VectorS z = solver.solve_transposed(VectorS(xi.conjugate())).conjugate();
    Eigen::Index j = 0;
    const double zmax = z.cwiseAbs().maxCoeff(&j);
    if (iter > 0 && zmax <= std::real(z.dot(x))) break;
    x = VectorS::Zero(n);
    x[j] = Scalar(1.0);
  }
  return column_norm1(solver.matrix()) * estimate;
}

template <class Scalar>
Scalar random_entry(CounterRng& rng);
template <>
double random_entry<double>(CounterRng& rng) {
  return rng.uniform(-1.0, 1.0);
}
template <>
Complex random_entry<Complex>(CounterRng& rng) {
  const double re = rng.uniform(-1.0, 1.0);
  const double im = rng.uniform(-1.0, 1.0);
  return {re, im};
}

template <class Scalar>
double inverse_inf_norm(const ShiftedSolver<Scalar>& solver, const NormOptions& options, NormMethod& method,
                        int& probes) {
  using VectorS = typename ShiftedSolver<Scalar>::VectorS;
  const Eigen::Index n = solver.size();
  if (n <= options.dense_limit) {
    method = NormMethod::DenseInverse;
    probes = 0;
    return solver.dense_inverse().cwiseAbs().rowwise().sum().maxCoeff();
  }
  method = NormMethod::NormEstimator;
  probes = options.probes;
  CounterRng rng(options.seed, "norm_estimator");
  double best = 0.0;
  for (int p = 0; p < options.probes; ++p) {
    VectorS x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = random_entry<Scalar>(rng);
    const VectorS y = solver.solve(x);
    Eigen::Index row = 0;
    y.cwiseAbs().maxCoeff(&row);
    VectorS e = VectorS::Zero(n);
    e[row] = Scalar(1.0);
    best = std::max(best, solver.solve_transposed(e).cwiseAbs().sum());
  }
  return best;
}

Vector yosida_generator(const RealSolver& solver, const Vector& u, double n) {
  return n * n * solver.solve(u) - n * u;
}

}  // namespace

double condition_estimate(const RealSolver& solver) { return condition_estimate_impl(solver); }
double condition_estimate(const ComplexSolver& solver) { return condition_estimate_impl(solver); }

ComplexVector resolvent(const DiscreteOperator& op, Complex lambda, const ComplexVector& f,
                        const ResolventOptions& options) {
  if (!(lambda.real() > 0.0)) throw Error(ErrorCode::InvalidArgument, "resolvent needs Re lambda > 0");
  if (f.size() != op.size()) throw Error(ErrorCode::DimensionMismatch, "source does not match the operator");
  ComplexSolver solver(op, lambda, options.solver);
  if (options.check_condition) {
    const double cond = condition_estimate(solver);
    if (!(cond <= options.condition_limit)) {
      throw Error(ErrorCode::NearSingular, "condition estimate " + std::to_string(cond));
    }
  }
  ComplexVector u = solver.solve(f);
  const double r = solver.relative_residual(u, f);
  if (!(r <= options.residual_tolerance)) {
    throw Error(ErrorCode::SolverDivergence, "relative residual " + std::to_string(r));
  }
  return u;
}

std::string to_string(NormMethod m) {
  return m == NormMethod::DenseInverse ? "dense_inverse" : "norm_estimator";
}

ResolventNorm resolvent_norm(const DiscreteOperator& op, Complex lambda, const NormOptions& options) {
  ResolventNorm out;
  double inv = 0.0;
  if (lambda.imag() == 0.0) {
    RealSolver solver(op, lambda.real(), options.solver);
    inv = inverse_inf_norm(solver, options, out.method, out.probes);
  } else {
    ComplexSolver solver(op, lambda, options.solver);
    inv = inverse_inf_norm(solver, options, out.method, out.probes);
  }
  out.value = std::abs(lambda) * inv;
  return out;
}

SectorialReport sector_sweep(const DiscreteOperator& op, const SweepConfig& config) {
  if (config.n_angles < 1 || config.n_moduli < 1 || !(config.min_modulus > 0.0) ||
      !(config.max_modulus >= config.min_modulus) || !(std::abs(config.max_angle_deg) < 90.0)) {
    throw Error(ErrorCode::InvalidArgument, "sweep needs positive counts, moduli > 0 and angles below 90 degrees");
  }
  SectorialReport report;
  report.omega = config.omega;
  for (int a = 0; a < config.n_angles; ++a) {
    const double angle =
        config.n_angles == 1 ? 0.0
                             : -config.max_angle_deg + 2.0 * config.max_angle_deg * a / (config.n_angles - 1);
    for (int m = 0; m < config.n_moduli; ++m) {
      const double r =
          config.n_moduli == 1
              ? config.min_modulus
              : config.min_modulus *
                    std::pow(config.max_modulus / config.min_modulus, static_cast<double>(m) / (config.n_moduli - 1));
      SweepSample s;
      s.angle_deg = angle;
      s.modulus = r;
      const double theta = angle * M_PI / 180.0;
      s.lambda = Complex(config.omega + r * std::cos(theta), angle == 0.0 ? 0.0 : r * std::sin(theta));
      report.samples.push_back(s);
    }
  }

  parallel_for(report.samples.size(), config.jobs, [&](std::size_t k) {
    SweepSample& s = report.samples[k];
    try {
      const ResolventNorm rn = resolvent_norm(op, s.lambda, config.norm);
      s.norm = rn.value;
      s.method = rn.method;
      s.ok = std::isfinite(rn.value);
      if (!s.ok) s.error = "non-finite norm";
    } catch (const std::exception& e) {
      s.ok = false;
      s.error = e.what();
    }
  });

  for (const auto& s : report.samples) {
    if (!s.ok) ++report.failures;
  }
  if (report.failures > 0 && config.omega == 0.0 && config.retry_with_shift) {
    SweepConfig shifted = config;
    shifted.omega = 1.0;
    shifted.retry_with_shift = false;
    return sector_sweep(op, shifted);
  }
  report.finite = report.failures == 0;

  std::map<double, double> by_angle;  // |angle| -> max norm
  bool have_real_ray = false;
  for (const auto& s : report.samples) {
    if (!s.ok) continue;
    report.M_measured = std::max(report.M_measured, s.norm);
    auto& slot = by_angle[std::abs(s.angle_deg)];
    slot = std::max(slot, s.norm);
    if (s.angle_deg == 0.0) {
      have_real_ray = true;
      report.real_ray_max = std::max(report.real_ray_max, s.norm);
    }
  }
  if (!have_real_ray) {
    for (const auto& s : report.samples) {
      report.real_ray_max =
          std::max(report.real_ray_max, resolvent_norm(op, Complex(config.omega + s.modulus, 0.0), config.norm).value);
    }
  }
  for (const auto& [angle, value] : by_angle) {
    if (value >= 2.0 * report.real_ray_max) break;
    report.holomorphy_angle_deg = angle;
  }
  return report;
}

Vector yosida_evolve(const DiscreteOperator& op, const Vector& u0, double t, double n,
                     const YosidaOptions& options) {
  if (!(n > 0.0) || !(t >= 0.0)) throw Error(ErrorCode::InvalidArgument, "Yosida evolution needs n > 0 and t >= 0");
  if (u0.size() != op.size()) throw Error(ErrorCode::DimensionMismatch, "initial datum does not match the operator");
  if (t == 0.0) return u0;
  RealSolver solver(op, n, options.solver);

  if (op.size() <= options.dense_limit && !options.force_substep) {
    DenseMatrix p = (t * n * n) * solver.dense_inverse();
    const double p_norm = p.cwiseAbs().rowwise().sum().maxCoeff();
    const int squarings = p_norm > 0.5 ? static_cast<int>(std::ceil(std::log2(p_norm / 0.5))) : 0;
    p *= std::ldexp(1.0, -squarings);
    const Eigen::Index N = p.rows();
    DenseMatrix e = DenseMatrix::Identity(N, N);
    DenseMatrix term = DenseMatrix::Identity(N, N);
    for (int k = 1; k <= 60; ++k) {
      term = (term * p) / static_cast<double>(k);
      e += term;
      if (term.cwiseAbs().rowwise().sum().maxCoeff() <= 1e-18 * e.cwiseAbs().rowwise().sum().maxCoeff()) break;
    }
    e *= std::exp(-t * n * std::ldexp(1.0, -squarings));
    for (int s = 0; s < squarings; ++s) e = (e * e).eval();
    return e * u0;
  }

  auto rk4 = [&](const Vector& u, double tau) {
    const Vector k1 = yosida_generator(solver, u, n);
    const Vector k2 = yosida_generator(solver, Vector(u + 0.5 * tau * k1), n);
    const Vector k3 = yosida_generator(solver, Vector(u + 0.5 * tau * k2), n);
    const Vector k4 = yosida_generator(solver, Vector(u + tau * k3), n);
    return Vector(u + (tau / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  };
  Vector u = u0;
  double time = 0.0;
  double tau = std::min(t, 1.0 / n);
  int substeps = 0;
  while (time < t) {
    const bool last = tau >= t - time;
    const double step = last ? t - time : tau;
    const Vector full = rk4(u, step);
    const Vector half = rk4(rk4(u, 0.5 * step), 0.5 * step);
    const double err = sup_norm(Vector(half - full)) / 15.0;
    const double scale = std::max(1.0, sup_norm(u));
    if (err <= options.rk_tolerance * scale) {
      u = half + (half - full) / 15.0;
      time = last ? t : time + step;
      if (err < options.rk_tolerance * scale / 64.0) tau = 2.0 * step;
    } else {
      tau = 0.5 * step;
    }
    if (++substeps > options.max_substeps || tau < t * 1e-12) {
      throw Error(ErrorCode::StepRejection, "substep error estimate " + std::to_string(err) + " above tolerance");
    }
  }
  return u;
}

Vector evolve_backward_euler(const DiscreteOperator& op, const Vector& u0, double t, int steps,
                             const Vector* boundary, const SolverOptions& solver_options) {
  if (steps < 1 || !(t >= 0.0)) throw Error(ErrorCode::InvalidArgument, "backward Euler needs steps >= 1, t >= 0");
  if (u0.size() != op.size()) throw Error(ErrorCode::DimensionMismatch, "initial datum does not match the operator");
  if (boundary && boundary->size() != op.boundary_coupling().cols()) {
    throw Error(ErrorCode::DimensionMismatch, "boundary data does not match the operator");
  }
  if (t == 0.0) return u0;
  const double tau = t / steps;
  RealSolver solver(op, 1.0 / tau, solver_options);
  Vector coupled;
  if (boundary) coupled = op.boundary_coupling() * *boundary;
  Vector u = u0;
  for (int k = 0; k < steps; ++k) {
    Vector rhs = u / tau;
    if (boundary) rhs += coupled;
    u = solver.solve(rhs);
  }
  return u;
}

ReferenceEvolution reference_evolution(const DiscreteOperator& op, const Vector& u0, double t) {
  const SparseMatrix& a = op.interior_matrix();
  const bool symmetric = SparseMatrix(a - SparseMatrix(a.transpose())).norm() == 0.0;
  if (symmetric && op.size() <= 2500) {
    if (t == 0.0) return {u0, "eigen_reference"};
    Eigen::SelfAdjointEigenSolver<DenseMatrix> eig{DenseMatrix(a)};
    const DenseMatrix& v = eig.eigenvectors();
    const Vector coeffs = v.transpose() * u0;
    const Vector decay = (t * eig.eigenvalues()).array().exp();
    return {v * coeffs.cwiseProduct(decay), "eigen_reference"};
  }
  return {evolve_backward_euler(op, u0, t, 4096), "backward_euler(4096)"};
}

std::string EvolutionMethod::name() const {
  switch (kind) {
    case Yosida: return "yosida(" + std::to_string(static_cast<long long>(parameter)) + ")";
    case BackwardEuler: return "backward_euler(" + std::to_string(static_cast<long long>(parameter)) + ")";
    case EigenReference: return "eigen_reference";
  }
  return {};
}

EvolutionMethod EvolutionMethod::parse(const std::string& text) {
  auto fail = [&] {
    return Error(ErrorCode::ConfigError, "method '" + text + "': expected yosida:N, be:STEPS or eigen");
  };
  if (text == "eigen") return {EigenReference, 0};
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw fail();
  const std::string head = text.substr(0, colon);
  long long value = 0;
  try {
    std::size_t used = 0;
    value = std::stoll(text.substr(colon + 1), &used);
    if (used != text.size() - colon - 1) throw fail();
  } catch (const std::logic_error&) {
    throw fail();
  }
  if (value < 1) throw fail();
  if (head == "yosida") return {Yosida, static_cast<double>(value)};
  if (head == "be") return {BackwardEuler, static_cast<double>(value)};
  throw fail();
}

SemigroupTrace evolve_trace(const DiscreteOperator& op, const Vector& u0, const std::vector<double>& times,
                            const EvolutionMethod& method) {
  SemigroupTrace trace;
  trace.times = times;
  trace.method = method.name();
  for (double t : times) {
    switch (method.kind) {
      case EvolutionMethod::Yosida: trace.snapshots.push_back(yosida_evolve(op, u0, t, method.parameter)); break;
      case EvolutionMethod::BackwardEuler:
        trace.snapshots.push_back(evolve_backward_euler(op, u0, t, static_cast<int>(method.parameter)));
        break;
      case EvolutionMethod::EigenReference: {
        ReferenceEvolution ref = reference_evolution(op, u0, t);
        trace.method = ref.method;
        trace.snapshots.push_back(std::move(ref.u));
        break;
      }
    }
  }
  return trace;
}

DissipativityReport dissipativity_check(const DiscreteOperator& op, const std::vector<double>& lambdas,
                                        Eigen::Index dense_limit) {
  if (!op.certified()) throw Error(ErrorCode::NotMonotone, "dissipativity check needs a monotone operator");
  DissipativityReport report;
  report.lambdas = lambdas;
  report.pass = true;
  const bool dense = op.size() <= dense_limit;
  report.method = dense ? "dense_inverse" : "row_sum";
  for (double lambda : lambdas) {
    if (!(lambda > 0.0)) throw Error(ErrorCode::InvalidArgument, "dissipativity needs lambda > 0");
    RealSolver solver(op, lambda);
    double norm = 0.0;
    if (dense) {
      norm = solver.dense_inverse().cwiseAbs().rowwise().sum().maxCoeff();
    } else {
      // The inverse is entrywise nonnegative, so its row sums are R * 1.
      norm = solver.solve(Vector::Ones(op.size())).maxCoeff();
    }
    report.values.push_back(lambda * norm);
    report.pass = report.pass && lambda * norm <= 1.0 + 1e-12;
  }
  return report;
}

PositivityReport positivity_check(const DiscreteOperator& op, double lambda, int trials, std::uint64_t seed,
                                  Eigen::Index dense_limit) {
  if (!(lambda >= 0.0)) throw Error(ErrorCode::InvalidArgument, "positivity check needs lambda >= 0");
  PositivityReport report;
  report.trials = trials;
  RealSolver solver(op, lambda);
  CounterRng rng(seed, "positivity");
  double min_entry = INFINITY;
  for (int k = 0; k < trials; ++k) {
    Vector f(op.size());
    for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = rng.uniform();
    min_entry = std::min(min_entry, solver.solve(f).minCoeff());
  }
  report.min_solution_entry = trials > 0 ? min_entry : 0.0;
  report.min_inverse_entry = NAN;
  report.pass = report.min_solution_entry >= -1e-12;
  if (op.size() <= dense_limit) {
    report.dense_checked = true;
    report.min_inverse_entry = solver.dense_inverse().minCoeff();
    report.pass = report.pass && report.min_inverse_entry >= -1e-12;
  }
  return report;
}

StrictPositivityReport strict_positivity_check(const DiscreteOperator& op, const Vector& f,
                                               const std::vector<double>& times, int steps) {
  if (!op.certified()) throw Error(ErrorCode::NotMonotone, "strict positivity needs a monotone operator");
  if (!op.grid().interior_connected()) throw Error(ErrorCode::DisconnectedDomain, "interior is not connected");
  if (f.size() != op.size()) throw Error(ErrorCode::DimensionMismatch, "datum does not match the operator");
  StrictPositivityReport report;
  report.times = times;
  if (f.minCoeff() < 0.0) throw Error(ErrorCode::InvalidArgument, "strict positivity needs f >= 0");
  if (f.maxCoeff() == 0.0) {
    report.skipped = true;
    report.pass = true;
    return report;
  }
  report.pass = true;
  for (double t : times) {
    const double m = evolve_backward_euler(op, f, t, steps).minCoeff();
    report.min_values.push_back(m);
    report.pass = report.pass && m > 0.0;
  }
  return report;
}

namespace {

void record_max_principle_trial(ComplexMaxPrincipleReport& report, const ComplexSolver& solver,
                                const DiscreteOperator& op, const ComplexVector& g) {
  const Vector re = op.boundary_coupling() * g.real();
  const Vector im = op.boundary_coupling() * g.imag();
  ComplexVector rhs(re.size());
  rhs.real() = re;
  rhs.imag() = im;
  const ComplexVector u = solver.solve(rhs);
  const double interior = sup_norm(u);
  const double boundary = sup_norm(g);
  ++report.trials;
  const double margin = interior - boundary;
  if (!(interior <= boundary + 1e-12)) ++report.failures;
  if (margin > report.worst_margin) {
    report.worst_margin = margin;
    report.interior_max = interior;
    report.boundary_max = boundary;
  }
}

}  // namespace

ComplexMaxPrincipleReport complex_max_principle_check(const DiscreteOperator& op, Complex lambda,
                                                      const ComplexVector& g) {
  if (!op.certified()) throw Error(ErrorCode::NotMonotone, "maximum principle needs a monotone operator");
  if (!(lambda.real() > 0.0)) throw Error(ErrorCode::InvalidArgument, "maximum principle needs Re lambda > 0");
  if (g.size() != op.boundary_coupling().cols()) {
    throw Error(ErrorCode::DimensionMismatch, "boundary data does not match the operator");
  }
  ComplexMaxPrincipleReport report;
  ComplexSolver solver(op, lambda);
  record_max_principle_trial(report, solver, op, g);
  report.pass = report.failures == 0;
  return report;
}

ComplexMaxPrincipleReport complex_max_principle_trials(const DiscreteOperator& op,
                                                       const std::vector<Complex>& lambdas, int trials,
                                                       std::uint64_t seed) {
  if (!op.certified()) throw Error(ErrorCode::NotMonotone, "maximum principle needs a monotone operator");
  ComplexMaxPrincipleReport report;
  CounterRng rng(seed, "complex_max_principle");
  const Eigen::Index nb = op.boundary_coupling().cols();
  for (Complex lambda : lambdas) {
    if (!(lambda.real() > 0.0)) throw Error(ErrorCode::InvalidArgument, "maximum principle needs Re lambda > 0");
    ComplexSolver solver(op, lambda);
    for (int k = 0; k < trials; ++k) {
      ComplexVector g(nb);
      for (Eigen::Index i = 0; i < nb; ++i) g[i] = random_entry<Complex>(rng);
      record_max_principle_trial(report, solver, op, g);
    }
  }
  report.pass = report.failures == 0;
  return report;
}

double gradient_sup_norm(const DomainGrid& grid, const GridFunction& u) {
  const std::size_t ni = grid.num_interior();
  auto value = [&](int idx) {
    const auto k = static_cast<std::size_t>(idx);
    return k < ni ? u.interior[static_cast<Eigen::Index>(k)] : u.boundary[static_cast<Eigen::Index>(k - ni)];
  };
  const double inv2h = 0.5 / grid.h();
  double best = 0.0;
  for (const GridNode& node : grid.interior()) {
    const int e = grid.find(node.i + 1, node.j);
    const int w = grid.find(node.i - 1, node.j);
    const int n = grid.find(node.i, node.j + 1);
    const int s = grid.find(node.i, node.j - 1);
    if (e >= 0 && w >= 0) best = std::max(best, std::abs(value(e) - value(w)) * inv2h);
    if (n >= 0 && s >= 0) best = std::max(best, std::abs(value(n) - value(s)) * inv2h);
  }
  return best;
}

GradientBoundReport gradient_bound_probe(const DiscreteOperator& op, const std::vector<GridFunction>& family,
                                         const std::vector<double>& epsilons) {
  GradientBoundReport report;
  report.epsilons = epsilons;
  report.c_eps.assign(epsilons.size(), 0.0);
  for (const GridFunction& u : family) {
    const double u_norm = std::max(sup_norm(u.interior), sup_norm(u.boundary));
    if (u_norm == 0.0) continue;
    const double grad = gradient_sup_norm(op.grid(), u);
    const double au = sup_norm(apply(op, u.interior, u.boundary));
    for (std::size_t k = 0; k < epsilons.size(); ++k) {
      report.c_eps[k] = std::max(report.c_eps[k], (grad - epsilons[k] * au) / u_norm);
    }
  }
  report.finite = std::all_of(report.c_eps.begin(), report.c_eps.end(), [](double c) { return std::isfinite(c); });
  report.monotone = true;
  for (std::size_t a = 0; a < epsilons.size(); ++a) {
    for (std::size_t b = 0; b < epsilons.size(); ++b) {
      if (epsilons[a] < epsilons[b] && report.c_eps[a] < report.c_eps[b]) report.monotone = false;
    }
  }
  report.pass = report.finite && report.monotone;
  return report;
}

CompactnessReport compactness_proxy(const DiscreteOperator& op, double lambda, Eigen::Index dense_limit) {
  if (op.size() > dense_limit) {
    throw Error(ErrorCode::InvalidArgument, "compactness proxy limited to " + std::to_string(dense_limit) +
                                                " unknowns");
  }
  RealSolver solver(op, lambda);
  Eigen::BDCSVD<DenseMatrix> svd(solver.dense_inverse());
  const Vector& sv = svd.singularValues();
  CompactnessReport report;
  report.singular_values.assign(sv.data(), sv.data() + sv.size());
  const Eigen::Index n = sv.size();
  const auto ratio_at = [&](Eigen::Index k) { return sv[std::max<Eigen::Index>(1, k) - 1] / sv[0]; };
  report.ratio_quarter = ratio_at(n / 4);
  report.ratio_half = ratio_at(n / 2);
  return report;
}

}  // namespace ndlab
