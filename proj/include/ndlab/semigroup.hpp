#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ndlab/linear_solver.hpp"
#include "ndlab/operator.hpp"

namespace ndlab {

struct ResolventOptions {
  SolverOptions solver;
  double residual_tolerance = 1e-10;
  /// Estimated 1-norm condition number above which NearSingular is thrown.
  double condition_limit = 1e14;
  bool check_condition = true;
};

/// Solves (lambda I - A_h) u = f with zero boundary data. Requires Re lambda > 0.
ComplexVector resolvent(const DiscreteOperator& op, Complex lambda, const ComplexVector& f,
                        const ResolventOptions& options = {});

/// Estimated ||M||_1 ||M^-1||_1 for M = shift I - A_h (Hager-Higham iteration).
double condition_estimate(const RealSolver& solver);
double condition_estimate(const ComplexSolver& solver);

enum class NormMethod { DenseInverse, NormEstimator };
std::string to_string(NormMethod m);

struct NormOptions {
  Eigen::Index dense_limit = 2500;
  int probes = 32;
  std::uint64_t seed = 0;
  SolverOptions solver;
};

struct ResolventNorm {
  double value = 0.0;  // ||lambda (lambda - A_h)^-1||_inf
  NormMethod method = NormMethod::DenseInverse;
  int probes = 0;
};

/// Exact max absolute row sum of the dense inverse up to `dense_limit`
/// unknowns. Above, each of `probes` random vectors x selects the row i
/// maximizing |(R x)_i|; that row is then computed exactly by a transposed
/// solve, and the largest row sum found is returned (a lower bound).
ResolventNorm resolvent_norm(const DiscreteOperator& op, Complex lambda, const NormOptions& options = {});

struct SweepConfig {
  int n_angles = 9;
  double max_angle_deg = 85.0;
  int n_moduli = 13;
  double min_modulus = 1e-2;
  double max_modulus = 1e4;
  double omega = 0.0;
  /// Retry the whole sweep with omega = 1 when a sample fails at omega = 0.
  bool retry_with_shift = true;
  int jobs = 1;
  NormOptions norm;
};

struct SweepSample {
  Complex lambda;
  double angle_deg = 0.0;
  double modulus = 0.0;
  double norm = 0.0;
  NormMethod method = NormMethod::DenseInverse;
  bool ok = true;
  std::string error;
};

struct SectorialReport {
  std::vector<SweepSample> samples;
  double M_measured = 0.0;
  double omega = 0.0;
  double real_ray_max = 0.0;
  /// Largest swept |angle| up to which every sample stays below twice the
  /// real-ray maximum.
  double holomorphy_angle_deg = 0.0;
  int failures = 0;
  bool finite = true;
};

/// lambda = omega + r e^{i theta} over evenly spaced theta in
/// [-max_angle, max_angle] and log-spaced r. Failed samples are recorded.
SectorialReport sector_sweep(const DiscreteOperator& op, const SweepConfig& config = {});

struct YosidaOptions {
  Eigen::Index dense_limit = 2500;
  bool force_substep = false;
  double rk_tolerance = 1e-10;
  int max_substeps = 1000000;
  SolverOptions solver;
};

/// e^{t B_n} u0 with B_n = n^2 (n - A_h)^-1 - n, zero boundary data. Dense
/// path: e^{-tn} exp(t n^2 R_n) by scaling and squaring a nonnegative Taylor
/// series. Large systems: adaptive RK4 with step doubling, one resolvent
/// solve per stage; StepRejection when the step size collapses.
Vector yosida_evolve(const DiscreteOperator& op, const Vector& u0, double t, double n,
                     const YosidaOptions& options = {});

/// ((I - tau A_h)^-1)^steps u0 with tau = t / steps. With `boundary`, every
/// step also couples in the fixed boundary values.
Vector evolve_backward_euler(const DiscreteOperator& op, const Vector& u0, double t, int steps,
                             const Vector* boundary = nullptr, const SolverOptions& solver = {});

struct ReferenceEvolution {
  Vector u;
  std::string method;  // "eigen_reference" or "backward_euler(4096)"
};

/// Spectral evaluation when A_h is symmetric and small, else 4096-step
/// backward Euler.
ReferenceEvolution reference_evolution(const DiscreteOperator& op, const Vector& u0, double t);

struct EvolutionMethod {
  enum Kind { Yosida, BackwardEuler, EigenReference } kind = Yosida;
  double parameter = 64;  // n for Yosida, steps for backward Euler

  std::string name() const;
  /// "yosida:N", "be:STEPS" or "eigen". Throws ConfigError.
  static EvolutionMethod parse(const std::string& text);
};

struct SemigroupTrace {
  std::vector<double> times;
  std::vector<Vector> snapshots;  // interior values
  std::string method;
};

SemigroupTrace evolve_trace(const DiscreteOperator& op, const Vector& u0, const std::vector<double>& times,
                            const EvolutionMethod& method);

struct DissipativityReport {
  std::vector<double> lambdas;
  std::vector<double> values;  // lambda ||(lambda - A_h)^-1||_inf
  std::string method;
  bool pass = false;
};

/// Throws NotMonotone without a certificate.
DissipativityReport dissipativity_check(const DiscreteOperator& op, const std::vector<double>& lambdas,
                                        Eigen::Index dense_limit = 2500);

struct PositivityReport {
  int trials = 0;
  double min_solution_entry = 0.0;
  double min_inverse_entry = 0.0;  // NaN when the dense inverse was not formed
  bool dense_checked = false;
  bool pass = false;
};

PositivityReport positivity_check(const DiscreteOperator& op, double lambda, int trials, std::uint64_t seed,
                                  Eigen::Index dense_limit = 2500);

struct StrictPositivityReport {
  std::vector<double> times;
  std::vector<double> min_values;
  bool skipped = false;
  bool pass = false;
};

/// Throws NotMonotone and DisconnectedDomain.
StrictPositivityReport strict_positivity_check(const DiscreteOperator& op, const Vector& f,
                                               const std::vector<double>& times = {0.05, 0.1, 0.5},
                                               int steps = 1024);

struct ComplexMaxPrincipleReport {
  int trials = 0;
  int failures = 0;
  double interior_max = 0.0;  // of the worst trial
  double boundary_max = 0.0;
  /// max over trials of interior_max - boundary_max.
  double worst_margin = -INFINITY;
  bool pass = false;
};

/// (lambda - A_h) u = 0 with boundary values g. Throws NotMonotone.
ComplexMaxPrincipleReport complex_max_principle_check(const DiscreteOperator& op, Complex lambda,
                                                      const ComplexVector& g);
/// `trials` seeded random boundary data per lambda, one factorization per lambda.
ComplexMaxPrincipleReport complex_max_principle_trials(const DiscreteOperator& op,
                                                       const std::vector<Complex>& lambdas, int trials,
                                                       std::uint64_t seed);

/// max over interior nodes and both components of the central difference.
double gradient_sup_norm(const DomainGrid& grid, const GridFunction& u);

struct GradientBoundReport {
  std::vector<double> epsilons;
  std::vector<double> c_eps;
  bool finite = false;
  bool monotone = false;
  bool pass = false;
};

GradientBoundReport gradient_bound_probe(const DiscreteOperator& op, const std::vector<GridFunction>& family,
                                         const std::vector<double>& epsilons = {1.0, 0.1, 0.01});

struct CompactnessReport {
  std::vector<double> singular_values;  // descending
  double ratio_quarter = 0.0;           // sigma_{N/4} / sigma_1
  double ratio_half = 0.0;              // sigma_{N/2} / sigma_1
};

CompactnessReport compactness_proxy(const DiscreteOperator& op, double lambda, Eigen::Index dense_limit = 2500);

}  // namespace ndlab
