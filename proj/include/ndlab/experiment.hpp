#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ndlab/coefficient_field.hpp"
#include "ndlab/operator.hpp"
#include "ndlab/semigroup.hpp"

namespace ndlab {

enum class Task { SolveElliptic, SolveDirichlet, ResolventSweep, Evolve, Verify };
std::string to_string(Task t);

struct TaskParams {
  CoeffExpr f = CoeffExpr::constant(0.0);
  CoeffExpr g = CoeffExpr::constant(0.0);
  double mu = 0.0;
  bool via_ball = false;
  double margin = 0.5;
  // evolve
  CoeffExpr u0 = CoeffExpr::parse("sin(pi*x)*sin(pi*y)");
  double t = 0.1;
  std::string method = "yosida:64";
  /// Snapshot times; empty means {0, t}.
  std::vector<double> times;
  // resolvent-sweep
  int sweep_angles = 9;
  double sweep_max_angle_deg = 85.0;
  int sweep_moduli = 13;
  double sweep_min_modulus = 1e-2;
  double sweep_max_modulus = 1e4;
};

struct ExperimentConfig {
  ShapeSpec domain = ShapeSpec::unit_square();
  std::optional<std::string> preset;
  CoefficientExprs coefficients;
  double lambda = 1.0;
  double h = 1.0 / 16.0;
  Scheme scheme = Scheme::Upwind;
  Task task = Task::Verify;
  TaskParams params;
  std::uint64_t seed = 0;
  std::string output;
  int jobs = 1;
};

/// Throws Error(ConfigError) whose message names the offending field both as
/// a JSON pointer ("/coefficients/a11") and in dotted form
/// ("coefficients.a11"), plus the column for expression syntax errors.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& config);
/// Reads and parses a JSON file; malformed JSON is a ConfigError.
ExperimentConfig load_config(const std::string& path);

/// Grid, sampled field and assembled operator of a configuration.
struct Problem {
  std::shared_ptr<const DomainGrid> grid;
  CoefficientField field;
  DiscreteOperator op;
};

Problem build_problem(const ExperimentConfig& config);
Problem build_problem(const ExperimentConfig& config, double h);

GridFunction run_solve_elliptic(const ExperimentConfig& config);
GridFunction run_solve_dirichlet(const ExperimentConfig& config);
SectorialReport run_resolvent_sweep(const ExperimentConfig& config);
SemigroupTrace run_evolve(const ExperimentConfig& config);

/// Columns x, y, u, is_boundary; one row per node, interior first.
void write_solution_csv(std::ostream& out, const DomainGrid& grid, const GridFunction& u);
/// Columns re_lambda, im_lambda, norm, method. Failed samples carry norm "nan".
void write_sweep_csv(std::ostream& out, const SectorialReport& report);
/// Columns t, x, y, u over interior nodes for every snapshot.
void write_trace_csv(std::ostream& out, const DomainGrid& grid, const SemigroupTrace& trace);

/// Human-readable listing of domains and presets.
nlohmann::json catalog_json();

}  // namespace ndlab
