#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "ndlab/experiment.hpp"

namespace ndlab {

enum class CheckStatus { Pass, Fail, Skipped };
std::string to_string(CheckStatus s);

struct CheckRecord {
  std::string name;
  std::string anchor;  // the mathematical result the check exercises
  CheckStatus status = CheckStatus::Skipped;
  nlohmann::json measured = nlohmann::json::object();
  nlohmann::json tolerances = nlohmann::json::object();
  std::string message;
};

struct VerifyReport {
  std::vector<CheckRecord> checks;
  int passed = 0;
  int failed = 0;
  int skipped = 0;

  bool any_failed() const { return failed > 0; }
};

struct CheckInfo {
  std::string name;
  std::string anchor;
};

/// Names and anchors of the battery, in report order.
const std::vector<CheckInfo>& verify_checks();

/// Runs every check on the configured domain, coefficients and grid (plus
/// the grid at h/2 where a check compares refinements). Checks run on up to
/// `jobs` threads; the report does not depend on `jobs`.
VerifyReport run_verify(const ExperimentConfig& config, int jobs = 1);

/// Deterministic JSON rendering (the config is echoed without its output path).
nlohmann::json report_to_json(const VerifyReport& report, const ExperimentConfig& config);

/// max over interior nodes |(A_h u)_i - (Au)(x_i)| where boundary-node values
/// of u are taken at the lattice points and Au is differentiated exactly.
double truncation_error(const DiscreteOperator& op, const CoefficientExprs& coeffs, const CoeffExpr& u);

/// max over interior nodes and both components of |b~ - b~_exact| with the
/// exact reduced drift b_j - sum_i d_i a_ij from forward-mode derivatives.
double divergence_reduction_error(const CoefficientField& field, const DomainGrid& grid,
                                  const CoefficientExprs& coeffs);

/// Errors below this are at rounding level; a scheme that reproduces the
/// target to this accuracy on every grid is exact for it.
inline constexpr double kRoundoffFloor = 1e-10;

struct OrderEstimate {
  double order = 0.0;  // min of log2(e_k / e_{k+1}); +inf when exact
  bool exact = false;
};

/// Observed order over errors on successively halved grids.
OrderEstimate observed_order(const std::vector<double>& errors);

}  // namespace ndlab
