#include <atomic>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "ndlab/error.hpp"
#include "ndlab/experiment.hpp"
#include "ndlab/parallel.hpp"
#include "ndlab/presets.hpp"
#include "ndlab/verify.hpp"

using namespace ndlab;
using nlohmann::json;

namespace {

std::string config_error(const json& j) {
  try {
    config_from_json(j);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigError);
    return e.what();
  }
  ADD_FAILURE() << "expected a ConfigError for " << j.dump();
  return {};
}

}  // namespace

TEST(Experiment, ConfigRoundTrip) {
  const json j = json::parse(R"({
    "domain": "l_shape",
    "coefficients": {"a11": "1 + x^2/2", "a12": "x*y/4", "a21": "x*y/4", "a22": "1 + y^2/2", "b1": "3", "lambda": 0.75},
    "discretization": {"h": 0.03125, "scheme": "central"},
    "task": "solve-elliptic",
    "params": {"f": "1", "mu": 2, "times": [0, 0.5], "sweep": {"angles": 3}},
    "seed": 11
  })");
  const ExperimentConfig c = config_from_json(j);
  EXPECT_EQ(c.task, Task::SolveElliptic);
  EXPECT_EQ(c.scheme, Scheme::Central);
  EXPECT_EQ(c.h, 0.03125);
  EXPECT_EQ(c.params.sweep_angles, 3);
  EXPECT_EQ(c.seed, 11u);
  const json back = config_to_json(c);
  EXPECT_EQ(config_to_json(config_from_json(back)), back);
  EXPECT_EQ(config_from_json(back).coefficients.a12(0.5, 0.5), 0.0625);
}

TEST(Experiment, PresetSuppliesCoefficients) {
  const ExperimentConfig c = config_from_json({{"domain", "disk"}, {"coefficients", {{"preset", "drift"}}}});
  EXPECT_EQ(c.preset, "drift");
  EXPECT_EQ(c.coefficients.b1(0.3, 0.3), 50.0);
  EXPECT_EQ(c.lambda, 1.0);
}

TEST(Experiment, ConfigErrorsNameTheField) {
  const std::string syntax =
      config_error({{"domain", "unit_square"}, {"coefficients", {{"a11", "1 + * x"}, {"lambda", 1}}}});
  EXPECT_NE(syntax.find("coefficients.a11"), std::string::npos) << syntax;
  EXPECT_NE(syntax.find("/coefficients/a11"), std::string::npos) << syntax;
  EXPECT_NE(syntax.find("column 5"), std::string::npos) << syntax;
  const std::string asym = config_error(
      {{"domain", "unit_square"}, {"coefficients", {{"a12", "x"}, {"a21", "y"}, {"lambda", 0.1}}}});
  EXPECT_NE(asym.find("coefficients.a21"), std::string::npos) << asym;
  EXPECT_NE(config_error({{"domain", "unit_square"}, {"coefficients", {{"a11", "2"}}}}).find("lambda"),
            std::string::npos);
  EXPECT_NE(config_error({{"domain", "annulus"}, {"coefficients", {{"preset", "heat"}}}}).find("/domain"),
            std::string::npos);
  EXPECT_NE(config_error({{"coefficients", {{"preset", "heat"}}}, {"task", "fly"}}).find("/task"),
            std::string::npos);
  EXPECT_NE(config_error({{"coefficients", {{"preset", "heat"}}}, {"params", {{"method", "rk4"}}}})
                .find("params.method"),
            std::string::npos);
}

TEST(Experiment, MalformedJsonFileIsConfigError) {
  const std::string path = ::testing::TempDir() + "ndlab_bad.json";
  std::ofstream(path) << "{ \"domain\": ";
  try {
    load_config(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigError);
  }
  EXPECT_THROW(load_config(::testing::TempDir() + "does_not_exist.json"), Error);
}

TEST(Experiment, CatalogPresetsAreEllipticAndMonotone) {
  ASSERT_GE(coefficient_presets().size(), 6u);
  for (const CatalogDomain& d : catalog_domains()) {
    for (const CoefficientPreset& p : coefficient_presets()) {
      const DomainGrid grid = build_domain(d.spec, 1.0 / 16);
      const CoefficientField f = sample_field(p.exprs, p.lambda, grid);
      EXPECT_TRUE(check_ellipticity(f, grid).pass) << d.name << ' ' << p.name;
      auto shared = std::make_shared<const DomainGrid>(grid);
      EXPECT_TRUE(assemble(shared, f, Scheme::Upwind).certified()) << d.name << ' ' << p.name;
    }
  }
  EXPECT_THROW(find_preset("nope"), Error);
  const json cat = catalog_json();
  EXPECT_GE(cat["presets"].size(), 6u);
}

TEST(Experiment, SolutionCsvIsDeterministic) {
  ExperimentConfig c = config_from_json({{"domain", "l_shape"},
                                         {"coefficients", {{"preset", "variable"}}},
                                         {"discretization", {{"h", 0.125}}},
                                         {"params", {{"f", "1"}, {"g", "x"}}}});
  const DomainGrid grid = build_domain(c.domain, c.h);
  std::ostringstream a, b;
  write_solution_csv(a, grid, run_solve_elliptic(c));
  write_solution_csv(b, grid, run_solve_elliptic(c));
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str().substr(0, a.str().find('\n')), "x,y,u,is_boundary");

  c.params.f = CoeffExpr::constant(0.0);
  c.params.g = CoeffExpr::constant(0.0);
  const GridFunction zero = run_solve_elliptic(c);
  EXPECT_EQ(zero.interior.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Experiment, SweepAndTraceCsv) {
  ExperimentConfig c = config_from_json({{"coefficients", {{"preset", "heat"}}},
                                         {"discretization", {{"h", 0.25}}},
                                         {"params", {{"sweep", {{"angles", 2}, {"moduli", 3}}}, {"times", {0, 0.1}}}}});
  std::ostringstream s;
  write_sweep_csv(s, run_resolvent_sweep(c));
  std::istringstream lines(s.str());
  std::string line;
  int count = 0;
  std::getline(lines, line);
  EXPECT_EQ(line, "re_lambda,im_lambda,norm,method");
  while (std::getline(lines, line)) ++count;
  EXPECT_EQ(count, 6);

  std::ostringstream t;
  const DomainGrid grid = build_domain(c.domain, c.h);
  write_trace_csv(t, grid, run_evolve(c));
  EXPECT_EQ(t.str().substr(0, t.str().find('\n')), "t,x,y,u");
}

TEST(Experiment, EveryAnchorIsDocumented) {
  std::ifstream in(std::string(NDLAB_SOURCE_DIR) + "/docs/THEOREM_MAP.md");
  ASSERT_TRUE(in) << "docs/THEOREM_MAP.md missing";
  std::stringstream text;
  text << in.rdbuf();
  ASSERT_GE(verify_checks().size(), 20u);
  for (const CheckInfo& c : verify_checks()) {
    EXPECT_NE(text.str().find(c.anchor), std::string::npos) << c.anchor;
    EXPECT_NE(text.str().find("`" + c.name + "`"), std::string::npos) << c.name;
  }
}

TEST(Experiment, OrderEstimate) {
  const OrderEstimate exact = observed_order({1e-13, 3e-14, 5e-12});
  EXPECT_TRUE(exact.exact);
  const OrderEstimate second = observed_order({1.6e-2, 4e-3, 1e-3});
  EXPECT_FALSE(second.exact);
  EXPECT_NEAR(second.order, 2.0, 1e-12);
  EXPECT_NEAR(observed_order({1e-2, 5e-3, 1e-3}).order, 1.0, 1e-12);
}

TEST(Parallel, ResultIndependentOfThreadCount) {
  std::vector<double> ref(1000);
  parallel_for(ref.size(), 1, [&](std::size_t i) { ref[i] = std::sin(static_cast<double>(i)); });
  for (int jobs : {2, 3, 8}) {
    std::vector<double> out(ref.size());
    std::atomic<int> calls{0};
    parallel_for(out.size(), jobs, [&](std::size_t i) {
      out[i] = std::sin(static_cast<double>(i));
      ++calls;
    });
    EXPECT_EQ(out, ref);
    EXPECT_EQ(calls.load(), 1000);
  }
}

TEST(Parallel, RethrowsLowestIndexFailure) {
  try {
    parallel_for(100, 4, [](std::size_t i) {
      if (i == 17 || i == 60) throw std::runtime_error(std::to_string(i));
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "17");
  }
}
