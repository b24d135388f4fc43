// Acceptance runner: one PASS/FAIL line per criterion.
//
//   acceptance                 run every criterion
//   acceptance --criterion N   run criterion N only

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <sys/wait.h>

#include "CLI11.hpp"
#include "ndlab/elliptic.hpp"
#include "ndlab/error.hpp"
#include "ndlab/parallel.hpp"
#include "ndlab/presets.hpp"
#include "ndlab/rng.hpp"
#include "ndlab/semigroup.hpp"
#include "ndlab/verify.hpp"

using namespace ndlab;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int jobs() { return static_cast<int>(std::max(1u, std::min(8u, std::thread::hardware_concurrency()))); }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

DiscreteOperator make(const ShapeSpec& s, double h, const CoefficientExprs& e, double lambda,
                      Scheme scheme = Scheme::Upwind) {
  auto g = std::make_shared<const DomainGrid>(build_domain(s, h));
  return assemble(g, sample_field(e, lambda, *g), scheme);
}

DiscreteOperator make(const std::string& domain, double h, const CoefficientPreset& p,
                      Scheme scheme = Scheme::Upwind) {
  return make(find_domain(domain).spec, h, p.exprs, p.lambda, scheme);
}

Vector random_vector(CounterRng& rng, Eigen::Index n, double lo, double hi) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.uniform(lo, hi);
  return v;
}

// Runs body(preset, domain) over every (preset, domain) pair in parallel and
// folds the outcomes in a fixed order.
Outcome over_cases(const std::vector<std::string>& domains,
                   const std::function<Outcome(const CoefficientPreset&, const std::string&)>& body) {
  const auto& presets = coefficient_presets();
  std::vector<Outcome> out(presets.size() * domains.size());
  parallel_for(out.size(), jobs(), [&](std::size_t k) {
    const CoefficientPreset& p = presets[k / domains.size()];
    const std::string& d = domains[k % domains.size()];
    try {
      out[k] = body(p, d);
    } catch (const std::exception& e) {
      out[k] = {false, e.what()};
    }
    out[k].detail = p.name + "/" + d + ": " + out[k].detail;
  });
  Outcome all;
  for (const Outcome& o : out) {
    if (!o.pass) {
      all.pass = false;
      all.detail += (all.detail.empty() ? "" : "; ") + o.detail;
    }
  }
  if (all.pass) all.detail = std::to_string(out.size()) + " cases";
  return all;
}

const std::vector<std::string> kSquareAndL = {"unit_square", "l_shape"};

Outcome criterion_1() {
  return over_cases(kSquareAndL, [](const CoefficientPreset& p, const std::string& d) {
    const DiscreteOperator op = make(d, 1.0 / 16, p);
    const DissipativityReport r = dissipativity_check(op, {0.1, 1.0, 10.0, 100.0});
    const double worst = *std::max_element(r.values.begin(), r.values.end());
    return Outcome{r.method == "dense_inverse" && worst <= 1.0 + 1e-12, "max lambda*norm " + fmt(worst)};
  });
}

Outcome criterion_2() {
  return over_cases(kSquareAndL, [](const CoefficientPreset& p, const std::string& d) {
    const DiscreteOperator op = make(d, 1.0 / 16, p);
    double lo = INFINITY;
    for (double lambda : {0.1, 1.0, 10.0, 100.0}) lo = std::min(lo, RealSolver(op, lambda).dense_inverse().minCoeff());
    return Outcome{lo >= -1e-12, "min inverse entry " + fmt(lo)};
  });
}

Outcome criterion_3() {
  return over_cases(kSquareAndL, [](const CoefficientPreset& p, const std::string& d) {
    const double c1 = sup_over_l2_constant(make(d, 1.0 / 8, p));
    CounterRng rng(2024, "aleksandrov/" + p.name + "/" + d);
    Outcome o;
    double measured = 0.0;
    for (double h : {1.0 / 16, 1.0 / 32}) {
      const DiscreteOperator op = make(d, h, p);
      const Eigen::Index nb = op.boundary_coupling().cols();
      for (int trial = 0; trial < 100; ++trial) {
        const Vector f = random_vector(rng, op.size(), -1.0, 1.0);
        const Vector g = trial % 2 ? random_vector(rng, nb, -0.1, 0.1) : Vector(Vector::Zero(nb));
        const AleksandrovReport r = aleksandrov_check(op, solve_full_problem(op, f, g), f, g, c1, 1.25);
        measured = std::max(measured, r.measured_c1);
        o.pass = o.pass && r.pass;
      }
    }
    o.detail = "c1 " + fmt(c1) + ", max measured " + fmt(measured);
    return o;
  });
}

Outcome criterion_4() {
  return over_cases({"l_shape"}, [](const CoefficientPreset& p, const std::string& d) {
    const DiscreteOperator op = make(d, 1.0 / 16, p);
    const ComplexMaxPrincipleReport r =
        complex_max_principle_trials(op, {{1.0, 0.0}, {1.0, 2.0}, {0.1, 5.0}}, 200, 4);
    return Outcome{r.pass && r.failures == 0 && r.trials == 600,
                   std::to_string(r.failures) + "/" + std::to_string(r.trials) + " failures, worst margin " +
                       fmt(r.worst_margin)};
  });
}

Outcome criterion_5() {
  Outcome all;
  for (const char* name : {"heat", "variable"}) {
    const CoefficientPreset& p = find_preset(name);
    SweepConfig cfg;
    cfg.jobs = jobs();
    const SectorialReport coarse = sector_sweep(make("unit_square", 1.0 / 16, p), cfg);
    const SectorialReport fine = sector_sweep(make("unit_square", 1.0 / 32, p), cfg);
    const double ratio = coarse.M_measured / fine.M_measured;
    const bool ok = coarse.finite && fine.finite && std::isfinite(ratio) && ratio >= 0.5 && ratio <= 2.0;
    all.pass = all.pass && ok;
    all.detail += std::string(all.detail.empty() ? "" : "; ") + name + ": M " + fmt(coarse.M_measured) + " / " +
                  fmt(fine.M_measured) + " ratio " + fmt(ratio);
  }
  return all;
}

Outcome criterion_6() {
  const DiscreteOperator op = make("unit_square", 1.0 / 16, find_preset("heat"));
  const Vector u0 = sample_interior(CoeffExpr::parse("sin(pi*x)*sin(pi*y)"), op.grid());
  const ReferenceEvolution ref = reference_evolution(op, u0, 0.1);
  const double e16 = sup_norm(Vector(yosida_evolve(op, u0, 0.1, 16) - ref.u));
  const double e256 = sup_norm(Vector(yosida_evolve(op, u0, 0.1, 256) - ref.u));
  const bool ratio_ok = e256 < 0.25 * e16;
  const bool abs_ok = e256 <= 1e-3;
  return {ratio_ok && abs_ok, "error n=16 " + fmt(e16) + ", n=256 " + fmt(e256) + " (ratio " +
                                  (ratio_ok ? "ok" : "exceeds 0.25") + ", absolute " +
                                  (abs_ok ? "ok" : "exceeds 1e-3") + ")"};
}

Outcome criterion_7() {
  Outcome o;
  double worst = 0.0;
  CoefficientExprs identity;
  for (double h : {1.0 / 16, 1.0 / 32}) {
    const DiscreteOperator op = make(ShapeSpec::unit_square(), h, identity, 1.0);
    const Vector phi = sample_interior(CoeffExpr::parse("sin(pi*x)*sin(pi*y)"), op.grid());
    const double s = std::sin(kPi * h / 2);
    const double lambda_h = 8.0 / (h * h) * s * s;
    for (double lambda : {1.0, 10.0}) {
      const EllipticSolution u = solve_poisson(op, (lambda + lambda_h) * phi, lambda);
      worst = std::max(worst, sup_norm(Vector(u.u.interior - phi)) / sup_norm(phi));
    }
  }
  o.pass = worst <= 1e-10;
  o.detail = "max relative error " + fmt(worst);
  return o;
}

Outcome criterion_8() {
  return over_cases(kSquareAndL, [](const CoefficientPreset& p, const std::string& d) {
    const ShapeSpec& spec = find_domain(d).spec;
    auto grid = std::make_shared<const DomainGrid>(build_domain(spec, 1.0 / 32));
    const CoefficientField field = sample_field(p.exprs, p.lambda, *grid);
    const DiscreteOperator op = assemble(grid, field);
    CounterRng rng(8, "ball/" + p.name + "/" + d);
    double worst = 0.0;
    for (int pair = 0; pair < 5; ++pair) {
      const Vector f = random_vector(rng, op.size(), -1.0, 1.0);
      const Vector g = random_vector(rng, op.boundary_coupling().cols(), -1.0, 1.0);
      const EllipticSolution direct = solve_full_problem(op, f, g);
      const EllipticSolution ball = dirichlet_via_ball(grid, field, Scheme::Upwind, f, g, 0.5);
      worst = std::max(worst, sup_norm(Vector(direct.u.interior - ball.u.interior)));
    }
    return Outcome{worst <= 5e-9, "max difference " + fmt(worst)};
  });
}

Outcome criterion_9() {
  std::vector<std::string> domains;
  for (const CatalogDomain& d : catalog_domains()) {
    if (build_domain(d.spec, 1.0 / 16).interior_connected()) domains.push_back(d.name);
  }
  Outcome o = over_cases(domains, [](const CoefficientPreset& p, const std::string& d) {
    const DiscreteOperator op = make(d, 1.0 / 16, p);
    Vector bump = Vector::Zero(op.size());
    bump[op.size() / 2] = 1.0;
    const StrictPositivityReport r = strict_positivity_check(op, bump, {0.05, 0.1, 0.5}, 1024);
    const double lo = *std::min_element(r.min_values.begin(), r.min_values.end());
    return Outcome{r.pass && lo > 0.0, "min value " + fmt(lo)};
  });
  o.detail += " over " + std::to_string(domains.size()) + " connected domains";
  return o;
}

Outcome criterion_10() {
  const CoeffExpr u = CoeffExpr::parse("sin(pi*x)*cos(pi*y/2) + exp(x*y)/2");
  struct Case {
    const CoefficientPreset* preset;
    Scheme scheme;
    double expected;
  };
  std::vector<Case> cases;
  for (const CoefficientPreset& p : coefficient_presets()) {
    const bool smooth = p.exprs.a11.smooth() && p.exprs.a12.smooth() && p.exprs.a22.smooth() &&
                        p.exprs.b1.smooth() && p.exprs.b2.smooth() && p.exprs.c.smooth();
    const CoeffExpr zero = CoeffExpr::constant(0.0);
    const bool drift = !(p.exprs.b1 == zero) || !(p.exprs.b2 == zero);
    if (smooth) cases.push_back({&p, Scheme::Central, 1.9});
    if (drift) cases.push_back({&p, Scheme::Upwind, 0.9});
  }
  std::vector<Outcome> out(cases.size());
  parallel_for(cases.size(), jobs(), [&](std::size_t k) {
    const Case& c = cases[k];
    std::vector<double> errors;
    for (double h : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
      const DiscreteOperator op = make(ShapeSpec::unit_square(), h, c.preset->exprs, c.preset->lambda, c.scheme);
      errors.push_back(truncation_error(op, c.preset->exprs, u));
    }
    const OrderEstimate ord = observed_order(errors);
    out[k] = {ord.exact || ord.order >= c.expected,
              c.preset->name + "/" + to_string(c.scheme) + " order " + (ord.exact ? "exact" : fmt(ord.order))};
  });
  Outcome all;
  for (const Outcome& o : out) {
    all.pass = all.pass && o.pass;
    all.detail += (all.detail.empty() ? "" : ", ") + o.detail;
  }
  return all;
}

Outcome criterion_11() {
  Outcome all;
  const CoefficientPreset& variable = find_preset("variable");
  for (const std::string& d : kSquareAndL) {
    std::vector<double> errors;
    for (double h : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
      const DomainGrid grid = build_domain(find_domain(d).spec, h);
      errors.push_back(
          divergence_reduction_error(sample_field(variable.exprs, variable.lambda, grid), grid, variable.exprs));
    }
    const OrderEstimate ord = observed_order(errors);
    all.pass = all.pass && (ord.exact || ord.order >= 1.9);
    all.detail += (all.detail.empty() ? "" : ", ") + d + " max error " +
                  fmt(*std::max_element(errors.begin(), errors.end())) + " order " +
                  (ord.exact ? "exact" : fmt(ord.order));
  }
  return all;
}

Outcome criterion_12() {
  return over_cases(kSquareAndL, [](const CoefficientPreset& p, const std::string& d) {
    auto grid = std::make_shared<const DomainGrid>(build_domain(find_domain(d).spec, 1.0 / 64));
    const CoefficientField field = sample_field(p.exprs, p.lambda, *grid);
    const EnclosingBall ball = enclosing_ball(*grid, 0.5);
    const CoefficientField ext = extend_to_ball(field, *grid, ball, ExtensionRecipe{0.25});
    std::vector<double> dist;
    double lo = INFINITY;
    for (int k : {4, 8, 16}) {
      const CoefficientField m = mollify(ext, ball, MollifierSpec{k});
      for (std::size_t i = 0; i < m.size(); ++i) {
        const auto e = static_cast<Eigen::Index>(i);
        lo = std::min(lo, min_eigenvalue(m.a11[e], m.a12[e], m.a22[e]));
      }
      dist.push_back(sup_distance(m, field));
    }
    const bool decreasing = dist[0] > dist[1] && dist[1] > dist[2];
    return Outcome{decreasing && lo >= 0.5 * p.lambda,
                   "distances " + fmt(dist[0]) + " > " + fmt(dist[1]) + " > " + fmt(dist[2]) + ", min eig " +
                       fmt(lo)};
  });
}

Outcome criterion_13() {
  return over_cases({"l_shape"}, [](const CoefficientPreset& p, const std::string& d) {
    std::vector<double> semi;
    for (double h : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
      const DiscreteOperator op = make(d, h, p);
      const EllipticSolution u = solve_poisson(op, Vector::Ones(op.size()));
      semi.push_back(holder_seminorm(u.u, op.grid(), 0.4));
    }
    const bool ok = semi[1] <= 1.5 * semi[0] && semi[2] <= 1.5 * semi[1];
    return Outcome{ok, "seminorms " + fmt(semi[0]) + ", " + fmt(semi[1]) + ", " + fmt(semi[2])};
  });
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome criterion_14() {
  const std::string dir = "acceptance_determinism";
  std::filesystem::create_directories(dir);
  const std::string cfg = dir + "/config.json";
  std::ofstream(cfg) << R"({"domain": "l_shape", "coefficients": {"preset": "variable"},
  "discretization": {"h": 0.0625}, "seed": 14})";
  std::vector<std::string> reports;
  for (int run = 0; run < 2; ++run) {
    const std::string out = dir + "/report_" + std::to_string(run) + ".json";
    const std::string cmd = std::string(NDLAB_CLI_PATH) + " verify --config " + cfg + " --out " + out +
                            " --jobs " + std::to_string(run == 0 ? 1 : jobs()) + " 2> /dev/null";
    const int status = std::system(cmd.c_str());
    if (!WIFEXITED(status) || WEXITSTATUS(status) == 2) return {false, "verify run failed"};
    reports.push_back(slurp(out));
  }
  const bool same = !reports[0].empty() && reports[0] == reports[1];
  return {same, std::to_string(reports[0].size()) + " bytes, " + (same ? "identical" : "different")};
}

struct Criterion {
  const char* title;
  Outcome (*run)();
};

const Criterion kCriteria[] = {
    {"m-dissipativity", criterion_1},
    {"resolvent positivity", criterion_2},
    {"discrete Aleksandrov bound", criterion_3},
    {"complex maximum principle", criterion_4},
    {"sectoriality", criterion_5},
    {"Yosida convergence", criterion_6},
    {"eigenpair resolvent exactness", criterion_7},
    {"Dirichlet via ball equivalence", criterion_8},
    {"strict positivity", criterion_9},
    {"consistency orders", criterion_10},
    {"divergence reduction", criterion_11},
    {"mollification", criterion_12},
    {"Hoelder stability", criterion_13},
    {"determinism", criterion_14},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-14)")->check(CLI::Range(1, 14));
  CLI11_PARSE(app, argc, argv);

  bool all_pass = true;
  for (int n = 1; n <= 14; ++n) {
    if (only != 0 && n != only) continue;
    const Criterion& c = kCriteria[n - 1];
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, e.what()};
    }
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", n, c.title, o.detail.c_str());
    std::fflush(stdout);
    all_pass = all_pass && o.pass;
  }
  return all_pass ? 0 : 1;
}
