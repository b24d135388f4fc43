#include "ndlab/experiment.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "ndlab/elliptic.hpp"
#include "ndlab/error.hpp"
#include "ndlab/presets.hpp"

namespace ndlab {

using nlohmann::json;

namespace {

[[noreturn]] void config_fail(const std::string& pointer, const std::string& what) {
  std::string dotted = pointer.substr(1);
  for (char& ch : dotted) {
    if (ch == '/') ch = '.';
  }
  throw Error(ErrorCode::ConfigError, pointer + " (" + dotted + "): " + what);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CoeffExpr read_expr(const json& obj, const char* key, const std::string& pointer, const CoeffExpr& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj[key];
  if (v.is_number()) return CoeffExpr::constant(v.get<double>());
  if (!v.is_string()) config_fail(pointer, "expected an expression string or a number");
  try {
    return CoeffExpr::parse(v.get<std::string>());
  } catch (const ParseError& e) {
    config_fail(pointer, e.what());
  }
}

double read_double(const json& obj, const char* key, const std::string& pointer, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) config_fail(pointer, "expected a number");
  return obj[key].get<double>();
}

int read_int(const json& obj, const char* key, const std::string& pointer, int fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer()) config_fail(pointer, "expected an integer");
  return obj[key].get<int>();
}

const json& read_object(const json& j, const char* key, const std::string& pointer) {
  static const json empty = json::object();
  if (!j.contains(key)) return empty;
  if (!j[key].is_object()) config_fail(pointer, "expected an object");
  return j[key];
}

Task task_from_string(std::string s) {
  for (char& ch : s) {
    if (ch == '-') ch = '_';
  }
  if (s == "solve_elliptic") return Task::SolveElliptic;
  if (s == "solve_dirichlet") return Task::SolveDirichlet;
  if (s == "resolvent_sweep") return Task::ResolventSweep;
  if (s == "evolve") return Task::Evolve;
  if (s == "verify") return Task::Verify;
  config_fail("/task", "unknown task '" + s + "'");
}

bool all_zero(const Vector& v) { return v.size() == 0 || sup_norm(v) == 0.0; }

}  // namespace

std::string to_string(Task t) {
  switch (t) {
    case Task::SolveElliptic: return "solve_elliptic";
    case Task::SolveDirichlet: return "solve_dirichlet";
    case Task::ResolventSweep: return "resolvent_sweep";
    case Task::Evolve: return "evolve";
    case Task::Verify: return "verify";
  }
  return {};
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) config_fail("/", "expected a JSON object");
  ExperimentConfig c;

  std::optional<double> domain_h;
  if (j.contains("domain")) {
    const json& d = j["domain"];
    if (d.is_string()) {
      try {
        c.domain = find_domain(d.get<std::string>()).spec;
      } catch (const Error&) {
        config_fail("/domain", "unknown domain '" + d.get<std::string>() + "'");
      }
    } else {
      c.domain = shape_from_json(d, &domain_h);
    }
  }

  const json& coeffs = read_object(j, "coefficients", "/coefficients");
  if (coeffs.contains("preset")) {
    if (!coeffs["preset"].is_string()) config_fail("/coefficients/preset", "expected a string");
    const std::string name = coeffs["preset"].get<std::string>();
    try {
      const CoefficientPreset& p = find_preset(name);
      c.preset = name;
      c.coefficients = p.exprs;
      c.lambda = p.lambda;
    } catch (const Error&) {
      config_fail("/coefficients/preset", "unknown preset '" + name + "'");
    }
  } else if (!coeffs.contains("lambda") && j.contains("coefficients")) {
    config_fail("/coefficients/lambda", "required when no preset is given");
  }
  CoefficientExprs& e = c.coefficients;
  e.a11 = read_expr(coeffs, "a11", "/coefficients/a11", e.a11);
  e.a12 = read_expr(coeffs, "a12", "/coefficients/a12", e.a12);
  e.a22 = read_expr(coeffs, "a22", "/coefficients/a22", e.a22);
  e.b1 = read_expr(coeffs, "b1", "/coefficients/b1", e.b1);
  e.b2 = read_expr(coeffs, "b2", "/coefficients/b2", e.b2);
  e.c = read_expr(coeffs, "c", "/coefficients/c", e.c);
  if (coeffs.contains("a21")) {
    const CoeffExpr a21 = read_expr(coeffs, "a21", "/coefficients/a21", e.a12);
    if (!(a21 == e.a12)) config_fail("/coefficients/a21", "must equal a12 (symmetric coefficients)");
  }
  c.lambda = read_double(coeffs, "lambda", "/coefficients/lambda", c.lambda);
  if (!(c.lambda > 0.0)) config_fail("/coefficients/lambda", "must be > 0");

  const json& disc = read_object(j, "discretization", "/discretization");
  c.h = read_double(disc, "h", "/discretization/h", domain_h.value_or(c.h));
  if (!(c.h > 0.0)) config_fail("/discretization/h", "must be > 0");
  if (disc.contains("scheme")) {
    if (!disc["scheme"].is_string()) config_fail("/discretization/scheme", "expected a string");
    try {
      c.scheme = scheme_from_string(disc["scheme"].get<std::string>());
    } catch (const Error& err) {
      config_fail("/discretization/scheme", err.what());
    }
  }

  if (j.contains("task")) {
    if (!j["task"].is_string()) config_fail("/task", "expected a string");
    c.task = task_from_string(j["task"].get<std::string>());
  }

  const json& p = read_object(j, "params", "/params");
  TaskParams& tp = c.params;
  tp.f = read_expr(p, "f", "/params/f", tp.f);
  tp.g = read_expr(p, "g", "/params/g", tp.g);
  tp.u0 = read_expr(p, "u0", "/params/u0", tp.u0);
  tp.mu = read_double(p, "mu", "/params/mu", tp.mu);
  if (!(tp.mu >= 0.0)) config_fail("/params/mu", "must be >= 0");
  if (p.contains("via_ball")) {
    if (!p["via_ball"].is_boolean()) config_fail("/params/via_ball", "expected a boolean");
    tp.via_ball = p["via_ball"].get<bool>();
  }
  tp.margin = read_double(p, "margin", "/params/margin", tp.margin);
  tp.t = read_double(p, "t", "/params/t", tp.t);
  if (!(tp.t >= 0.0)) config_fail("/params/t", "must be >= 0");
  if (p.contains("method")) {
    if (!p["method"].is_string()) config_fail("/params/method", "expected a string");
    tp.method = p["method"].get<std::string>();
    try {
      EvolutionMethod::parse(tp.method);
    } catch (const Error& err) {
      config_fail("/params/method", err.what());
    }
  }
  if (p.contains("times")) {
    if (!p["times"].is_array()) config_fail("/params/times", "expected an array of numbers");
    tp.times.clear();
    for (std::size_t k = 0; k < p["times"].size(); ++k) {
      const json& v = p["times"][k];
      if (!v.is_number() || v.get<double>() < 0.0) {
        config_fail("/params/times/" + std::to_string(k), "expected a number >= 0");
      }
      tp.times.push_back(v.get<double>());
    }
  }
  const json& sweep = read_object(p, "sweep", "/params/sweep");
  tp.sweep_angles = read_int(sweep, "angles", "/params/sweep/angles", tp.sweep_angles);
  tp.sweep_max_angle_deg = read_double(sweep, "max_angle_deg", "/params/sweep/max_angle_deg", tp.sweep_max_angle_deg);
  tp.sweep_moduli = read_int(sweep, "moduli", "/params/sweep/moduli", tp.sweep_moduli);
  tp.sweep_min_modulus = read_double(sweep, "min_modulus", "/params/sweep/min_modulus", tp.sweep_min_modulus);
  tp.sweep_max_modulus = read_double(sweep, "max_modulus", "/params/sweep/max_modulus", tp.sweep_max_modulus);

  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) config_fail("/seed", "expected a non-negative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("output")) {
    if (!j["output"].is_string()) config_fail("/output", "expected a path string");
    c.output = j["output"].get<std::string>();
  }
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["domain"] = shape_to_json(c.domain);
  json coeffs;
  if (c.preset) coeffs["preset"] = *c.preset;
  coeffs["a11"] = c.coefficients.a11.to_string();
  coeffs["a12"] = c.coefficients.a12.to_string();
  coeffs["a22"] = c.coefficients.a22.to_string();
  coeffs["b1"] = c.coefficients.b1.to_string();
  coeffs["b2"] = c.coefficients.b2.to_string();
  coeffs["c"] = c.coefficients.c.to_string();
  coeffs["lambda"] = c.lambda;
  j["coefficients"] = coeffs;
  j["discretization"] = {{"h", c.h}, {"scheme", to_string(c.scheme)}};
  j["task"] = to_string(c.task);
  const TaskParams& p = c.params;
  j["params"] = {{"f", p.f.to_string()},
                 {"g", p.g.to_string()},
                 {"mu", p.mu},
                 {"via_ball", p.via_ball},
                 {"margin", p.margin},
                 {"u0", p.u0.to_string()},
                 {"t", p.t},
                 {"method", p.method},
                 {"times", p.times},
                 {"sweep",
                  {{"angles", p.sweep_angles},
                   {"max_angle_deg", p.sweep_max_angle_deg},
                   {"moduli", p.sweep_moduli},
                   {"min_modulus", p.sweep_min_modulus},
                   {"max_modulus", p.sweep_max_modulus}}}};
  j["seed"] = c.seed;
  if (!c.output.empty()) j["output"] = c.output;
  return j;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, "'" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

Problem build_problem(const ExperimentConfig& config) { return build_problem(config, config.h); }

Problem build_problem(const ExperimentConfig& config, double h) {
  auto grid = std::make_shared<const DomainGrid>(build_domain(config.domain, h));
  CoefficientField field = sample_field(config.coefficients, config.lambda, *grid);
  DiscreteOperator op = assemble(grid, field, config.scheme);
  return {std::move(grid), std::move(field), std::move(op)};
}

GridFunction run_solve_elliptic(const ExperimentConfig& config) {
  const Problem p = build_problem(config);
  const Vector f = sample_interior(config.params.f, *p.grid);
  const Vector g = sample_boundary(config.params.g, *p.grid);
  const double mu = config.params.mu;
  if (config.params.via_ball) {
    if (mu != 0.0) config_fail("/params/mu", "the ball construction solves the unshifted problem");
    return dirichlet_via_ball(p.grid, p.field, config.scheme, f, g, config.params.margin).u;
  }
  if (all_zero(g)) return solve_poisson(p.op, f, mu).u;
  if (mu == 0.0) return solve_full_problem(p.op, f, g).u;
  GridFunction u = solve_poisson(p.op, Vector(f + p.op.boundary_coupling() * g), mu).u;
  u.boundary = g;
  return u;
}

GridFunction run_solve_dirichlet(const ExperimentConfig& config) {
  const Problem p = build_problem(config);
  const Vector g = sample_boundary(config.params.g, *p.grid);
  if (config.params.via_ball) {
    const Vector f = Vector::Zero(p.op.size());
    return dirichlet_via_ball(p.grid, p.field, config.scheme, f, g, config.params.margin).u;
  }
  return solve_dirichlet_direct(p.op, g).u;
}

SectorialReport run_resolvent_sweep(const ExperimentConfig& config) {
  const Problem p = build_problem(config);
  SweepConfig sweep;
  sweep.n_angles = config.params.sweep_angles;
  sweep.max_angle_deg = config.params.sweep_max_angle_deg;
  sweep.n_moduli = config.params.sweep_moduli;
  sweep.min_modulus = config.params.sweep_min_modulus;
  sweep.max_modulus = config.params.sweep_max_modulus;
  sweep.jobs = config.jobs;
  sweep.norm.seed = config.seed;
  try {
    return sector_sweep(p.op, sweep);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidArgument) config_fail("/params/sweep", e.what());
    throw;
  }
}

SemigroupTrace run_evolve(const ExperimentConfig& config) {
  const Problem p = build_problem(config);
  const Vector u0 = sample_interior(config.params.u0, *p.grid);
  std::vector<double> times = config.params.times;
  if (times.empty()) times = {0.0, config.params.t};
  EvolutionMethod method;
  try {
    method = EvolutionMethod::parse(config.params.method);
  } catch (const Error& e) {
    config_fail("/params/method", e.what());
  }
  return evolve_trace(p.op, u0, times, method);
}

void write_solution_csv(std::ostream& out, const DomainGrid& grid, const GridFunction& u) {
  out << "x,y,u,is_boundary\n";
  const auto nodes = grid.nodes();
  const std::size_t ni = grid.num_interior();
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const bool inner = k < ni;
    const double v =
        inner ? u.interior[static_cast<Eigen::Index>(k)] : u.boundary[static_cast<Eigen::Index>(k - ni)];
    out << fmt(nodes[k].pos.x) << ',' << fmt(nodes[k].pos.y) << ',' << fmt(v) << ',' << (inner ? 0 : 1) << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const SectorialReport& report) {
  out << "re_lambda,im_lambda,norm,method\n";
  for (const auto& s : report.samples) {
    out << fmt(s.lambda.real()) << ',' << fmt(s.lambda.imag()) << ',' << (s.ok ? fmt(s.norm) : "nan") << ','
        << (s.ok ? to_string(s.method) : "failed") << '\n';
  }
}

void write_trace_csv(std::ostream& out, const DomainGrid& grid, const SemigroupTrace& trace) {
  out << "t,x,y,u\n";
  const auto nodes = grid.interior();
  for (std::size_t s = 0; s < trace.snapshots.size(); ++s) {
    const std::string t = fmt(trace.times[s]);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      out << t << ',' << fmt(nodes[k].pos.x) << ',' << fmt(nodes[k].pos.y) << ','
          << fmt(trace.snapshots[s][static_cast<Eigen::Index>(k)]) << '\n';
    }
  }
}

json catalog_json() {
  json j;
  j["domains"] = json::array();
  for (const auto& d : catalog_domains()) {
    const ShapeFlags flags = d.spec.flags();
    json entry = shape_to_json(d.spec);
    entry["name"] = d.name;
    entry["uniform_exterior_cone"] = flags.uniform_exterior_cone;
    entry["wiener_regular"] = flags.wiener_regular;
    j["domains"].push_back(entry);
  }
  j["presets"] = json::array();
  for (const auto& p : coefficient_presets()) {
    j["presets"].push_back({{"name", p.name},
                            {"description", p.description},
                            {"lambda", p.lambda},
                            {"a11", p.exprs.a11.to_string()},
                            {"a12", p.exprs.a12.to_string()},
                            {"a22", p.exprs.a22.to_string()},
                            {"b1", p.exprs.b1.to_string()},
                            {"b2", p.exprs.b2.to_string()},
                            {"c", p.exprs.c.to_string()}});
  }
  return j;
}

}  // namespace ndlab
