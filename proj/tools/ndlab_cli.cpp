// ndlab: command-line driver for the solvers and the verify battery.
//
// Exit codes: 0 success / all checks pass, 1 a check or solve failed,
// 2 configuration or usage error.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "ndlab/error.hpp"
#include "ndlab/experiment.hpp"
#include "ndlab/verify.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::optional<double> t;
  std::optional<std::string> method;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "experiment configuration (JSON)")->required();
  cmd->add_option("--out", o.out, "output path (defaults to the config's output, else stdout)");
  cmd->add_option("--seed", o.seed, "seed for randomized trials");
  cmd->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ndlab::Error(ndlab::ErrorCode::ConfigError, "cannot write '" + path + "'");
  out << text;
}

int run(ndlab::Task task, const Options& o) {
  ndlab::ExperimentConfig cfg = ndlab::load_config(o.config);
  cfg.task = task;
  if (o.seed) cfg.seed = *o.seed;
  if (!o.out.empty()) cfg.output = o.out;
  cfg.jobs = o.jobs;
  if (o.t) {
    if (!(*o.t >= 0.0)) throw ndlab::Error(ndlab::ErrorCode::ConfigError, "--t must be >= 0");
    cfg.params.t = *o.t;
    cfg.params.times.clear();
  }
  if (o.method) {
    ndlab::EvolutionMethod::parse(*o.method);
    cfg.params.method = *o.method;
  }

  std::ostringstream text;
  switch (task) {
    case ndlab::Task::SolveElliptic:
    case ndlab::Task::SolveDirichlet: {
      const auto grid = ndlab::build_domain(cfg.domain, cfg.h);
      const auto u = task == ndlab::Task::SolveElliptic ? ndlab::run_solve_elliptic(cfg)
                                                        : ndlab::run_solve_dirichlet(cfg);
      ndlab::write_solution_csv(text, grid, u);
      break;
    }
    case ndlab::Task::ResolventSweep: {
      const auto report = ndlab::run_resolvent_sweep(cfg);
      ndlab::write_sweep_csv(text, report);
      emit(cfg.output, text.str());
      std::cerr << "M_measured " << report.M_measured << " omega " << report.omega << " failures "
                << report.failures << '\n';
      return report.finite ? kExitPass : kExitFailure;
    }
    case ndlab::Task::Evolve: {
      const auto grid = ndlab::build_domain(cfg.domain, cfg.h);
      ndlab::write_trace_csv(text, grid, ndlab::run_evolve(cfg));
      break;
    }
    case ndlab::Task::Verify: {
      const auto report = ndlab::run_verify(cfg, cfg.jobs);
      emit(cfg.output, ndlab::report_to_json(report, cfg).dump(2) + "\n");
      for (const auto& c : report.checks) {
        std::cerr << ndlab::to_string(c.status) << ' ' << c.name;
        if (!c.message.empty()) std::cerr << " (" << c.message << ')';
        std::cerr << '\n';
      }
      std::cerr << report.passed << " passed, " << report.failed << " failed, " << report.skipped
                << " skipped\n";
      return report.any_failed() ? kExitFailure : kExitPass;
    }
  }
  emit(cfg.output, text.str());
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-difference laboratory for non-divergence elliptic operators"};
  app.require_subcommand(1);
  Options o;

  struct Sub {
    const char* name;
    const char* help;
    ndlab::Task task;
  };
  const Sub subs[] = {
      {"solve-elliptic", "solve (mu - A) u = f with boundary data g; writes x,y,u,is_boundary",
       ndlab::Task::SolveElliptic},
      {"solve-dirichlet", "solve A u = 0 with boundary data g; writes x,y,u,is_boundary",
       ndlab::Task::SolveDirichlet},
      {"resolvent-sweep", "sample |lambda| ||(lambda - A)^-1|| over a sector; writes re,im,norm,method",
       ndlab::Task::ResolventSweep},
      {"evolve", "evolve u0 under the semigroup; writes t,x,y,u", ndlab::Task::Evolve},
      {"verify", "run the property battery; writes a JSON report", ndlab::Task::Verify},
  };
  std::optional<ndlab::Task> chosen;
  for (const auto& s : subs) {
    CLI::App* cmd = app.add_subcommand(s.name, s.help);
    add_common(cmd, o);
    if (s.task == ndlab::Task::Evolve) {
      cmd->add_option("--t", o.t, "final time");
      cmd->add_option("--method", o.method, "yosida:N | be:STEPS | eigen");
    }
    cmd->callback([&chosen, task = s.task] { chosen = task; });
  }
  bool catalog = false;
  app.add_subcommand("catalog", "list built-in domains and coefficient presets")->callback([&] { catalog = true; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfig;
  }

  if (catalog) {
    std::cout << ndlab::catalog_json().dump(2) << '\n';
    return kExitPass;
  }
  try {
    return run(*chosen, o);
  } catch (const ndlab::Error& e) {
    std::cerr << e.what() << '\n';
    return e.code() == ndlab::ErrorCode::ConfigError ? kExitConfig : kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kExitFailure;
  }
}
