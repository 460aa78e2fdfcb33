// Command-line surface. Four subcommands share one config format:
//
//   vhfix check <cfg>                hypothesis + comparison checks
//   vhfix solve <cfg> --out <csv>    fixed-point solve, solution CSV
//   vhfix mnc <cfg> --out <csv>      set-shrinkage experiment, step CSV
//   vhfix compare <cfg>              comparison-function property suite
//
// Exit codes: 0 success, 1 property or hypothesis violation,
// 2 non-convergence, 3 input error (file, config, expression).

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vhfix/vhfix.hpp"

namespace {

struct Overrides {
  std::optional<int> grid_n;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::optional<int> max_iter;
  std::optional<std::string> mode;
  std::optional<int> steps;
  std::optional<int> ensemble_size;
  std::optional<int> hull_count;
};

void add_override_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--grid-n", o.grid_n, "override solver.grid_n");
  cmd->add_option("--tol", o.tol, "override solver.tol");
  cmd->add_option("--seed", o.seed, "override mnc.seed");
  cmd->add_option("--max-iter", o.max_iter, "override solver.max_iter");
  cmd->add_option("--mode", o.mode, "override solver.mode (picard | implicit)");
  cmd->add_option("--steps", o.steps, "override mnc.steps");
  cmd->add_option("--ensemble-size", o.ensemble_size, "override mnc.ensemble_size");
  cmd->add_option("--hull-count", o.hull_count, "override mnc.hull_count");
}

vhfix::Config load_with_overrides(const std::string& path, const Overrides& o) {
  vhfix::Config cfg = vhfix::load_config(path);
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw vhfix::ConfigError(what);
  };
  if (o.grid_n) {
    require(*o.grid_n >= 2, "--grid-n must be at least 2");
    cfg.solver.grid_n = *o.grid_n;
  }
  if (o.tol) {
    require(*o.tol > 0.0, "--tol must be positive");
    cfg.solver.tol = *o.tol;
  }
  if (o.seed) cfg.seed = *o.seed;
  if (o.max_iter) {
    require(*o.max_iter >= 1, "--max-iter must be positive");
    cfg.solver.max_iter = *o.max_iter;
  }
  if (o.mode) cfg.solver.mode = vhfix::solve_mode_from_name(*o.mode);
  if (o.steps) {
    require(*o.steps >= 0, "--steps must be nonnegative");
    cfg.steps = *o.steps;
  }
  if (o.ensemble_size) {
    require(*o.ensemble_size >= 1, "--ensemble-size must be positive");
    cfg.ensemble_size = *o.ensemble_size;
  }
  if (o.hull_count) {
    require(*o.hull_count >= 1, "--hull-count must be positive");
    cfg.hull_count = *o.hull_count;
  }
  return cfg;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw vhfix::ConfigError("cannot open output file: " + path);
  return out;
}

void write_warnings(std::ostream& os, const std::vector<std::string>& warnings) {
  os << "WARNINGS\n";
  if (warnings.empty()) os << "(none)\n";
  for (const std::string& w : warnings) os << "warning: " << w << "\n";
}

int cmd_check(const vhfix::Config& cfg) {
  vhfix::IntegralProblem p = cfg.problem();
  bool ok = true;
  vhfix::HypothesisReport rep = vhfix::run_hypotheses(p);
  for (const std::string& issue : vhfix::validate_triple(cfg.triple)) {
    rep.warnings.push_back("comparison triple: " + issue);
    ok = false;
  }
  for (const vhfix::PropertyReport& r : vhfix::comparison_suite(cfg.triple)) {
    std::cout << r.to_line() << "\n";
    if (!r.passed) {
      rep.warnings.push_back("comparison check failed: " + r.to_line());
      ok = false;
    }
  }
  rep.write(std::cout);
  return (ok && rep.all_pass()) ? 0 : 1;
}

int cmd_solve(const vhfix::Config& cfg, const std::string& out_path) {
  vhfix::IntegralProblem p = cfg.problem();
  std::ofstream out = open_output(out_path);
  vhfix::SolveResult res = vhfix::solve(p, cfg.solver);
  vhfix::write_csv(res.solution, out);
  std::cout << "converged = " << (res.converged ? "true" : "false") << "\n"
            << "iterations = " << res.iterations << "\n"
            << "residual = " << vhfix::fmt17(res.residual) << "\n"
            << "mode = " << vhfix::solve_mode_name(res.mode) << "\n";
  write_warnings(std::cout, res.warnings);
  return res.converged ? 0 : 2;
}

int cmd_mnc(const vhfix::Config& cfg, const std::string& out_path) {
  vhfix::IntegralProblem p = cfg.problem();
  std::ofstream out = open_output(out_path);
  std::vector<std::string> notes;
  double radius = 1.0;
  if (std::optional<double> r0 = vhfix::find_r0(p)) {
    radius = *r0;
  } else {
    notes.push_back("no invariant-ball radius found; sampling members with radius 1");
  }
  vhfix::Grid grid(p.horizon, cfg.solver.grid_n);
  constexpr double kMemberSlope = 2.0;
  vhfix::Ensemble start = vhfix::random_ensemble(grid, cfg.ensemble_size, p.value_floor(radius),
                                                 radius, kMemberSlope, cfg.seed);
  std::vector<vhfix::MncEstimate> est =
      vhfix::darbo_iterate(p, start, cfg.steps, cfg.resolved_hull_count(), cfg.seed,
                           cfg.tail_fraction, cfg.solver.rule);
  vhfix::write_darbo_csv(est, out);
  bool monotone = true;
  double prev = est.front().mu_hat;
  for (const vhfix::MncEstimate& e : est) {
    if (e.mu_hat > prev + 1e-9) monotone = false;
    prev = e.mu_hat;
  }
  vhfix::PropertyReport ineq = vhfix::check_condensing_inequality(
      p, start, cfg.resolved_hull_count(), cfg.seed, cfg.tail_fraction, cfg.solver.rule);
  if (!ineq.passed) std::cerr << ineq.to_line() << "\n";
  for (const std::string& n : notes) std::cout << "note = " << n << "\n";
  std::cout << "mu_initial = " << vhfix::fmt17(est.front().mu_hat) << "\n"
            << "mu_final = " << vhfix::fmt17(est.back().mu_hat) << "\n"
            << "monotone = " << (monotone ? "true" : "false") << "\n";
  return monotone ? 0 : 1;
}

int cmd_compare(const vhfix::Config& cfg) {
  bool ok = true;
  for (const std::string& n : cfg.triple.notes) std::cout << "note = " << n << "\n";
  for (const std::string& issue : vhfix::validate_triple(cfg.triple)) {
    std::cout << "note = comparison triple: " << issue << "\n";
    ok = false;
  }
  for (const vhfix::PropertyReport& r : vhfix::comparison_suite(cfg.triple)) {
    std::cout << r.to_line() << "\n";
    if (!r.passed) ok = false;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Volterra-Hammerstein fixed-point toolkit"};
  app.require_subcommand(1);

  std::string cfg_path;
  std::string out_path;
  Overrides o;

  CLI::App* check = app.add_subcommand("check", "run hypothesis and comparison checks");
  check->add_option("config", cfg_path, "config file")->required();
  add_override_flags(check, o);

  CLI::App* solve = app.add_subcommand("solve", "solve the equation and write the solution CSV");
  solve->add_option("config", cfg_path, "config file")->required();
  solve->add_option("--out", out_path, "solution CSV path")->required();
  add_override_flags(solve, o);

  CLI::App* mnc = app.add_subcommand("mnc", "run the set-shrinkage experiment, write step CSV");
  mnc->add_option("config", cfg_path, "config file")->required();
  mnc->add_option("--out", out_path, "step CSV path")->required();
  add_override_flags(mnc, o);

  CLI::App* compare = app.add_subcommand("compare", "run the comparison-function property suite");
  compare->add_option("config", cfg_path, "config file")->required();
  add_override_flags(compare, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 3;
  }

  try {
    vhfix::Config cfg = load_with_overrides(cfg_path, o);
    if (app.got_subcommand(check)) return cmd_check(cfg);
    if (app.got_subcommand(solve)) return cmd_solve(cfg, out_path);
    if (app.got_subcommand(mnc)) return cmd_mnc(cfg, out_path);
    if (app.got_subcommand(compare)) return cmd_compare(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 3;
}
