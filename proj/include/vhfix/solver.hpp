#pragma once

/* Fixed-point solvers for x(t) = f(t, integral_0^t g(t,s,x(s)) ds, x(t)).
 *
 * Picard iterates x_{k+1} = T x_k and stops when consecutive iterates agree
 * within tol in sup norm. If T leaves its domain mid-run (a log or root of a
 * forbidden value), the last iterate whose image exists is returned with
 * converged = false and the failure recorded as a warning.
 *
 * The pointwise-implicit mode sweeps the grid: each sweep freezes the inner
 * integrals at the current iterate, then solves the scalar equation
 * u = f(t_i, I_i, u) at every node with safeguarded Newton falling back to
 * bisection on a scanned bracket [-R, R]. R comes from the config or, when
 * left at 0, from max(sup|x| + 1, 2); it doubles up to three times if no
 * sign change is found.
 *
 * contraction_probe samples random pairs from the solution ball and tests
 * the node-wise operator inequality
 *
 *   Phi(Lambda(|Tx - Ty|)) <= Psi(Lambda(|x - y|))
 *                             + Psi(Lambda(2 a(t) integral_0^t |b|)) + tol.
 */

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vhfix/comparison.hpp"
#include "vhfix/expr.hpp"
#include "vhfix/grid.hpp"
#include "vhfix/problem.hpp"
#include "vhfix/sampling.hpp"

namespace vhfix {

enum class SolveMode { Picard, PointwiseImplicit };

inline SolveMode solve_mode_from_name(std::string_view name) {
  if (name == "picard") return SolveMode::Picard;
  if (name == "implicit") return SolveMode::PointwiseImplicit;
  throw std::invalid_argument("unknown solve mode: " + std::string(name));
}

inline std::string solve_mode_name(SolveMode m) {
  return m == SolveMode::Picard ? "picard" : "implicit";
}

struct SolverConfig {
  SolveMode mode = SolveMode::Picard;
  double tol = 1e-10;
  int max_iter = 200;
  int grid_n = 2001;
  QuadRule rule = QuadRule::Simpson;
  std::optional<Expr> initial;    // sampled in t; zero function when absent
  double bracket_radius = 0.0;    // implicit mode; 0 = automatic
};

struct SolveResult {
  GridFunction solution;
  int iterations = 0;
  double residual = std::numeric_limits<double>::infinity();
  bool converged = false;
  std::vector<double> history;  // sup distance per iteration / sweep
  std::vector<std::string> warnings;
  SolveMode mode = SolveMode::Picard;

  explicit SolveResult(GridFunction s) : solution(std::move(s)) {}
};

// One operator application on the grid. Domain violations surface as
// EvalError with the offending node's position in t prepended.
inline GridFunction apply_T(const IntegralProblem& p, const GridFunction& x,
                            QuadRule rule = QuadRule::Simpson) {
  const Grid& grid = x.grid();
  Program f = p.f.compile(detail::kFVars);
  std::vector<double> inner = inner_integral_all(p.g, x, rule);
  std::vector<double> out(x.size());
  for (int i = 0; i < grid.n; ++i) {
    double t = grid.node(i);
    try {
      out[i] = detail::eval3(f, t, inner[i], x[i]);
    } catch (const EvalError& e) {
      throw EvalError("at t = " + fmt17(t) + ": " + e.raw(), e.position());
    }
    if (!std::isfinite(out[i]))
      throw EvalError("at t = " + fmt17(t) + ": operator value is not finite", 0);
  }
  return GridFunction(grid, std::move(out));
}

namespace detail {

struct ScalarRoot {
  double value = 0.0;
  bool found = false;
};

// Solve u = f(t, inner, u) for u. Newton from u0 with a numeric derivative;
// on stall or a domain error, scan [-radius, radius] (doubling the radius up
// to three times) for a sign change and bisect.
inline ScalarRoot solve_node(const Program& f, double t, double inner, double u0, double radius,
                             double tol) {
  auto residual = [&](double u, bool& ok) {
    ok = true;
    try {
      double v = u - eval3(f, t, inner, u);
      if (!std::isfinite(v)) ok = false;
      return ok ? v : 0.0;
    } catch (const EvalError&) {
      ok = false;
      return 0.0;
    }
  };

  bool ok = false;
  double u = u0;
  for (int it = 0; it < 50; ++it) {
    double fu = residual(u, ok);
    if (!ok) break;
    if (std::fabs(fu) <= tol) return {u, true};
    double h = 1e-7 * std::fmax(1.0, std::fabs(u));
    bool okp = false, okm = false;
    double fp = residual(u + h, okp);
    double fm = residual(u - h, okm);
    if (!okp || !okm) break;
    double d = (fp - fm) / (2.0 * h);
    if (d == 0.0 || !std::isfinite(d)) break;
    double next = u - fu / d;
    if (!std::isfinite(next) || std::fabs(next - u0) > 16.0 * radius) break;
    u = next;
  }

  double r = radius;
  for (int expand = 0; expand <= 3; ++expand, r *= 2.0) {
    constexpr int kScan = 64;
    double prev_u = 0.0, prev_f = 0.0;
    bool have_prev = false;
    for (int j = 0; j <= kScan; ++j) {
      double uj = -r + 2.0 * r * j / kScan;
      double fj = residual(uj, ok);
      if (!ok) {
        have_prev = false;
        continue;
      }
      if (std::fabs(fj) <= tol) return {uj, true};
      if (have_prev && prev_f * fj < 0.0) {
        double lo = prev_u, hi = uj, flo = prev_f;
        for (int it = 0; it < 200; ++it) {
          double mid = 0.5 * (lo + hi);
          double fmid = residual(mid, ok);
          if (!ok) break;
          if (std::fabs(fmid) <= tol || hi - lo <= 1e-15 * std::fmax(1.0, std::fabs(mid)))
            return {mid, true};
          if (flo * fmid <= 0.0) {
            hi = mid;
          } else {
            lo = mid;
            flo = fmid;
          }
        }
      }
      prev_u = uj;
      prev_f = fj;
      have_prev = true;
    }
  }
  return {};
}

}  // namespace detail

inline SolveResult solve(const IntegralProblem& p, const SolverConfig& cfg) {
  if (cfg.grid_n < 2) throw std::invalid_argument("solver grid needs at least 2 nodes");
  if (!(cfg.tol > 0.0)) throw std::invalid_argument("solver tolerance must be positive");
  if (cfg.max_iter < 1) throw std::invalid_argument("max_iter must be positive");
  Grid grid(p.horizon, cfg.grid_n);
  GridFunction x =
      cfg.initial ? GridFunction::sample(grid, *cfg.initial) : GridFunction::zeros(grid);
  SolveResult res(x);
  res.mode = cfg.mode;

  if (cfg.mode == SolveMode::Picard) {
    for (int k = 0; k < cfg.max_iter; ++k) {
      GridFunction y = res.solution;
      try {
        y = apply_T(p, x, cfg.rule);
      } catch (const EvalError& e) {
        res.warnings.push_back("operator left its domain on iteration " + std::to_string(k + 1) +
                               " " + e.what());
        // res.solution is the last iterate with a valid image; its residual
        // is the last recorded step (== sup distance to that image).
        res.residual = res.history.empty() ? std::numeric_limits<double>::infinity()
                                           : res.history.back();
        return res;
      }
      double step = sup_norm_distance(y, x);
      res.history.push_back(step);
      res.solution = x;  // image of this iterate exists
      res.iterations = k + 1;
      res.residual = step;
      x = std::move(y);
      if (step <= cfg.tol) {
        res.solution = x;
        res.converged = true;
        return res;
      }
    }
    res.solution = x;
    res.warnings.push_back("no convergence within " + std::to_string(cfg.max_iter) +
                           " iterations (last step " + fmt17(res.residual) + ")");
    return res;
  }

  // Pointwise-implicit sweeps.
  Program f = p.f.compile(detail::kFVars);
  double node_tol = std::fmin(cfg.tol * 1e-2, 1e-12);
  for (int sweep = 0; sweep < cfg.max_iter; ++sweep) {
    std::vector<double> inner = inner_integral_all(p.g, x, cfg.rule);
    double radius =
        cfg.bracket_radius > 0.0 ? cfg.bracket_radius : std::fmax(sup_norm(x) + 1.0, 2.0);
    std::vector<double> next(x.size());
    for (int i = 0; i < grid.n; ++i) {
      detail::ScalarRoot root = detail::solve_node(f, grid.node(i), inner[i], x[i], radius, node_tol);
      if (!root.found) {
        res.warnings.push_back("no root of u - f(t, I, u) in [-" + fmt17(8.0 * radius) + ", " +
                               fmt17(8.0 * radius) + "] at t = " + fmt17(grid.node(i)) +
                               " on sweep " + std::to_string(sweep + 1));
        res.solution = x;
        res.residual = res.history.empty() ? std::numeric_limits<double>::infinity()
                                           : res.history.back();
        return res;
      }
      next[i] = root.value;
    }
    GridFunction y(grid, std::move(next));
    double step = sup_norm_distance(y, x);
    res.history.push_back(step);
    res.iterations = sweep + 1;
    res.residual = step;
    x = std::move(y);
    res.solution = x;
    if (step <= cfg.tol) {
      res.converged = true;
      return res;
    }
  }
  res.warnings.push_back("no convergence within " + std::to_string(cfg.max_iter) +
                         " sweeps (last step " + fmt17(res.residual) + ")");
  return res;
}

// Sampled node-wise contraction inequality over random pairs from the ball
// of radius r (values clamped below by the problem's value floor). The
// failure witness is (t, lhs - rhs) plus the pair's values at that node.
inline PropertyReport contraction_probe(const IntegralProblem& p, const Grid& grid, int pairs,
                                        double r, std::uint64_t seed,
                                        QuadRule rule = QuadRule::Simpson, double tol = kTolAbs) {
  Program a = p.a.compile(detail::kTVar);
  Program psi = p.triple.psi.compile(detail::kUVar);
  Program phi = p.triple.phi_big.compile(detail::kUVar);
  Program density = p.triple.phi_density.compile(detail::kGammaVar);
  auto lam = [&](double u) { return detail::lambda_impl(density, u, kLambdaResolution); };

  std::vector<double> prefix_b = prefix_abs_integral(p.b, grid, rule);
  std::vector<double> slack(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    double t = grid.node(i);
    slack[i] = detail::eval1(psi, lam(2.0 * std::fabs(detail::eval1(a, t)) * prefix_b[i]));
  }

  double lo = p.value_floor(r);
  Rng rng(seed);
  constexpr double kMaxSlope = 2.0;
  for (int k = 0; k < pairs; ++k) {
    GridFunction x = random_trig_member(grid, lo, r, kMaxSlope, rng);
    GridFunction y = random_trig_member(grid, lo, r, kMaxSlope, rng);
    GridFunction tx = apply_T(p, x, rule);
    GridFunction ty = apply_T(p, y, rule);
    for (int i = 0; i < grid.n; ++i) {
      double lhs = detail::eval1(phi, lam(std::fabs(tx[i] - ty[i])));
      double rhs = detail::eval1(psi, lam(std::fabs(x[i] - y[i]))) + slack[i];
      if (lhs > rhs + tol)
        return PropertyReport::fail("contraction_probe",
                                    {{grid.node(i), lhs - rhs}, {x[i], y[i]}});
    }
  }
  return PropertyReport::pass("contraction_probe");
}

}  // namespace vhfix
