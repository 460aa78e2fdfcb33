#pragma once

/* Measure-of-noncompactness estimation on finite ensembles of grid
 * functions, and the sampled set-shrinkage iteration A_{n+1} = Conv(T A_n).
 *
 * For an ensemble X on [0, L]:
 *
 *   modulus(x, eps)      sup |x(t) - x(s)| over |t - s| <= eps
 *   omega0(X)            max member modulus at the smallest scheduled eps
 *                        (the eps -> 0 proxy)
 *   tail_diam(X)         max node-wise diameter over the trailing
 *                        tail_fraction of nodes (the t -> infinity proxy)
 *   mu_hat(X)            omega0 + tail_diam
 *
 * Convex hulls of function sets are infinite; hull_sample keeps every
 * original member and adds random convex combinations with simplex-uniform
 * weights, deterministic in the seed. Ensembles never deduplicate members;
 * every estimate is a max, so duplicates are harmless.
 */

#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vhfix/grid.hpp"
#include "vhfix/problem.hpp"
#include "vhfix/report.hpp"
#include "vhfix/sampling.hpp"
#include "vhfix/solver.hpp"

namespace vhfix {

inline constexpr int kDefaultEnsembleSize = 16;
inline constexpr int kDefaultDarboSteps = 10;
inline constexpr std::uint64_t kDefaultSeed = 42;

// Nonempty set of grid functions sharing one grid.
class Ensemble {
 public:
  explicit Ensemble(std::vector<GridFunction> members) : members_(std::move(members)) {
    if (members_.empty()) throw std::invalid_argument("ensemble needs at least one member");
    for (const GridFunction& m : members_) require_same_grid(members_.front(), m);
  }

  const Grid& grid() const { return members_.front().grid(); }
  int size() const { return static_cast<int>(members_.size()); }
  const GridFunction& operator[](int k) const { return members_[k]; }
  const std::vector<GridFunction>& members() const { return members_; }

 private:
  std::vector<GridFunction> members_;
};

struct MncEstimate {
  double omega0 = 0.0;
  double tail_diam = 0.0;
  double mu_hat = 0.0;  // always omega0 + tail_diam
  std::vector<double> epsilon_schedule;
};

// Geometric schedule L/2, L/4, ... truncated where the discrete modulus
// would degenerate to adjacent-node differences.
inline std::vector<double> default_eps_schedule(const Grid& grid) {
  std::vector<double> eps;
  for (double e = grid.length / 2.0; e >= 2.0 * grid.spacing(); e /= 2.0) eps.push_back(e);
  if (eps.empty()) eps.push_back(2.0 * grid.spacing());
  return eps;
}

// sup |x(t_i) - x(t_j)| over |t_i - t_j| <= eps, in O(n * ceil(eps/h)).
inline double modulus(const GridFunction& x, double eps) {
  const Grid& grid = x.grid();
  double h = grid.spacing();
  if (!(eps >= h)) throw std::invalid_argument("modulus needs eps >= grid spacing");
  int w = static_cast<int>(std::floor(eps / h + 1e-9));
  double m = 0.0;
  for (int i = 0; i < grid.n; ++i) {
    int jmax = std::min(grid.n - 1, i + w);
    for (int j = i + 1; j <= jmax; ++j) m = std::fmax(m, std::fabs(x[i] - x[j]));
  }
  return m;
}

inline double ensemble_modulus(const Ensemble& X, double eps) {
  double m = 0.0;
  for (const GridFunction& x : X.members()) m = std::fmax(m, modulus(x, eps));
  return m;
}

// Node-wise diameter max - min, O(members).
inline double diam_at(const Ensemble& X, int i) {
  double lo = X[0][i], hi = X[0][i];
  for (const GridFunction& x : X.members()) {
    lo = std::fmin(lo, x[i]);
    hi = std::fmax(hi, x[i]);
  }
  return hi - lo;
}

inline MncEstimate estimate_mu(const Ensemble& X, std::vector<double> eps_schedule,
                               double tail_fraction = kDefaultTailFraction) {
  if (eps_schedule.empty()) throw std::invalid_argument("epsilon schedule is empty");
  for (std::size_t k = 1; k < eps_schedule.size(); ++k)
    if (!(eps_schedule[k] < eps_schedule[k - 1]))
      throw std::invalid_argument("epsilon schedule must decrease");
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0))
    throw std::invalid_argument("tail_fraction must lie in (0, 1]");
  MncEstimate est;
  est.epsilon_schedule = std::move(eps_schedule);
  est.omega0 = ensemble_modulus(X, est.epsilon_schedule.back());
  int n = X.grid().n;
  int tail_count = std::max(1, static_cast<int>(std::lround(tail_fraction * n)));
  for (int i = n - tail_count; i < n; ++i) est.tail_diam = std::fmax(est.tail_diam, diam_at(X, i));
  est.mu_hat = est.omega0 + est.tail_diam;
  return est;
}

inline MncEstimate estimate_mu(const Ensemble& X) {
  return estimate_mu(X, default_eps_schedule(X.grid()));
}

// All original members plus count - size random convex combinations.
inline Ensemble hull_sample(const Ensemble& X, int count, std::uint64_t seed) {
  if (count < X.size()) throw std::invalid_argument("hull sample count below member count");
  std::vector<GridFunction> out = X.members();
  out.reserve(count);
  Rng rng(seed);
  int n = X.grid().n;
  std::vector<double> w(X.size());
  while (static_cast<int>(out.size()) < count) {
    double total = 0.0;
    for (double& wk : w) {
      wk = -std::log(1.0 - rng.uniform());  // exponential draws normalize to simplex-uniform
      total += wk;
    }
    if (total <= 0.0) continue;
    std::vector<double> vals(n, 0.0);
    for (int k = 0; k < X.size(); ++k) {
      double wk = w[k] / total;
      for (int i = 0; i < n; ++i) vals[i] += wk * X[k][i];
    }
    out.emplace_back(X.grid(), std::move(vals));
  }
  return Ensemble(std::move(out));
}

inline Ensemble random_ensemble(const Grid& grid, int size, double lo, double hi, double max_slope,
                                std::uint64_t seed) {
  if (size < 1) throw std::invalid_argument("ensemble size must be positive");
  Rng rng(seed);
  std::vector<GridFunction> members;
  members.reserve(size);
  for (int k = 0; k < size; ++k) members.push_back(random_trig_member(grid, lo, hi, max_slope, rng));
  return Ensemble(std::move(members));
}

// A_0 = X0, A_{n+1} = hull sample of the member-wise image T A_n; returns
// the mu estimate of every A_n, n = 0..n_steps. Evaluation errors from the
// operator propagate to the caller.
inline std::vector<MncEstimate> darbo_iterate(const IntegralProblem& p, const Ensemble& X0,
                                              int n_steps, int hull_count, std::uint64_t seed,
                                              double tail_fraction = kDefaultTailFraction,
                                              QuadRule rule = QuadRule::Simpson) {
  if (n_steps < 0) throw std::invalid_argument("step count must be nonnegative");
  std::vector<double> schedule = default_eps_schedule(X0.grid());
  std::vector<MncEstimate> out;
  out.reserve(n_steps + 1);
  Ensemble A = X0;
  out.push_back(estimate_mu(A, schedule, tail_fraction));
  for (int step = 1; step <= n_steps; ++step) {
    std::vector<GridFunction> images;
    images.reserve(A.size());
    for (int k = 0; k < A.size(); ++k) images.push_back(apply_T(p, A[k], rule));
    int count = std::max(hull_count, static_cast<int>(images.size()));
    A = hull_sample(Ensemble(std::move(images)), count, seed + step);
    out.push_back(estimate_mu(A, schedule, tail_fraction));
  }
  return out;
}

inline void write_darbo_csv(const std::vector<MncEstimate>& steps, std::ostream& os) {
  os << "step,omega0,tail_diam,mu_hat\n";
  for (std::size_t i = 0; i < steps.size(); ++i)
    os << i << "," << fmt17(steps[i].omega0) << "," << fmt17(steps[i].tail_diam) << ","
       << fmt17(steps[i].mu_hat) << "\n";
}

// Phi(Lambda(mu_hat of a hull sample of TX)) <= Psi(Lambda(mu_hat of X)) + tol.
inline PropertyReport check_condensing_inequality(const IntegralProblem& p, const Ensemble& X,
                                                  int hull_count, std::uint64_t seed,
                                                  double tail_fraction = kDefaultTailFraction,
                                                  QuadRule rule = QuadRule::Simpson,
                                                  double tol = kTolAbs) {
  std::vector<double> schedule = default_eps_schedule(X.grid());
  double mu_x = estimate_mu(X, schedule, tail_fraction).mu_hat;
  std::vector<GridFunction> images;
  images.reserve(X.size());
  for (int k = 0; k < X.size(); ++k) images.push_back(apply_T(p, X[k], rule));
  Ensemble tx = hull_sample(Ensemble(std::move(images)), std::max(hull_count, X.size()), seed);
  double mu_tx = estimate_mu(tx, schedule, tail_fraction).mu_hat;
  Program psi = p.triple.psi.compile(detail::kUVar);
  Program phi = p.triple.phi_big.compile(detail::kUVar);
  Program density = p.triple.phi_density.compile(detail::kGammaVar);
  double lhs = detail::eval1(phi, detail::lambda_impl(density, mu_tx, kLambdaResolution));
  double rhs = detail::eval1(psi, detail::lambda_impl(density, mu_x, kLambdaResolution));
  if (lhs > rhs + tol)
    return PropertyReport::fail("condensing_inequality", {{mu_tx, lhs}, {mu_x, rhs}});
  return PropertyReport::pass("condensing_inequality");
}

}  // namespace vhfix
