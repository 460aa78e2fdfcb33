#pragma once

/* Comparison-function triple (Psi, Phi, phi) and its sampled property checks.
 *
 * Psi and Phi are expressions in "u", the density phi in "gamma". Lambda is
 * the running integral of the density,
 *
 *     Lambda(u) = integral_0^u phi(gamma) dgamma,
 *
 * evaluated by composite Simpson; Lambda(0) is 0.0 exactly. The checks are
 * sampled with deterministic low-discrepancy points and report pass/fail
 * with a first-violation witness. Upper semicontinuity is not checked
 * (assumed; it is not sampleable), which every suite records as a note.
 *
 * The decay-vs-contraction equivalence check classifies, per start value t:
 *   A: iterating Psi n_max times from t lands below decay_tol,
 *   B: Psi(t) < t (with tolerance).
 * It passes when A and B agree at every sampled t.
 */

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "vhfix/expr.hpp"
#include "vhfix/report.hpp"
#include "vhfix/sampling.hpp"

namespace vhfix {

inline constexpr double kTolAbs = 1e-9;       // sampled inequality slack
inline constexpr double kTolMono = 1e-12;     // monotonicity slack
inline constexpr double kDefaultUMax = 100.0;
inline constexpr int kDefaultCheckPoints = 10000;
inline constexpr int kDefaultNMax = 10000;
inline constexpr double kDefaultDecayTol = 1e-3;
inline constexpr int kLambdaResolution = 128;

struct ComparisonTriple {
  Expr psi;          // nondecreasing, concave, Psi(t) < t wanted
  Expr phi_big;      // nondecreasing, subadditive, Phi(t) >= t wanted
  Expr phi_density;  // nonnegative, locally summable, positive mass near 0
  double u_max = kDefaultUMax;
  int check_points = kDefaultCheckPoints;
  std::string tag;                 // preset name when built from one
  std::vector<std::string> notes;  // surfaced by reports
};

namespace detail {
inline constexpr std::string_view kUVar[] = {"u"};
inline constexpr std::string_view kGammaVar[] = {"gamma"};

inline double eval1(const Program& p, double v) { return p.eval({&v, 1}); }

inline double lambda_impl(const Program& density, double u, int resolution) {
  if (u == 0.0) return 0.0;
  return simpson([&](double g) { return eval1(density, g); }, 0.0, u, resolution);
}
}  // namespace detail

// Lambda(u) via composite Simpson with `resolution` subdivisions.
inline double lambda(const ComparisonTriple& triple, double u, int resolution = kLambdaResolution) {
  if (resolution < 1) throw std::invalid_argument("lambda resolution must be positive");
  Program density = triple.phi_density.compile(detail::kGammaVar);
  return detail::lambda_impl(density, u, resolution);
}

// Sampled monotonicity on consecutive uniform nodes of [0, u_max].
inline PropertyReport check_nondecreasing(std::string name, const Expr& e, std::string_view var,
                                          double u_max, int points, double tol = kTolMono) {
  std::string_view vars[] = {var};
  Program p = e.compile(vars);
  double prev_u = 0.0, prev_v = detail::eval1(p, 0.0);
  for (int k = 1; k < points; ++k) {
    double u = u_max * k / (points - 1);
    double v = detail::eval1(p, u);
    if (v < prev_v - tol)
      return PropertyReport::fail(std::move(name), {{prev_u, prev_v}, {u, v}});
    prev_u = u;
    prev_v = v;
  }
  return PropertyReport::pass(std::move(name));
}

// Midpoint concavity e((a+b)/2) >= (e(a)+e(b))/2 - tol on low-discrepancy pairs.
inline PropertyReport check_concave(std::string name, const Expr& e, std::string_view var,
                                    double u_max, int points, double tol = kTolAbs) {
  std::string_view vars[] = {var};
  Program p = e.compile(vars);
  HaltonSeq seq(2, 0);
  for (int k = 0; k < points; ++k) {
    double a = u_max * seq.at(k, 0);
    double b = u_max * seq.at(k, 1);
    double lhs = detail::eval1(p, 0.5 * (a + b));
    double rhs = 0.5 * (detail::eval1(p, a) + detail::eval1(p, b));
    if (lhs < rhs - tol)
      return PropertyReport::fail(std::move(name), {{a, detail::eval1(p, a)}, {b, detail::eval1(p, b)}});
  }
  return PropertyReport::pass(std::move(name));
}

// e(a+b) <= e(a) + e(b) + tol on low-discrepancy pairs with a+b <= u_max.
inline PropertyReport check_subadditive(std::string name, const Expr& e, std::string_view var,
                                        double u_max, int points, double tol = kTolAbs) {
  std::string_view vars[] = {var};
  Program p = e.compile(vars);
  HaltonSeq seq(2, 0);
  int checked = 0;
  for (std::uint64_t k = 0; checked < points && k < static_cast<std::uint64_t>(points) * 4; ++k) {
    double a = u_max * seq.at(k, 0);
    double b = u_max * seq.at(k, 1);
    if (a + b > u_max) continue;
    ++checked;
    double lhs = detail::eval1(p, a + b);
    double rhs = detail::eval1(p, a) + detail::eval1(p, b);
    if (lhs > rhs + tol)
      return PropertyReport::fail(std::move(name), {{a, detail::eval1(p, a)}, {b, detail::eval1(p, b)}});
  }
  return PropertyReport::pass(std::move(name));
}

// e(u) >= u - tol on uniform samples of [0, u_max].
inline PropertyReport check_dominates_identity(std::string name, const Expr& e,
                                               std::string_view var, double u_max, int points,
                                               double tol = kTolAbs) {
  std::string_view vars[] = {var};
  Program p = e.compile(vars);
  for (int k = 0; k < points; ++k) {
    double u = u_max * k / (points - 1);
    double v = detail::eval1(p, u);
    if (v < u - tol) return PropertyReport::fail(std::move(name), {{u, v}});
  }
  return PropertyReport::pass(std::move(name));
}

// e(u) < u - tol for every sampled u in (0, u_max].
inline PropertyReport check_below_identity(std::string name, const Expr& e, std::string_view var,
                                           double u_max, int points, double tol = kTolAbs) {
  std::string_view vars[] = {var};
  Program p = e.compile(vars);
  for (int k = 1; k < points; ++k) {
    double u = u_max * k / (points - 1);
    double v = detail::eval1(p, u);
    if (!(v < u - tol)) return PropertyReport::fail(std::move(name), {{u, v}});
  }
  return PropertyReport::pass(std::move(name));
}

// The orbit t, Psi(t), Psi^2(t), ..., Psi^n_max(t).
inline std::vector<double> iterate_psi(const ComparisonTriple& triple, double t0, int n_max) {
  Program psi = triple.psi.compile(detail::kUVar);
  std::vector<double> orbit;
  orbit.reserve(n_max + 1);
  double u = t0;
  orbit.push_back(u);
  for (int k = 0; k < n_max; ++k) {
    u = detail::eval1(psi, u);
    orbit.push_back(u);
  }
  return orbit;
}

inline PropertyReport check_decay_equivalence(const ComparisonTriple& triple,
                                               const std::vector<double>& starts,
                                               int n_max = kDefaultNMax,
                                               double decay_tol = kDefaultDecayTol) {
  Program psi = triple.psi.compile(detail::kUVar);
  for (double t : starts) {
    if (!(t > 0.0)) throw std::invalid_argument("equivalence starts must be positive");
    double u = t;
    for (int k = 0; k < n_max; ++k) u = detail::eval1(psi, u);
    bool decays = u < decay_tol;
    bool contracts = detail::eval1(psi, t) < t - kTolAbs;
    if (decays != contracts)
      return PropertyReport::fail("psi_decay_equivalence", {{t, u}, {t, detail::eval1(psi, t)}});
  }
  return PropertyReport::pass("psi_decay_equivalence");
}

// Lambda(eps) > 0 for each probe epsilon: the density carries mass near 0.
inline PropertyReport check_phi_positivity(const ComparisonTriple& triple,
                                           const std::vector<double>& epsilons,
                                           int resolution = kLambdaResolution) {
  Program density = triple.phi_density.compile(detail::kGammaVar);
  for (double eps : epsilons) {
    if (!(eps > 0.0)) throw std::invalid_argument("positivity epsilons must be positive");
    double mass = detail::lambda_impl(density, eps, resolution);
    if (!(mass > 0.0)) return PropertyReport::fail("phi_density_positive", {{eps, mass}});
  }
  return PropertyReport::pass("phi_density_positive");
}

// Construction-time sanity: everything evaluates on the check domain,
// Psi(0) >= 0, Phi(0) >= 0, and the density is nonnegative there.
inline std::vector<std::string> validate_triple(const ComparisonTriple& triple, int points = 256) {
  std::vector<std::string> issues;
  try {
    Program psi = triple.psi.compile(detail::kUVar);
    Program phi = triple.phi_big.compile(detail::kUVar);
    Program density = triple.phi_density.compile(detail::kGammaVar);
    if (detail::eval1(psi, 0.0) < 0.0) issues.push_back("psi(0) is negative");
    if (detail::eval1(phi, 0.0) < 0.0) issues.push_back("phi_big(0) is negative");
    for (int k = 0; k < points; ++k) {
      double u = triple.u_max * k / (points - 1);
      detail::eval1(psi, u);
      detail::eval1(phi, u);
      if (detail::eval1(density, u) < 0.0) {
        issues.push_back("phi_density is negative at gamma = " + fmt17(u));
        break;
      }
    }
  } catch (const std::exception& e) {
    issues.push_back(std::string("triple does not evaluate on the check domain: ") + e.what());
  }
  return issues;
}

inline std::vector<double> default_equivalence_starts(double u_max) {
  std::vector<double> starts;
  for (double t = u_max; t > 1e-4; t /= 10.0) starts.push_back(t);
  return starts;
}

// Canonical check battery over a triple, in report order.
inline std::vector<PropertyReport> comparison_suite(const ComparisonTriple& triple,
                                                    int n_max = kDefaultNMax,
                                                    double decay_tol = kDefaultDecayTol) {
  const double U = triple.u_max;
  const int N = triple.check_points;
  std::vector<PropertyReport> out;
  out.push_back(check_nondecreasing("psi_nondecreasing", triple.psi, "u", U, N));
  out.push_back(check_concave("psi_concave", triple.psi, "u", U, N));
  out.push_back(check_below_identity("psi_below_identity", triple.psi, "u", U, N));
  out.push_back(check_decay_equivalence(triple, default_equivalence_starts(U), n_max, decay_tol));
  out.push_back(check_nondecreasing("phi_nondecreasing", triple.phi_big, "u", U, N));
  out.push_back(check_subadditive("phi_subadditive", triple.phi_big, "u", U, N));
  out.push_back(check_dominates_identity("phi_dominates_identity", triple.phi_big, "u", U, N));
  out.push_back(check_phi_positivity(triple, {1e-6, 1e-3, 1.0, U}));
  return out;
}

// Named parameter sets. "darbo" collapses the integral condition to the
// classical contraction bound (identity Phi, unit density, linear Psi);
// "branciari" keeps a genuine integral density; "aghajani" keeps identity
// Phi with a nonlinear Psi; "example32" is the worked-example triple, with
// the identity Phi standing in for the k->1 limit of k*u scalings, which
// fail the domination requirement for k < 1.
inline ComparisonTriple preset_triple(std::string_view name) {
  ComparisonTriple t;
  t.tag = std::string(name);
  if (name == "darbo") {
    t.psi = parse_expr("0.5*u");
    t.phi_big = parse_expr("u");
    t.phi_density = parse_expr("1");
  } else if (name == "branciari") {
    t.psi = parse_expr("0.5*u");
    t.phi_big = parse_expr("u");
    t.phi_density = parse_expr("2*gamma");
  } else if (name == "aghajani") {
    t.psi = parse_expr("ln(1+u)");
    t.phi_big = parse_expr("u");
    t.phi_density = parse_expr("1");
  } else if (name == "example32") {
    t.psi = parse_expr("ln(1+u)");
    t.phi_big = parse_expr("u");
    t.phi_density = parse_expr("1");
    t.notes.push_back(
        "preset example32: the dominating function uses the k->1 limit of k*u; "
        "k < 1 scalings fail the Phi(t) >= t requirement");
  } else {
    throw std::invalid_argument("unknown comparison preset '" + std::string(name) + "'");
  }
  return t;
}

}  // namespace vhfix
