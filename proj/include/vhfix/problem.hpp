#pragma once

/* A nonlinear integral-equation instance
 *
 *     x(t) = f(t, integral_0^t g(t,s,x(s)) ds, x(t)),   t in [0, horizon],
 *
 * with a factored kernel bound |g(t,s,x)| <= a(t) b(s), and the sampled
 * checks that every structural hypothesis places on it:
 *
 *   f evaluates and f(t,x,0) stays bounded on samples        (wellposed)
 *   Phi(Lambda(|f(t,.,y1)-f(t,.,y2)|)) <= Psi(Lambda(|y1-y2|))  in both slots
 *   |g| <= a(t) b(s), a decays, b absolutely integrable
 *   a ball radius r0 with Psi(Lambda(r)) + M0 + M1 <= Lambda(r) exists
 *
 * where M0 = sup_t Lambda(|a(t)| integral_0^t |b|) and
 * M1 = Phi(Lambda(sup_t |f(t,0,0)|)).
 *
 * f's value arguments are sampled from [max(-r, x_min), r]; x_min defaults
 * to 0 because the framework declares f on nonnegative value arguments.
 * The kernel argument of g is sampled from the full [-r, r].
 */

#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "vhfix/comparison.hpp"
#include "vhfix/expr.hpp"
#include "vhfix/grid.hpp"
#include "vhfix/report.hpp"
#include "vhfix/sampling.hpp"

namespace vhfix {

inline constexpr int kDefaultHypothesisSamples = 10000;
inline constexpr int kDefaultM0Samples = 20001;
inline constexpr int kDefaultM1Samples = 100001;
inline constexpr double kDefaultRMax = 20.0;
inline constexpr int kDefaultR0Resolution = 20000;
inline constexpr double kDefaultDecayRatio = 0.05;
inline constexpr double kDefaultTailFraction = 0.1;
inline constexpr int kInnerSimpsonSubdiv = 256;

struct IntegralProblem {
  Expr f;  // f(t, x, y): x is the inner integral value, y the unknown's value
  Expr g;  // g(t, s, x)
  Expr a;  // a(t)
  Expr b;  // b(s)
  double horizon = 10.0;
  ComparisonTriple triple;
  double x_min = 0.0;  // lower end of sampled value ranges for f's arguments

  double value_floor(double r) const { return std::fmax(-r, x_min); }
};

namespace detail {
inline constexpr std::string_view kFVars[] = {"t", "x", "y"};
inline constexpr std::string_view kTVar[] = {"t"};
inline constexpr std::string_view kSVar[] = {"s"};

inline double eval3(const Program& p, double t, double x, double y) {
  double args[3] = {t, x, y};
  return p.eval({args, 3});
}
}  // namespace detail

struct HypothesisReport {
  PropertyReport f_wellposed;
  PropertyReport f_contraction;
  PropertyReport kernel_bound;
  PropertyReport a_decay;
  PropertyReport b_summable;
  PropertyReport self_mapping;
  double m0 = 0.0;
  double m1 = 0.0;
  std::optional<double> r0;
  std::vector<std::string> notes;
  std::vector<std::string> warnings;

  bool all_pass() const {
    return f_wellposed.passed && f_contraction.passed && kernel_bound.passed && a_decay.passed &&
           b_summable.passed && self_mapping.passed;
  }

  void write(std::ostream& os) const {
    for (const std::string& n : notes) os << "note = " << n << "\n";
    for (const PropertyReport* r :
         {&f_wellposed, &f_contraction, &kernel_bound, &a_decay, &b_summable, &self_mapping})
      os << r->property << " = " << (r->passed ? "pass" : "fail") << "\n";
    os << "M0 = " << fmt17(m0) << "\n";
    os << "M1 = " << fmt17(m1) << "\n";
    os << "r0 = " << (r0 ? fmt17(*r0) : std::string("none")) << "\n";
    os << "WARNINGS\n";
    if (warnings.empty()) os << "(none)\n";
    for (const std::string& w : warnings) os << "warning: " << w << "\n";
  }
};

// |g(t,s,x)| <= a(t) b(s) + tol on low-discrepancy samples with s <= t <= L
// and x in [-r, r].
inline PropertyReport check_kernel_bound(const IntegralProblem& p,
                                         int samples = kDefaultHypothesisSamples, double r = 1.0,
                                         std::uint64_t seed = 0, double tol = kTolAbs) {
  Program g = p.g.compile(detail::kKernelVars);
  Program a = p.a.compile(detail::kTVar);
  Program b = p.b.compile(detail::kSVar);
  HaltonSeq seq(3, seed);
  for (int k = 0; k < samples; ++k) {
    double t = p.horizon * seq.at(k, 0);
    double s = t * seq.at(k, 1);
    double x = -r + 2.0 * r * seq.at(k, 2);
    double args[3] = {t, s, x};
    double gv = std::fabs(g.eval({args, 3}));
    double bound = a.eval({&t, 1}) * b.eval({&s, 1});
    if (gv > bound + tol)
      return PropertyReport::fail("kernel_bound", {{t, gv}, {s, bound}, {x, gv - bound}});
  }
  return PropertyReport::pass("kernel_bound");
}

// max |a| over the trailing tail_fraction of [0, L] must drop below
// decay_ratio times max |a| over all of [0, L].
inline PropertyReport check_a_decay(const IntegralProblem& p,
                                    double tail_fraction = kDefaultTailFraction,
                                    double decay_ratio = kDefaultDecayRatio, int samples = 2001) {
  Program a = p.a.compile(detail::kTVar);
  double global = 0.0, tail = 0.0, tail_at = 0.0;
  double tail_start = p.horizon * (1.0 - tail_fraction);
  for (int k = 0; k < samples; ++k) {
    double t = p.horizon * k / (samples - 1);
    double v = std::fabs(a.eval({&t, 1}));
    global = std::fmax(global, v);
    if (t >= tail_start && v >= tail) {
      tail = v;
      tail_at = t;
    }
  }
  double threshold = decay_ratio * global;
  if (tail > threshold)
    return PropertyReport::fail("a_decay", {{tail_at, tail}, {tail_start, threshold}});
  return PropertyReport::pass("a_decay");
}

// Simpson integral of |b| over [0, L]: stable under grid doubling and with a
// tail contribution below 1% of the total.
inline PropertyReport check_b_summable(const IntegralProblem& p, int samples = 2001,
                                       double tail_fraction = kDefaultTailFraction) {
  Program b = p.b.compile(detail::kSVar);
  auto absb = [&](double s) { return std::fabs(b.eval({&s, 1})); };
  double coarse = simpson(absb, 0.0, p.horizon, samples - 1);
  double fine = simpson(absb, 0.0, p.horizon, 2 * (samples - 1));
  double scale = std::fmax(std::fabs(fine), 1e-300);
  if (std::fabs(fine - coarse) > std::fmax(1e-12, 1e-6 * scale))
    return PropertyReport::fail("b_summable", {{coarse, fine}});
  double tail = simpson(absb, p.horizon * (1.0 - tail_fraction), p.horizon, samples - 1);
  if (fine > 0.0 && tail > 0.01 * fine)
    return PropertyReport::fail("b_summable", {{p.horizon * (1.0 - tail_fraction), tail}, {0.0, fine}});
  return PropertyReport::pass("b_summable");
}

// f(t, x, 0) evaluates to a finite value on samples (t in [0,L], x in the
// sampled value range).
inline PropertyReport check_f_wellposed(const IntegralProblem& p,
                                        int samples = kDefaultHypothesisSamples, double r = 1.0) {
  Program f = p.f.compile(detail::kFVars);
  HaltonSeq seq(2, 0);
  double lo = p.value_floor(r);
  for (int k = 0; k < samples; ++k) {
    double t = p.horizon * seq.at(k, 0);
    double x = lo + (r - lo) * seq.at(k, 1);
    try {
      double v = detail::eval3(f, t, x, 0.0);
      if (!std::isfinite(v)) return PropertyReport::fail("f_wellposed", {{t, v}, {x, 0.0}});
    } catch (const EvalError&) {
      return PropertyReport::fail("f_wellposed", {{t, x}});
    }
  }
  return PropertyReport::pass("f_wellposed");
}

// Phi(Lambda(|f(t,x,y1) - f(t,x,y2)|)) <= Psi(Lambda(|y1 - y2|)) + tol and
// the same with the middle argument varying; samples from
// [0,L] x [value_floor, r]^3.
inline PropertyReport check_f_contraction(const IntegralProblem& p,
                                          int samples = kDefaultHypothesisSamples, double r = 1.0,
                                          double tol = kTolAbs) {
  Program f = p.f.compile(detail::kFVars);
  Program psi = p.triple.psi.compile(detail::kUVar);
  Program phi = p.triple.phi_big.compile(detail::kUVar);
  Program density = p.triple.phi_density.compile(detail::kGammaVar);
  auto lam = [&](double u) { return detail::lambda_impl(density, u, kLambdaResolution); };
  double lo = p.value_floor(r);
  HaltonSeq seq(4, 0);
  for (int pass_id = 0; pass_id < 2; ++pass_id) {
    for (int k = 0; k < samples; ++k) {
      double t = p.horizon * seq.at(k, 0);
      double c = lo + (r - lo) * seq.at(k, 1);  // the slot held fixed
      double v1 = lo + (r - lo) * seq.at(k, 2);
      double v2 = lo + (r - lo) * seq.at(k, 3);
      double f1, f2;
      if (pass_id == 0) {
        f1 = detail::eval3(f, t, c, v1);
        f2 = detail::eval3(f, t, c, v2);
      } else {
        f1 = detail::eval3(f, t, v1, c);
        f2 = detail::eval3(f, t, v2, c);
      }
      double lhs = detail::eval1(phi, lam(std::fabs(f1 - f2)));
      double rhs = detail::eval1(psi, lam(std::fabs(v1 - v2)));
      if (lhs > rhs + tol)
        return PropertyReport::fail("f_contraction", {{t, lhs - rhs}, {v1, f1}, {v2, f2}});
    }
  }
  return PropertyReport::pass("f_contraction");
}

// M0 = max over sampled t of Lambda(|a(t)| integral_0^t |b|). The inner
// integral uses a fixed-subdivision Simpson rule so the value at a given t
// does not depend on the t-sample count (nested refinements are monotone).
inline double estimate_M0(const IntegralProblem& p, int t_samples = kDefaultM0Samples) {
  Program a = p.a.compile(detail::kTVar);
  Program b = p.b.compile(detail::kSVar);
  Program density = p.triple.phi_density.compile(detail::kGammaVar);
  auto absb = [&](double s) { return std::fabs(b.eval({&s, 1})); };
  double m0 = 0.0;
  for (int k = 0; k < t_samples; ++k) {
    double t = p.horizon * k / (t_samples - 1);
    double bint = simpson(absb, 0.0, t, kInnerSimpsonSubdiv);
    double u = std::fabs(a.eval({&t, 1})) * bint;
    m0 = std::fmax(m0, detail::lambda_impl(density, u, kLambdaResolution));
  }
  return m0;
}

// M1 = Phi(Lambda(sup over t of |f(t, 0, 0)|)). The sup is a dense scan
// followed by a ternary-search polish around the best sample, so smooth
// maxima are resolved to machine precision rather than grid quantization.
inline double estimate_M1(const IntegralProblem& p, int t_samples = kDefaultM1Samples) {
  Program f = p.f.compile(detail::kFVars);
  Program phi = p.triple.phi_big.compile(detail::kUVar);
  Program density = p.triple.phi_density.compile(detail::kGammaVar);
  auto value = [&](double t) { return std::fabs(detail::eval3(f, t, 0.0, 0.0)); };
  double sup = 0.0, arg = 0.0;
  for (int k = 0; k < t_samples; ++k) {
    double t = p.horizon * k / (t_samples - 1);
    double v = value(t);
    if (v > sup) {
      sup = v;
      arg = t;
    }
  }
  double h = p.horizon / (t_samples - 1);
  double lo = std::fmax(0.0, arg - h), hi = std::fmin(p.horizon, arg + h);
  for (int it = 0; it < 200; ++it) {
    double u1 = lo + (hi - lo) / 3.0, u2 = hi - (hi - lo) / 3.0;
    double v1 = value(u1), v2 = value(u2);
    sup = std::fmax(sup, std::fmax(v1, v2));
    if (v1 < v2) {
      lo = u1;
    } else {
      hi = u2;
    }
  }
  return detail::eval1(phi, detail::lambda_impl(density, sup, kLambdaResolution));
}

// Smallest sampled r in (0, r_max] with Psi(Lambda(r)) + M0 + M1 <= Lambda(r).
inline std::optional<double> find_r0(const IntegralProblem& p, double m0, double m1,
                                     double r_max = kDefaultRMax,
                                     int resolution = kDefaultR0Resolution) {
  Program psi = p.triple.psi.compile(detail::kUVar);
  Program density = p.triple.phi_density.compile(detail::kGammaVar);
  for (int j = 1; j <= resolution; ++j) {
    double r = r_max * j / resolution;
    double lr = detail::lambda_impl(density, r, kLambdaResolution);
    if (detail::eval1(psi, lr) + m0 + m1 <= lr) return r;
  }
  return std::nullopt;
}

inline std::optional<double> find_r0(const IntegralProblem& p, double r_max = kDefaultRMax,
                                     int resolution = kDefaultR0Resolution) {
  return find_r0(p, estimate_M0(p), estimate_M1(p), r_max, resolution);
}

// Full hypothesis battery. The sampled ball radius defaults to the found r0
// (falling back to 1 when none exists) so value samples cover the ball the
// fixed-point argument ranges over.
inline HypothesisReport run_hypotheses(const IntegralProblem& p,
                                       int samples = kDefaultHypothesisSamples) {
  HypothesisReport rep;
  rep.notes.push_back(
      "self_mapping checks the corrected ball condition "
      "Psi(Lambda(r)) + M0 + M1 <= Lambda(r)");
  for (const std::string& n : p.triple.notes) rep.notes.push_back(n);
  rep.m0 = estimate_M0(p);
  rep.m1 = estimate_M1(p);
  rep.r0 = find_r0(p, rep.m0, rep.m1);
  double r = rep.r0.value_or(1.0);
  rep.f_wellposed = check_f_wellposed(p, samples, r);
  rep.f_contraction = check_f_contraction(p, samples, r);
  rep.kernel_bound = check_kernel_bound(p, samples, r);
  rep.a_decay = check_a_decay(p);
  rep.b_summable = check_b_summable(p);
  if (rep.r0) {
    rep.self_mapping = PropertyReport::pass("self_mapping");
  } else {
    rep.self_mapping = PropertyReport::fail("self_mapping", {{kDefaultRMax, rep.m0 + rep.m1}});
    rep.warnings.push_back("no ball radius up to " + fmt17(kDefaultRMax) +
                           " satisfies Psi(Lambda(r)) + M0 + M1 <= Lambda(r)");
  }
  for (const PropertyReport* pr :
       {&rep.f_wellposed, &rep.f_contraction, &rep.kernel_bound, &rep.a_decay, &rep.b_summable})
    if (!pr->passed) rep.warnings.push_back(pr->property + " failed: " + pr->to_line());
  return rep;
}

}  // namespace vhfix
