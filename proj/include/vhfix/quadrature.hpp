#pragma once

/* Composite Newton-Cotes rules on uniform spacings.
 *
 * Value-based rules integrate a prefix of tabulated node values. The Simpson
 * rule needs an even panel count; on an odd count it applies Simpson to the
 * first i-1 panels and a single trapezoid to the last one, which keeps i = 1
 * well-defined and costs one order of accuracy only on that panel.
 */

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

namespace vhfix {

enum class QuadRule { Trapezoid, Simpson };

inline QuadRule quad_rule_from_name(const std::string& name) {
  if (name == "trapezoid") return QuadRule::Trapezoid;
  if (name == "simpson") return QuadRule::Simpson;
  throw std::invalid_argument("unknown quadrature rule '" + name + "'");
}

inline const char* quad_rule_name(QuadRule r) {
  return r == QuadRule::Trapezoid ? "trapezoid" : "simpson";
}

// Integral of tabulated values over the first `panels` panels of width h.
inline double integrate_prefix(std::span<const double> values, double h, QuadRule rule,
                               int panels) {
  if (panels < 0 || static_cast<std::size_t>(panels) + 1 > values.size())
    throw std::invalid_argument("integrate_prefix: panel count exceeds tabulated values");
  if (panels == 0) return 0.0;
  if (rule == QuadRule::Trapezoid) {
    double sum = 0.5 * (values[0] + values[panels]);
    for (int j = 1; j < panels; ++j) sum += values[j];
    return sum * h;
  }
  int even = panels % 2 == 0 ? panels : panels - 1;
  double result = 0.0;
  if (even > 0) {
    double sum = values[0] + values[even];
    for (int j = 1; j < even; j += 2) sum += 4.0 * values[j];
    for (int j = 2; j < even; j += 2) sum += 2.0 * values[j];
    result = sum * h / 3.0;
  }
  if (even != panels) result += 0.5 * h * (values[panels - 1] + values[panels]);
  return result;
}

inline double integrate_values(std::span<const double> values, double h, QuadRule rule) {
  if (values.empty()) return 0.0;
  return integrate_prefix(values, h, rule, static_cast<int>(values.size()) - 1);
}

// Composite Simpson for a callable on [a, b]; `subdivisions` is rounded up to
// an even panel count. Exact for cubics up to rounding.
template <class F>
double simpson(F&& f, double a, double b, int subdivisions) {
  if (a == b) return 0.0;
  int m = subdivisions < 2 ? 2 : subdivisions;
  if (m % 2 != 0) ++m;
  double h = (b - a) / m;
  double sum = f(a) + f(b);
  for (int j = 1; j < m; j += 2) sum += 4.0 * f(a + j * h);
  for (int j = 2; j < m; j += 2) sum += 2.0 * f(a + j * h);
  return sum * h / 3.0;
}

}  // namespace vhfix
