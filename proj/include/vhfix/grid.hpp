#pragma once

/* Uniform grids on [0, L] and real-valued functions tabulated on them.
 *
 * A Grid has n >= 2 nodes t_i = i*h with h = L/(n-1), so t_0 = 0 and
 * t_{n-1} = L. GridFunction values must all be finite. inner_integral
 * evaluates the Volterra prefix integral
 *
 *     I_i = integral_0^{t_i} g(t_i, s, x(s)) ds
 *
 * by applying a composite rule to the node values g(t_i, s_j, x_j), j <= i.
 */

#include <cmath>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vhfix/expr.hpp"
#include "vhfix/numfmt.hpp"
#include "vhfix/quadrature.hpp"

namespace vhfix {

struct Grid {
  double length;
  int n;

  Grid(double length_, int n_) : length(length_), n(n_) {
    if (!(length > 0.0) || !std::isfinite(length))
      throw std::invalid_argument("grid length must be positive and finite");
    if (n < 2) throw std::invalid_argument("grid needs at least 2 nodes");
  }

  double spacing() const { return length / (n - 1); }
  double node(int i) const { return i * spacing(); }

  bool same_as(const Grid& other) const { return n == other.n && length == other.length; }
};

class GridFunction {
 public:
  GridFunction(Grid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (static_cast<int>(values_.size()) != grid_.n)
      throw std::invalid_argument("value count does not match grid node count");
    for (double v : values_)
      if (!std::isfinite(v)) throw std::invalid_argument("grid function values must be finite");
  }

  static GridFunction zeros(Grid grid) {
    return GridFunction(grid, std::vector<double>(grid.n, 0.0));
  }

  static GridFunction constant(Grid grid, double c) {
    return GridFunction(grid, std::vector<double>(grid.n, c));
  }

  // Tabulates an expression in the single variable "t".
  static GridFunction sample(Grid grid, const Expr& e) {
    static constexpr std::string_view var[] = {"t"};
    Program p = e.compile(var);
    std::vector<double> vals(grid.n);
    for (int i = 0; i < grid.n; ++i) {
      double t = grid.node(i);
      vals[i] = p.eval({&t, 1});
    }
    return GridFunction(grid, std::move(vals));
  }

  const Grid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  double operator[](int i) const { return values_[i]; }
  int size() const { return grid_.n; }

 private:
  Grid grid_;
  std::vector<double> values_;
};

inline void require_same_grid(const GridFunction& x, const GridFunction& y) {
  if (!x.grid().same_as(y.grid()))
    throw std::invalid_argument("grid functions live on different grids");
}

inline double sup_norm_distance(const GridFunction& x, const GridFunction& y) {
  require_same_grid(x, y);
  double d = 0.0;
  for (int i = 0; i < x.size(); ++i) d = std::fmax(d, std::fabs(x[i] - y[i]));
  return d;
}

inline double sup_norm(const GridFunction& x) {
  double d = 0.0;
  for (int i = 0; i < x.size(); ++i) d = std::fmax(d, std::fabs(x[i]));
  return d;
}

// CSV with header "t,x", one row per node, 17 significant digits, LF endings.
inline void write_csv(const GridFunction& x, std::ostream& os) {
  os << "t,x\n";
  for (int i = 0; i < x.size(); ++i)
    os << fmt17(x.grid().node(i)) << "," << fmt17(x[i]) << "\n";
}

namespace detail {
inline constexpr std::string_view kKernelVars[] = {"t", "s", "x"};

inline double inner_integral_row(const Program& g, const GridFunction& x, int i, QuadRule rule,
                                 std::vector<double>& row) {
  const Grid& grid = x.grid();
  double t = grid.node(i);
  row.resize(i + 1);
  for (int j = 0; j <= i; ++j) {
    double args[3] = {t, grid.node(j), x[j]};
    row[j] = g.eval({args, 3});
  }
  return integrate_prefix(row, grid.spacing(), rule, i);
}
}  // namespace detail

// I_i for one node index i; g is an expression in (t, s, x).
inline double inner_integral(const Expr& g, const GridFunction& x, int i, QuadRule rule) {
  if (i < 0 || i >= x.size()) throw std::invalid_argument("node index out of range");
  Program p = g.compile(detail::kKernelVars);
  std::vector<double> row;
  return detail::inner_integral_row(p, x, i, rule, row);
}

// All prefix integrals I_0..I_{n-1}. O(n^2) kernel evaluations.
inline std::vector<double> inner_integral_all(const Expr& g, const GridFunction& x,
                                              QuadRule rule) {
  Program p = g.compile(detail::kKernelVars);
  std::vector<double> out(x.size());
  std::vector<double> row;
  for (int i = 0; i < x.size(); ++i) out[i] = detail::inner_integral_row(p, x, i, rule, row);
  return out;
}

// B_i = integral_0^{t_i} |b(s)| ds for an expression b in the variable "s".
inline std::vector<double> prefix_abs_integral(const Expr& b, const Grid& grid, QuadRule rule) {
  static constexpr std::string_view var[] = {"s"};
  Program p = b.compile(var);
  std::vector<double> vals(grid.n);
  for (int j = 0; j < grid.n; ++j) {
    double s = grid.node(j);
    vals[j] = std::fabs(p.eval({&s, 1}));
  }
  std::vector<double> out(grid.n);
  for (int i = 0; i < grid.n; ++i) out[i] = integrate_prefix(vals, grid.spacing(), rule, i);
  return out;
}

}  // namespace vhfix
