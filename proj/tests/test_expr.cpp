#include <catch_amalgamated.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "vhfix/expr.hpp"
#include "vhfix/sampling.hpp"

using vhfix::Binding;
using vhfix::Builtin;
using vhfix::EvalError;
using vhfix::Expr;
using vhfix::ParseError;
using vhfix::parse_expr;
using vhfix::Program;

namespace {

double ev(std::string_view src, std::initializer_list<Binding> env = {}) {
  return parse_expr(src).eval(env);
}

}  // namespace

TEST_CASE("numbers and basic arithmetic") {
  CHECK(ev("42") == 42.0);
  CHECK(ev("3.5") == 3.5);
  CHECK(ev("1e3") == 1000.0);
  CHECK(ev("2.5e-2") == 0.025);
  CHECK(ev("1+2*3") == 7.0);
  CHECK(ev("(1+2)*3") == 9.0);
  CHECK(ev("7/2") == 3.5);
  CHECK(ev("1-2-3") == -4.0);   // left associative
  CHECK(ev("12/3/2") == 2.0);   // left associative
  CHECK(ev("2^3") == 8.0);
  CHECK(ev("2^3^2") == 512.0);  // right associative
}

TEST_CASE("two-operator precedence table") {
  // Every ordered pair of binary operators on the fixed operand triple
  // (5, 2, 3), compared against the expected precedence-aware value.
  struct Case {
    const char* src;
    double want;
  };
  const std::vector<Case> table = {
      {"5+2+3", 10},    {"5+2-3", 4},      {"5+2*3", 11},     {"5+2/3", 5 + 2.0 / 3},
      {"5+2^3", 13},    {"5-2+3", 6},      {"5-2-3", 0},      {"5-2*3", -1},
      {"5-2/3", 5 - 2.0 / 3},              {"5-2^3", -3},     {"5*2+3", 13},
      {"5*2-3", 7},     {"5*2*3", 30},     {"5*2/3", 10.0 / 3},
      {"5*2^3", 40},    {"5/2+3", 5.5},    {"5/2-3", -0.5},   {"5/2*3", 7.5},
      {"5/2/3", 5.0 / 6},                  {"5/2^3", 0.625},  {"5^2+3", 28},
      {"5^2-3", 22},    {"5^2*3", 75},     {"5^2/3", 25.0 / 3},
      {"5^2^3", 390625.0},  // 5^(2^3)
  };
  for (const Case& c : table) {
    INFO(c.src);
    CHECK(ev(c.src) == Catch::Approx(c.want).epsilon(1e-15));
  }
}

TEST_CASE("unary minus binds looser than the power operator") {
  CHECK(ev("-t^2", {{"t", 3.0}}) == -9.0);
  CHECK(ev("(-t)^2", {{"t", 3.0}}) == 9.0);
  CHECK(ev("--4") == 4.0);
  CHECK(ev("2*-3") == -6.0);
  CHECK(ev("2^-1") == 0.5);
}

TEST_CASE("builtin functions") {
  CHECK(ev("sin(0)") == 0.0);
  CHECK(ev("cos(0)") == 1.0);
  CHECK(ev("tan(0)") == 0.0);
  CHECK(ev("exp(1)") == Catch::Approx(std::exp(1.0)));
  CHECK(ev("ln(exp(2))") == Catch::Approx(2.0));
  CHECK(ev("abs(0-3)") == 3.0);
  CHECK(ev("sqrt(16)") == 4.0);
  CHECK(ev("min(2,3)") == 2.0);
  CHECK(ev("max(2,3)") == 3.0);
  CHECK(ev("pow(2,10)") == 1024.0);
}

TEST_CASE("variables resolve from the environment") {
  Expr e = parse_expr("x*y + x");
  CHECK(e.eval({{"x", 2.0}, {"y", 5.0}}) == 12.0);
  CHECK_THROWS_AS(e.eval({{"x", 2.0}}), EvalError);
}

TEST_CASE("parse errors carry positions") {
  auto pos_of = [](std::string_view src) -> std::size_t {
    try {
      parse_expr(src);
    } catch (const ParseError& e) {
      return e.position();
    }
    FAIL("expected a parse error");
    return std::size_t(-1);
  };
  CHECK(pos_of("1+") == 2);            // unexpected end of input
  CHECK(pos_of("(1+2") == 4);          // missing ')'
  CHECK(pos_of("1+2)") == 3);          // dangling ')'
  CHECK(pos_of("foo(1)") == 0);        // unknown function
  CHECK(pos_of("1 + foo(1)") == 4);    // unknown function, offset
  CHECK(pos_of("sin(1,2)") == 0);      // arity
  CHECK(pos_of("min(1)") == 0);        // arity
  CHECK(pos_of("1e+") == 1);           // malformed exponent, flagged at 'e'
  CHECK(pos_of("2 + @") == 4);         // stray character
  CHECK_THROWS_WITH(parse_expr("bar(1)"), Catch::Matchers::ContainsSubstring("unknown function"));
  CHECK_THROWS_WITH(parse_expr("1+"), Catch::Matchers::ContainsSubstring("unexpected end of input"));
}

TEST_CASE("domain violations raise positioned evaluation errors") {
  auto pos_of = [](std::string_view src) -> std::size_t {
    try {
      parse_expr(src).eval({});
    } catch (const EvalError& e) {
      return e.position();
    }
    FAIL("expected an evaluation error");
    return std::size_t(-1);
  };
  CHECK(pos_of("ln(0)") == 0);
  CHECK(pos_of("ln(0-1)") == 0);
  CHECK(pos_of("1 + ln(0)") == 4);
  CHECK(pos_of("sqrt(0-4)") == 0);
  CHECK(pos_of("1/0") == 1);
  CHECK(pos_of("2 + 3/(1-1)") == 5);
  CHECK_THROWS_WITH(parse_expr("ln(0)").eval({}),
                    Catch::Matchers::ContainsSubstring("non-positive"));
  CHECK_THROWS_WITH(parse_expr("1/0").eval({}),
                    Catch::Matchers::ContainsSubstring("division by zero"));
}

TEST_CASE("compiled programs agree with tree evaluation") {
  const std::string_view vars[] = {"t", "s", "x"};
  Expr e = parse_expr("(1/(t^2+1))*exp(0-s^2)*cos(x) + min(t, max(s, x)) - abs(x)^2");
  Program p = e.compile(vars);
  vhfix::Rng rng(7);
  for (int k = 0; k < 500; ++k) {
    double t = rng.uniform(0.0, 10.0), s = rng.uniform(0.0, 10.0), x = rng.uniform(-3.0, 3.0);
    double args[3] = {t, s, x};
    double direct = e.eval({{"t", t}, {"s", s}, {"x", x}});
    CHECK(p.eval({args, 3}) == direct);
  }
}

TEST_CASE("compile rejects variables outside the declared set") {
  const std::string_view vars[] = {"t"};
  CHECK_THROWS_WITH(parse_expr("t + q").compile(vars),
                    Catch::Matchers::ContainsSubstring("'q' is not in the declared variable set"));
  CHECK_NOTHROW(parse_expr("t*t").compile(vars));
}

TEST_CASE("compiled programs raise the same positioned domain errors") {
  const std::string_view vars[] = {"u"};
  Program p = parse_expr("1 + ln(u)").compile(vars);
  double bad = 0.0;
  try {
    p.eval({&bad, 1});
    FAIL("expected an evaluation error");
  } catch (const EvalError& e) {
    CHECK(e.position() == 4);
  }
}

namespace {

// Random expression trees over a fixed variable set, depth-limited, with
// nonnegative constants (negative values are reachable through negation,
// and a bare negative constant would round-trip into a negation node).
Expr random_tree(vhfix::Rng& rng, int depth) {
  double pick = rng.uniform();
  if (depth <= 0 || pick < 0.25) {
    if (rng.uniform() < 0.5) return Expr::constant(std::floor(rng.uniform(0.0, 100.0)) / 8.0);
    const char* names[3] = {"t", "s", "x"};
    return Expr::variable(names[static_cast<int>(rng.uniform(0.0, 3.0))]);
  }
  if (pick < 0.35) return Expr::negate(random_tree(rng, depth - 1));
  if (pick < 0.55) {
    static constexpr Builtin fns[] = {Builtin::Sin, Builtin::Cos, Builtin::Tan, Builtin::Exp,
                                      Builtin::Ln,  Builtin::Abs, Builtin::Sqrt};
    Builtin fn = fns[static_cast<int>(rng.uniform(0.0, 7.0))];
    return Expr::call(fn, random_tree(rng, depth - 1));
  }
  if (pick < 0.62) {
    Builtin fn = rng.uniform() < 0.5 ? Builtin::Min : Builtin::Max;
    Expr a = random_tree(rng, depth - 1), b = random_tree(rng, depth - 1);
    return Expr::call(fn, a, &b);
  }
  static constexpr Expr::NodeKind ops[] = {Expr::NodeKind::Add, Expr::NodeKind::Sub,
                                           Expr::NodeKind::Mul, Expr::NodeKind::Div,
                                           Expr::NodeKind::Pow};
  Expr::NodeKind op = ops[static_cast<int>(rng.uniform(0.0, 5.0))];
  Expr a = random_tree(rng, depth - 1), b = random_tree(rng, depth - 1);
  return Expr::binary(op, a, b);
}

}  // namespace

TEST_CASE("print and re-parse round-trips 1000 random trees") {
  vhfix::Rng rng(20260814);
  for (int k = 0; k < 1000; ++k) {
    Expr e = random_tree(rng, 5);
    Expr back = parse_expr(e.to_string());
    INFO(e.to_string());
    CHECK(e.structurally_equal(back));
    CHECK(back.to_string() == e.to_string());
  }
}

TEST_CASE("structural equality distinguishes different trees") {
  CHECK(parse_expr("1+t").structurally_equal(parse_expr("1 + t")));
  CHECK_FALSE(parse_expr("1+t").structurally_equal(parse_expr("t+1")));
  CHECK_FALSE(parse_expr("sin(t)").structurally_equal(parse_expr("cos(t)")));
  CHECK_FALSE(parse_expr("2").structurally_equal(parse_expr("2.5")));
}

TEST_CASE("evaluation is pure") {
  Expr e = parse_expr("sin(t)+t^2");
  double first = e.eval({{"t", 1.25}});
  for (int k = 0; k < 10; ++k) CHECK(e.eval({{"t", 1.25}}) == first);
}
