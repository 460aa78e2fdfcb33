#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "vhfix/problem.hpp"

using namespace vhfix;

namespace {

// the worked instance: f(t,x,y) = sin t + ln(1+x) + ln(1+y) with a gaussian
// kernel damped by 1/(t^2+1), logarithmic comparison triple
IntegralProblem worked_instance() {
  IntegralProblem p;
  p.f = parse_expr("sin(t)+ln(1+x)+ln(1+y)");
  p.g = parse_expr("(1/(t^2+1))*exp(0-s^2)*cos(x)");
  p.a = parse_expr("1/(t^2+1)");
  p.b = parse_expr("exp(0-s^2)");
  p.horizon = 10.0;
  p.triple = preset_triple("aghajani");
  return p;
}

double erf_prefix(double t) { return std::sqrt(std::numbers::pi) / 2.0 * std::erf(t); }

}  // namespace

TEST_CASE("M0 matches a dense closed-form scan") {
  auto p = worked_instance();
  double m0 = estimate_M0(p);

  // independent oracle: Lambda is the identity here and the inner integral of
  // exp(-s^2) has the erf closed form
  double oracle = 0.0;
  for (int k = 0; k <= 100000; ++k) {
    double t = 10.0 * k / 100000;
    oracle = std::fmax(oracle, erf_prefix(t) / (t * t + 1.0));
  }
  CHECK(std::fabs(m0 - oracle) <= 1e-4);
  CHECK(m0 == Catch::Approx(0.40360113).margin(1e-6));
}

TEST_CASE("M1 resolves the sine peak exactly") {
  auto p = worked_instance();
  CHECK(estimate_M1(p) == 1.0);
}

TEST_CASE("M1 applies Phi after Lambda") {
  auto p = worked_instance();
  p.f = parse_expr("3+0*x+0*y");
  p.triple.phi_density = parse_expr("2*gamma");  // Lambda(u) = u^2
  CHECK(estimate_M1(p) == Catch::Approx(9.0).margin(1e-9));
}

TEST_CASE("r0 agrees with a scalar bisection oracle") {
  auto p = worked_instance();
  double m0 = estimate_M0(p);
  double m1 = estimate_M1(p);

  // smallest root of r - ln(1+r) = M0 + M1
  auto q = [&](double r) { return r - std::log1p(r) - m0 - m1; };
  double lo = 1e-9, hi = 20.0;
  REQUIRE(q(lo) < 0.0);
  REQUIRE(q(hi) > 0.0);
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (q(mid) < 0.0 ? lo : hi) = mid;
  }
  double root = 0.5 * (lo + hi);

  auto r0 = find_r0(p, m0, m1);
  REQUIRE(r0.has_value());
  CHECK(*r0 >= root - 1e-9);                 // never below the true threshold
  CHECK(*r0 - root <= 1e-3 + 1e-9);          // within one search-grid step
  CHECK(*r0 == Catch::Approx(2.717).margin(1e-9));
}

TEST_CASE("find_r0 reports absence") {
  auto p = worked_instance();
  CHECK_FALSE(find_r0(p, 50.0, 1.0).has_value());
}

TEST_CASE("kernel bound holds for the worked instance and catches violations") {
  auto p = worked_instance();
  auto rep = check_kernel_bound(p, 10000, 2.717);
  CHECK(rep.passed);
  CHECK(rep.property == "kernel_bound");

  p.g = parse_expr("2*exp(0-s^2)");
  auto bad = check_kernel_bound(p, 10000, 1.0);
  CHECK_FALSE(bad.passed);
  REQUIRE(bad.witness.size() == 3);
  CHECK(bad.witness[2].value > 0.0);  // excess over the bound
}

TEST_CASE("a_decay accepts 1/(t^2+1) and rejects constants") {
  auto p = worked_instance();
  CHECK(check_a_decay(p).passed);

  p.a = parse_expr("1");
  auto bad = check_a_decay(p);
  CHECK_FALSE(bad.passed);
  REQUIRE(bad.witness.size() == 2);
  CHECK(bad.witness[0].value == 1.0);            // tail max
  CHECK(bad.witness[1].value == Catch::Approx(0.05).margin(1e-12));
}

TEST_CASE("b_summable accepts the gaussian and rejects flat tails") {
  auto p = worked_instance();
  CHECK(check_b_summable(p).passed);

  p.b = parse_expr("1");
  auto bad = check_b_summable(p);
  CHECK_FALSE(bad.passed);
  CHECK(bad.witness[0].at == 9.0);  // tail window start
}

TEST_CASE("f_wellposed checks f(t, x, 0) over the sampled range") {
  auto p = worked_instance();
  CHECK(check_f_wellposed(p, 10000, 2.717).passed);

  p.f = parse_expr("ln(x-5)");
  CHECK_FALSE(check_f_wellposed(p, 10000, 1.0).passed);

  p.f = parse_expr("1/(t-20)");  // finite on [0,10]
  CHECK(check_f_wellposed(p, 10000, 1.0).passed);
}

TEST_CASE("f_contraction accepts logarithmic growth and rejects steep slopes") {
  auto p = worked_instance();
  CHECK(check_f_contraction(p, 10000, 2.717).passed);

  auto benign = worked_instance();
  benign.f = parse_expr("exp(0-t)+ln(1+x)+0.25*y");
  CHECK(check_f_contraction(benign, 10000, 2.717).passed);

  auto steep = worked_instance();
  steep.f = parse_expr("3*y");
  auto bad = check_f_contraction(steep, 10000, 1.0);
  CHECK_FALSE(bad.passed);
  REQUIRE(bad.witness.size() == 3);
  CHECK(bad.witness[0].value > 0.0);  // lhs - rhs margin
}

TEST_CASE("value_floor clamps the sampled range") {
  auto p = worked_instance();
  CHECK(p.value_floor(2.0) == 0.0);
  p.x_min = -5.0;
  CHECK(p.value_floor(2.0) == -2.0);
  CHECK(p.value_floor(10.0) == -5.0);
}

TEST_CASE("x_min widens the wellposedness domain") {
  auto p = worked_instance();
  p.x_min = -2.0;
  // ln(1+x) blows up below -1, which the widened range now reaches
  CHECK_FALSE(check_f_wellposed(p, 10000, 2.0).passed);
}

TEST_CASE("full hypothesis battery passes on the worked instance") {
  auto p = worked_instance();
  auto rep = run_hypotheses(p);
  CHECK(rep.all_pass());
  CHECK(rep.warnings.empty());
  CHECK(rep.m1 == 1.0);
  REQUIRE(rep.r0.has_value());
  CHECK(*rep.r0 == Catch::Approx(2.717).margin(1e-9));
  REQUIRE_FALSE(rep.notes.empty());
  CHECK(rep.notes[0].find("self_mapping") != std::string::npos);

  std::ostringstream os;
  rep.write(os);
  std::string out = os.str();
  CHECK(out.find("f_contraction = pass\n") != std::string::npos);
  CHECK(out.find("M1 = 1\n") != std::string::npos);
  CHECK(out.find("r0 = 2.7170000000000001\n") != std::string::npos);
  CHECK(out.find("WARNINGS\n(none)\n") != std::string::npos);
}

TEST_CASE("hypothesis battery reports contraction failures") {
  auto p = worked_instance();
  p.f = parse_expr("3*y");
  auto rep = run_hypotheses(p);
  CHECK_FALSE(rep.all_pass());
  CHECK_FALSE(rep.f_contraction.passed);
  bool mentioned = false;
  for (const auto& w : rep.warnings) mentioned = mentioned || w.find("f_contraction failed") == 0;
  CHECK(mentioned);
}

TEST_CASE("hypothesis battery reports a missing ball radius") {
  auto p = worked_instance();
  p.f = parse_expr("100+0.25*y");  // M1 = 100, no r <= 20 can absorb it
  auto rep = run_hypotheses(p);
  CHECK_FALSE(rep.all_pass());
  CHECK_FALSE(rep.self_mapping.passed);
  CHECK_FALSE(rep.r0.has_value());
  REQUIRE_FALSE(rep.warnings.empty());
  CHECK(rep.warnings[0].find("no ball radius up to 20") != std::string::npos);

  std::ostringstream os;
  rep.write(os);
  CHECK(os.str().find("r0 = none\n") != std::string::npos);
}

TEST_CASE("hypothesis report write is line pinned on a crafted report") {
  HypothesisReport rep;
  rep.f_wellposed = PropertyReport::pass("f_wellposed");
  rep.f_contraction = PropertyReport::pass("f_contraction");
  rep.kernel_bound = PropertyReport::pass("kernel_bound");
  rep.a_decay = PropertyReport::fail("a_decay", {{10.0, 1.0}});
  rep.b_summable = PropertyReport::pass("b_summable");
  rep.self_mapping = PropertyReport::pass("self_mapping");
  rep.m0 = 0.5;
  rep.m1 = 1.0;
  rep.r0 = 2.0;
  rep.notes.push_back("n1");
  rep.warnings.push_back("w1");
  std::ostringstream os;
  rep.write(os);
  CHECK(os.str() ==
        "note = n1\n"
        "f_wellposed = pass\n"
        "f_contraction = pass\n"
        "kernel_bound = pass\n"
        "a_decay = fail\n"
        "b_summable = pass\n"
        "self_mapping = pass\n"
        "M0 = 0.5\n"
        "M1 = 1\n"
        "r0 = 2\n"
        "WARNINGS\n"
        "warning: w1\n");
}
