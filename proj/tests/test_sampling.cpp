#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include "vhfix/sampling.hpp"

using namespace vhfix;

TEST_CASE("rng streams are reproducible and seed dependent") {
  Rng a(42), b(42), c(43);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 1000; ++i) {
    std::uint64_t va = a.next(), vb = b.next(), vc = c.next();
    all_equal = all_equal && (va == vb);
    any_diff = any_diff || (va != vc);
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("rng uniforms stay in range and roughly fill it") {
  Rng r(7);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 10000; ++i) {
    double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    lo = std::fmin(lo, u);
    hi = std::fmax(hi, u);
  }
  CHECK(lo < 0.01);
  CHECK(hi > 0.99);

  Rng r2(7);
  for (int i = 0; i < 1000; ++i) {
    double u = r2.uniform(-3.0, 5.0);
    CHECK(u >= -3.0);
    CHECK(u < 5.0);
  }
}

TEST_CASE("halton radical inverse produces the known base-2 prefix") {
  CHECK(halton(1, 2) == 0.5);
  CHECK(halton(2, 2) == 0.25);
  CHECK(halton(3, 2) == 0.75);
  CHECK(halton(4, 2) == 0.125);
  CHECK(halton(1, 3) == Catch::Approx(1.0 / 3.0).margin(1e-15));
  CHECK(halton(0, 2) == 0.0);
}

TEST_CASE("halton sequence is deterministic per seed and dimension checked") {
  HaltonSeq h1(3, 42), h2(3, 42), h3(3, 43);
  bool same = true, differ = false;
  for (std::uint64_t k = 0; k < 200; ++k)
    for (int d = 0; d < 3; ++d) {
      same = same && (h1.at(k, d) == h2.at(k, d));
      differ = differ || (h1.at(k, d) != h3.at(k, d));
    }
  CHECK(same);
  CHECK(differ);
  CHECK(h1.dims() == 3);
  CHECK_THROWS_AS(HaltonSeq(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(HaltonSeq(9, 1), std::invalid_argument);
}

TEST_CASE("random members respect range, slope bound and determinism") {
  Grid grid(10.0, 501);
  double lo = -2.0, hi = 3.0, max_slope = 2.0;
  Rng rng(42);
  for (int k = 0; k < 50; ++k) {
    auto m = random_trig_member(grid, lo, hi, max_slope, rng);
    REQUIRE(m.size() == grid.n);
    double h = grid.spacing();
    for (int i = 0; i < m.size(); ++i) {
      CHECK(m[i] >= lo - 1e-12);
      CHECK(m[i] <= hi + 1e-12);
      if (i > 0) CHECK(std::fabs(m[i] - m[i - 1]) / h <= max_slope + 1e-9);
    }
  }

  Rng r1(11), r2(11);
  auto a = random_trig_member(grid, lo, hi, max_slope, r1);
  auto b = random_trig_member(grid, lo, hi, max_slope, r2);
  CHECK(sup_norm_distance(a, b) == 0.0);

  CHECK_THROWS_AS(random_trig_member(grid, 1.0, 1.0, max_slope, rng), std::invalid_argument);
}

TEST_CASE("successive random members differ") {
  Grid grid(5.0, 101);
  Rng rng(1);
  auto a = random_trig_member(grid, 0.0, 1.0, 2.0, rng);
  auto b = random_trig_member(grid, 0.0, 1.0, 2.0, rng);
  CHECK(sup_norm_distance(a, b) > 1e-6);
}
