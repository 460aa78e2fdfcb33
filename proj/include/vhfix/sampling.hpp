#pragma once

/* Deterministic sampling utilities.
 *
 * Rng is a splitmix64 generator: fixed algorithm, so identical seeds give
 * identical streams on every platform (the standard library distributions
 * make no such promise). Halton gives low-discrepancy points for hypothesis
 * sampling. random_trig_member builds smooth truncated trigonometric sums
 * with pinned value range and slope bound, used for probe pairs and
 * ensembles.
 */

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "vhfix/grid.hpp"

namespace vhfix {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t state_;
};

inline double halton(std::uint64_t index, unsigned base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * (index % base);
    index /= base;
  }
  return r;
}

// Low-discrepancy points in the unit cube, one dimension per prime base.
// The seed offsets the start index so different seeds give different
// (still deterministic) sample sets.
class HaltonSeq {
 public:
  HaltonSeq(int dims, std::uint64_t seed) : dims_(dims), offset_(1 + seed % 65536) {
    static constexpr unsigned primes[] = {2, 3, 5, 7, 11, 13, 17, 19};
    if (dims < 1 || dims > 8) throw std::invalid_argument("HaltonSeq supports 1..8 dimensions");
    for (int d = 0; d < dims; ++d) bases_.push_back(primes[d]);
  }

  // Coordinate d of sample k.
  double at(std::uint64_t k, int d) const { return halton(k + offset_, bases_[d]); }

  int dims() const { return dims_; }

 private:
  int dims_;
  std::uint64_t offset_;
  std::vector<unsigned> bases_;
};

/* Smooth random member
 *
 *     m(t) = mid + sum_{j<4} c_j sin(w_j t + p_j),  sum |c_j| = A,
 *
 * with values in [mid-A, mid+A] inside [lo, hi] and slope bounded by
 * max_slope (frequencies are scaled down if the drawn sum exceeds it).
 */
inline GridFunction random_trig_member(const Grid& grid, double lo, double hi, double max_slope,
                                       Rng& rng) {
  if (!(hi > lo)) throw std::invalid_argument("member range is empty");
  constexpr int kTerms = 4;
  double width = hi - lo;
  double amp = (0.2 + 0.3 * rng.uniform()) * width;  // half-range, <= width/2
  double mid = lo + amp + rng.uniform() * (width - 2.0 * amp);
  double c[kTerms], w[kTerms], p[kTerms];
  double norm = 0.0;
  for (int j = 0; j < kTerms; ++j) {
    c[j] = rng.uniform(-1.0, 1.0);
    w[j] = rng.uniform(0.1, 3.0);
    p[j] = rng.uniform(0.0, 6.283185307179586);
    norm += std::fabs(c[j]);
  }
  for (int j = 0; j < kTerms; ++j) c[j] *= amp / norm;
  double slope = 0.0;
  for (int j = 0; j < kTerms; ++j) slope += std::fabs(c[j] * w[j]);
  if (slope > max_slope)
    for (int j = 0; j < kTerms; ++j) w[j] *= max_slope / slope;
  std::vector<double> vals(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    double t = grid.node(i);
    double v = mid;
    for (int j = 0; j < kTerms; ++j) v += c[j] * std::sin(w[j] * t + p[j]);
    vals[i] = v;
  }
  return GridFunction(grid, std::move(vals));
}

}  // namespace vhfix
