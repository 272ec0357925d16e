#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace delaylab {

// splitmix64; used to derive independent stream seeds from a master seed.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// mt19937_64 with hand-rolled variate transforms. std::*_distribution output
// is implementation-defined; frozen test values require bit-stable streams.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t bits() { return gen_(); }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t below(std::uint64_t n) {
    // modulo bias is < 2^-40 for the n used here (n <= 2^24)
    return gen_() % n;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.2831853071795864769 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // uniform in the m-dimensional Euclidean ball of given radius
  std::vector<double> ball(int m, double radius) {
    std::vector<double> v(static_cast<std::size_t>(m));
    double norm2 = 0.0;
    for (auto& x : v) {
      x = normal();
      norm2 += x * x;
    }
    double norm = std::sqrt(norm2);
    double r = radius * std::pow(uniform(), 1.0 / static_cast<double>(m));
    if (norm == 0.0) return v;  // all-zero draw: probability 0
    for (auto& x : v) x *= r / norm;
    return v;
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace delaylab
