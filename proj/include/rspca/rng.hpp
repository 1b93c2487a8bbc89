#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace rspca {

// splitmix64 finalizer; used to derive independent child seeds from a master
// seed so replicates can run in any order or in parallel.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) {
  return mix_seed(master ^ mix_seed(index + 1));
}

// Deterministic RNG wrapper. Distributions are hand-rolled (Box-Muller,
// inverse CDF) so streams do not depend on library internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(mix_seed(seed)) {}

  // uniform on (0, 1]
  double uniform() {
    return (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
  }

  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  // Laplace with density (1/2b) exp(-|x|/b)
  double laplace(double b) {
    const double u = uniform() - 0.5;
    const double s = u < 0 ? -1.0 : 1.0;
    return -b * s * std::log1p(-2.0 * std::abs(u));
  }

  // integer in [0, n)
  std::uint64_t below(std::uint64_t n) { return gen_() % n; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace rspca
