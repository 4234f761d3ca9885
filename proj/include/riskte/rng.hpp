#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace riskte {

// Deterministic random source. All sampling goes through explicit inverse-CDF
// (or Box-Muller) transforms on top of the raw mt19937_64 stream so that
// results are bit-identical across standard library implementations; the
// std:: distribution classes are implementation-defined and would not be.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t raw() { return gen_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * (1.0 / 9007199254740992.0);
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Integer in [0, n), rejection-free modulo is fine at 64-bit width for the
  // small n used here (shuffles, restarts).
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : gen_() % n; }

  // Standard normal via Box-Muller (cosine branch only).
  double gaussian() {
    double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  // Weibull(scale, shape) truncated to (0, 0.5] by rejection.
  double weibull_truncated(double scale, double shape) {
    for (;;) {
      double u = uniform();
      double x = scale * std::pow(-std::log(1.0 - u), 1.0 / shape);
      if (x > 0.0 && x <= 0.5) return x;
    }
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace riskte
