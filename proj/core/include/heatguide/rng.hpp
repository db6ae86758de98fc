#ifndef HEATGUIDE_RNG_HPP
#define HEATGUIDE_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace heatguide {

/// Standard normal stream over mt19937_64 with an explicit Box-Muller
/// transform. std::normal_distribution is implementation-defined, so seeded
/// outputs would differ across standard libraries; this keeps every seeded
/// artifact bit-reproducible.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : eng_(seed) {}

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform_open();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  std::complex<double> next_complex() {
    const double re = next();
    const double im = next();
    return {re, im};
  }

 private:
  // uniform in (0, 1]
  double uniform_open() {
    return ((eng_() >> 11) + 1.0) * (1.0 / 9007199254740992.0);
  }

  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

} // namespace heatguide

#endif
