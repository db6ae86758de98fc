#include "heatguide/cross_section.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace heatguide {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

void check_mode(const CrossSection& cs, int ell) {
  if (ell < 1 || ell > cs.l_max) {
    throw std::invalid_argument("mode index " + std::to_string(ell) +
                                " outside [1, " + std::to_string(cs.l_max) + "]");
  }
}
} // namespace

void CrossSection::validate() const {
  if (!(a > 0.0)) throw std::invalid_argument("cross_section.a must be > 0");
  if (l_max < 1) throw std::invalid_argument("cross_section.l_max must be >= 1");
}

double eigenvalue(const CrossSection& cs, int ell) {
  check_mode(cs, ell);
  const double w = static_cast<double>(ell) * kPi / cs.a;
  return w * w;
}

double lambda_1(const CrossSection& cs) {
  const double w = kPi / cs.a;
  return w * w;
}

double eigenfunction(const CrossSection& cs, int ell, double x_prime) {
  check_mode(cs, ell);
  if (x_prime < 0.0 || x_prime > cs.a) {
    throw std::invalid_argument("x' outside [0, a]");
  }
  if (x_prime == 0.0 || x_prime == cs.a) return 0.0;
  return std::sqrt(2.0 / cs.a) * std::sin(static_cast<double>(ell) * kPi * x_prime / cs.a);
}

double normal_derivative_on_gamma(const CrossSection& cs, int ell) {
  check_mode(cs, ell);
  const double mag = std::sqrt(2.0 / cs.a) * (static_cast<double>(ell) * kPi / cs.a);
  if (cs.gamma_side == GammaSide::RightEnd) {
    return (ell % 2 == 0) ? mag : -mag; // cos(ell*pi) = (-1)^ell
  }
  return -mag; // outward normal at 0 is -1
}

} // namespace heatguide
