#ifndef HEATGUIDE_QUADRATURE_HPP
#define HEATGUIDE_QUADRATURE_HPP

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace heatguide {

/// Trapezoid weights for n+1 uniform nodes spanning a step h.
inline std::vector<double> trapezoid_weights(std::size_t n_nodes, double h) {
  if (n_nodes < 2) throw std::invalid_argument("trapezoid needs >= 2 nodes");
  std::vector<double> w(n_nodes, h);
  w.front() = 0.5 * h;
  w.back() = 0.5 * h;
  return w;
}

/// Second-order finite-difference time derivative on a uniform grid:
/// central stencil inside, one-sided three-point stencils at the ends.
template <typename T>
std::vector<T> fd_derivative(const std::vector<T>& f, double h) {
  const std::size_t n = f.size();
  if (n < 3) throw std::invalid_argument("fd_derivative needs >= 3 samples");
  std::vector<T> d(n);
  const double inv2h = 1.0 / (2.0 * h);
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * inv2h;
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) * inv2h;
  d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) * inv2h;
  return d;
}

} // namespace heatguide

#endif
