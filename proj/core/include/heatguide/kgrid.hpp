#ifndef HEATGUIDE_KGRID_HPP
#define HEATGUIDE_KGRID_HPP

#include <stdexcept>

namespace heatguide {

/// Symmetric half-offset grid for the longitudinal Fourier variable:
/// k_j = -k_max + (j+1/2)*dk, j = 0..n_k-1, dk = 2*k_max/n_k.
/// No node sits at k = 0; node j mirrors to n_k-1-j with k -> -k.
struct KGrid {
  double k_max = 2.0;
  int n_k = 64;

  void validate() const {
    if (!(k_max > 0.0)) throw std::invalid_argument("kgrid.k_max must be > 0");
    if (n_k < 2 || n_k % 2 != 0) throw std::invalid_argument("kgrid.n_k must be even and >= 2");
  }

  double dk() const { return 2.0 * k_max / n_k; }
  double node(int j) const { return -k_max + (j + 0.5) * dk(); }
  int mirror(int j) const { return n_k - 1 - j; }

  bool operator==(const KGrid&) const = default;
};

} // namespace heatguide

#endif
