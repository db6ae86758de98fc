#ifndef HEATGUIDE_TIME_GRID_HPP
#define HEATGUIDE_TIME_GRID_HPP

#include <stdexcept>

namespace heatguide {

/// Uniform grid on [0,T] with n_t intervals, nodes t_i = i*T/n_t.
struct TimeGrid {
  double T = 1.0;
  int n_t = 512;

  void validate() const {
    if (!(T > 0.0)) throw std::invalid_argument("time.T must be > 0");
    if (n_t < 8) throw std::invalid_argument("time.n_t must be >= 8");
  }

  double dt() const { return T / n_t; }
  double node(int i) const { return i * T / n_t; }
  int n_nodes() const { return n_t + 1; }

  bool operator==(const TimeGrid&) const = default;
};

} // namespace heatguide

#endif
