#ifndef HEATGUIDE_MODAL_FIELD_HPP
#define HEATGUIDE_MODAL_FIELD_HPP

#include <complex>
#include <cstdint>
#include <vector>

#include "heatguide/cross_section.hpp"
#include "heatguide/kgrid.hpp"

namespace heatguide {

/// Coefficients beta_{k_j, ell} on the finite (k-node x transverse-mode)
/// lattice; the discrete stand-in for a function on omega x R. The lattice
/// itself is the ground-truth model: k-integrals are dk-weighted sums and
/// every modal identity holds exactly per lattice point.
///
/// Real-valued fields are encoded by Hermitian symmetry in j:
/// c(mirror(j), ell) == conj(c(j, ell)).
class ModalField {
 public:
  ModalField(CrossSection cs, KGrid kgrid);

  const CrossSection& cross_section() const { return cs_; }
  const KGrid& kgrid() const { return kgrid_; }

  std::complex<double> at(int j, int ell) const { return c_[index(j, ell)]; }
  void set(int j, int ell, std::complex<double> v) { c_[index(j, ell)] = v; }

  /// Mode energy lambda_ell + k_j^2 of lattice point (j, ell).
  double energy(int j, int ell) const;

  /// Max energy over nonzero coefficients; 0 for the zero field.
  double max_active_energy() const;

  bool is_zero() const;
  bool is_hermitian(double tol = 1e-12) const;
  bool same_lattice(const ModalField& other) const;

  ModalField scaled(double s) const;
  /// Rescale so that h1_norm == m. Throws std::invalid_argument on the zero field.
  ModalField rescaled_to_h1(double m) const;
  ModalField operator-(const ModalField& other) const;
  ModalField operator+(const ModalField& other) const;

  const std::vector<std::complex<double>>& coefficients() const { return c_; }

 private:
  int index(int j, int ell) const;

  CrossSection cs_;
  KGrid kgrid_;
  std::vector<std::complex<double>> c_; // row-major (j, ell)
};

/// Plancherel L^2(Omega) norm: sqrt( sum_{j,ell} dk |c|^2 ).
double l2_norm(const ModalField& f);

/// H^1 seminorm: sqrt( sum dk (lambda_ell + k_j^2) |c|^2 ).
double h1_seminorm(const ModalField& f);

/// Energy H^1 norm: sqrt(l2^2 + seminorm^2).
double h1_norm(const ModalField& f);

/// Point evaluation Re[ sum (2pi)^{-1/2} dk c e^{i k x_n} phi_ell(x') ].
double synthesize(const ModalField& f, double x_prime, double x_n);

/// Seeded Hermitian-symmetric field supported on lattice points with
/// energy <= energy_cap; deterministic per seed. energy_cap below the
/// smallest lattice energy yields the zero field.
ModalField random_field(const CrossSection& cs, const KGrid& kgrid,
                        double energy_cap, std::uint64_t seed);

} // namespace heatguide

#endif
