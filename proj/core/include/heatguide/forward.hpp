#ifndef HEATGUIDE_FORWARD_HPP
#define HEATGUIDE_FORWARD_HPP

#include <complex>
#include <cstdint>
#include <vector>

#include "heatguide/modal_field.hpp"
#include "heatguide/source_profile.hpp"
#include "heatguide/time_grid.hpp"

namespace heatguide {

/// Time-sampled modal coefficients u_{j,ell}(t_i) of a solution on the
/// lattice. Immutable in normal use; per-(j,ell) columns are independent.
class ModalTrajectory {
 public:
  ModalTrajectory(CrossSection cs, KGrid kgrid, TimeGrid tg);

  const CrossSection& cross_section() const { return cs_; }
  const KGrid& kgrid() const { return kgrid_; }
  const TimeGrid& time_grid() const { return tg_; }

  std::complex<double> at(int j, int ell, int i) const { return u_[index(j, ell, i)]; }
  void set(int j, int ell, int i, std::complex<double> v) { u_[index(j, ell, i)] = v; }

  /// Snapshot at time node i as a ModalField.
  ModalField field_at(int i) const;

  double energy(int j, int ell) const;
  bool same_lattice(const ModalTrajectory& other) const;

 private:
  int index(int j, int ell, int i) const;

  CrossSection cs_;
  KGrid kgrid_;
  TimeGrid tg_;
  std::vector<std::complex<double>> u_; // (j, ell) major, time minor
};

/// Duhamel coefficient D(t) = int_0^t sigma(s) e^{-E(t-s)} ds. Closed form
/// for the constant-1 profile, prefix trapezoid on the profile's grid
/// otherwise (partial last interval handled by linear interpolation).
/// Throws std::invalid_argument unless E > 0 and 0 <= t <= T.
double duhamel_coefficient(const SourceProfile& sigma, double energy, double t);

/// Source problem: u' = sigma*beta - E*u, u(0) = 0, solved exactly per mode.
ModalTrajectory solve_forward(const ModalField& beta, const SourceProfile& sigma,
                              const TimeGrid& tg);

/// Heat semigroup: v_{j,ell}(t_i) = v0 * e^{-E t_i}.
ModalTrajectory solve_homogeneous(const ModalField& v0, const TimeGrid& tg);

/// Superposition of the two above (initial data v0, source sigma*beta).
ModalTrajectory solve_driven(const ModalField& v0, const ModalField& beta,
                             const SourceProfile& sigma, const TimeGrid& tg);

/// v = dt(u) via the exact modal identity sigma(t)*beta - E*u. No finite
/// differences here; numerical time differentiation is what the observer
/// does to the measured trace, in the inverse module.
ModalTrajectory time_derivative(const ModalTrajectory& u, const ModalField& beta,
                                const SourceProfile& sigma);

struct TraceProvenance {
  bool noisy = false;
  double delta = 0.0;
  std::uint64_t seed = 0;
  bool operator==(const TraceProvenance&) const = default;
};

/// Per-k time series of the flux on gamma: d_j(t_i) = sum_ell u_{j,ell}(t_i)
/// * d_nu' phi_ell(gamma').
class NeumannTrace {
 public:
  NeumannTrace(KGrid kgrid, TimeGrid tg);

  const KGrid& kgrid() const { return kgrid_; }
  const TimeGrid& time_grid() const { return tg_; }

  std::complex<double> at(int j, int i) const { return d_[index(j, i)]; }
  void set(int j, int i, std::complex<double> v) { d_[index(j, i)] = v; }

  const TraceProvenance& provenance() const { return prov_; }
  void set_provenance(TraceProvenance p) { prov_ = p; }

  NeumannTrace operator-(const NeumannTrace& other) const;

 private:
  int index(int j, int i) const;

  KGrid kgrid_;
  TimeGrid tg_;
  std::vector<std::complex<double>> d_;
  TraceProvenance prov_;
};

NeumannTrace neumann_trace(const ModalTrajectory& u);

/// kappa: H^1(0,T; L^2(gamma)) data norm. Trapezoid time weights; the time
/// derivative uses second-order stencils (central inside, one-sided ends).
double trace_h1_norm(const NeumannTrace& d);

/// L^2((0,T) x gamma) norm (no derivative part).
double trace_l2_norm(const NeumannTrace& d);

/// d + e with e i.i.d. complex Gaussian, Hermitian-symmetrized in j, then
/// rescaled so that trace_h1_norm(e) == delta exactly. Deterministic per seed.
NeumannTrace add_noise(const NeumannTrace& d, double delta, std::uint64_t seed);

/// Numerical check of the two a-priori energy estimates. Margins are
/// min over time nodes of (rhs - lhs); both must come out nonnegative.
struct EnergyEstimateReport {
  double es1_rhs = 0.0;
  double es1_lhs_max = 0.0;
  double es1_margin = 0.0; // driven solution vs h1(v0) + ||sigma||_L2 * h1(beta)
  double es2_rhs = 0.0;
  double es2_lhs_max = 0.0;
  double es2_margin = 0.0; // dt(u) vs (1+sqrt(T)) ||sigma||_C1 * h1(beta)
};
EnergyEstimateReport check_energy_estimates(const ModalField& v0, const ModalField& beta,
                                            const SourceProfile& sigma, const TimeGrid& tg);

} // namespace heatguide

#endif
