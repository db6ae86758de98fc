#include "heatguide/forward.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "heatguide/quadrature.hpp"
#include "heatguide/rng.hpp"

namespace heatguide {

ModalTrajectory::ModalTrajectory(CrossSection cs, KGrid kgrid, TimeGrid tg)
    : cs_(cs), kgrid_(kgrid), tg_(tg) {
  cs_.validate();
  kgrid_.validate();
  tg_.validate();
  u_.assign(static_cast<std::size_t>(kgrid_.n_k) * cs_.l_max * tg_.n_nodes(), {0.0, 0.0});
}

int ModalTrajectory::index(int j, int ell, int i) const {
  if (j < 0 || j >= kgrid_.n_k) throw std::invalid_argument("k index out of range");
  if (ell < 1 || ell > cs_.l_max) throw std::invalid_argument("mode index out of range");
  if (i < 0 || i > tg_.n_t) throw std::invalid_argument("time index out of range");
  return (j * cs_.l_max + (ell - 1)) * tg_.n_nodes() + i;
}

ModalField ModalTrajectory::field_at(int i) const {
  ModalField f(cs_, kgrid_);
  for (int j = 0; j < kgrid_.n_k; ++j)
    for (int ell = 1; ell <= cs_.l_max; ++ell) f.set(j, ell, at(j, ell, i));
  return f;
}

double ModalTrajectory::energy(int j, int ell) const {
  const double k = kgrid_.node(j);
  return eigenvalue(cs_, ell) + k * k;
}

bool ModalTrajectory::same_lattice(const ModalTrajectory& other) const {
  return cs_ == other.cs_ && kgrid_ == other.kgrid_ && tg_ == other.tg_;
}

namespace {

// Prefix trapezoid of int_0^{t_i} sigma(s) e^{-E(t_i - s)} ds for all nodes,
// via the recurrence I_{i+1} = I_i e^{-E dt} + dt/2 (sigma_{i+1} + sigma_i e^{-E dt}).
std::vector<double> duhamel_series(const SourceProfile& sigma, double energy) {
  const TimeGrid& tg = sigma.grid();
  const double dt = tg.dt();
  const double decay = std::exp(-energy * dt);
  std::vector<double> out(tg.n_nodes(), 0.0);
  for (int i = 0; i + 1 < tg.n_nodes(); ++i) {
    out[i + 1] = out[i] * decay + 0.5 * dt * (sigma.value(i + 1) + sigma.value(i) * decay);
  }
  return out;
}

double duhamel_closed_form(double energy, double t) {
  return -std::expm1(-energy * t) / energy;
}

} // namespace

double duhamel_coefficient(const SourceProfile& sigma, double energy, double t) {
  if (!(energy > 0.0)) throw std::invalid_argument("modal energy must be > 0");
  const TimeGrid& tg = sigma.grid();
  if (t < 0.0 || t > tg.T) throw std::invalid_argument("t outside [0, T]");
  if (sigma.is_constant_one()) return duhamel_closed_form(energy, t);
  if (t == 0.0) return 0.0;

  const double dt = tg.dt();
  const int m = std::min(static_cast<int>(t / dt), tg.n_t);
  const auto series = duhamel_series(sigma, energy);
  const double t_m = tg.node(m);
  double value = series[m];
  if (t > t_m) {
    const double h = t - t_m;
    value = value * std::exp(-energy * h) +
            0.5 * h * (sigma.value_at(t) + sigma.value(m) * std::exp(-energy * h));
  }
  return value;
}

ModalTrajectory solve_forward(const ModalField& beta, const SourceProfile& sigma,
                              const TimeGrid& tg) {
  if (!(sigma.grid() == tg)) throw std::invalid_argument("sigma grid mismatch");
  ModalTrajectory u(beta.cross_section(), beta.kgrid(), tg);
  const int n_k = beta.kgrid().n_k;
  const int l_max = beta.cross_section().l_max;
  for (int j = 0; j < n_k; ++j) {
    for (int ell = 1; ell <= l_max; ++ell) {
      const auto b = beta.at(j, ell);
      if (b == std::complex<double>(0.0, 0.0)) continue;
      const double E = beta.energy(j, ell);
      if (sigma.is_constant_one()) {
        for (int i = 0; i <= tg.n_t; ++i)
          u.set(j, ell, i, b * duhamel_closed_form(E, tg.node(i)));
      } else {
        const auto series = duhamel_series(sigma, E);
        for (int i = 0; i <= tg.n_t; ++i) u.set(j, ell, i, b * series[i]);
      }
    }
  }
  return u;
}

ModalTrajectory solve_homogeneous(const ModalField& v0, const TimeGrid& tg) {
  ModalTrajectory v(v0.cross_section(), v0.kgrid(), tg);
  const int n_k = v0.kgrid().n_k;
  const int l_max = v0.cross_section().l_max;
  for (int j = 0; j < n_k; ++j) {
    for (int ell = 1; ell <= l_max; ++ell) {
      const auto c = v0.at(j, ell);
      if (c == std::complex<double>(0.0, 0.0)) continue;
      const double E = v0.energy(j, ell);
      for (int i = 0; i <= tg.n_t; ++i) {
        // e^{-E t} underflows to zero harmlessly for E t beyond ~745.
        v.set(j, ell, i, c * std::exp(-E * tg.node(i)));
      }
    }
  }
  return v;
}

ModalTrajectory solve_driven(const ModalField& v0, const ModalField& beta,
                             const SourceProfile& sigma, const TimeGrid& tg) {
  if (!v0.same_lattice(beta)) throw std::invalid_argument("lattice mismatch");
  ModalTrajectory hom = solve_homogeneous(v0, tg);
  ModalTrajectory drv = solve_forward(beta, sigma, tg);
  for (int j = 0; j < v0.kgrid().n_k; ++j)
    for (int ell = 1; ell <= v0.cross_section().l_max; ++ell)
      for (int i = 0; i <= tg.n_t; ++i)
        hom.set(j, ell, i, hom.at(j, ell, i) + drv.at(j, ell, i));
  return hom;
}

ModalTrajectory time_derivative(const ModalTrajectory& u, const ModalField& beta,
                                const SourceProfile& sigma) {
  if (!(u.cross_section() == beta.cross_section()) || !(u.kgrid() == beta.kgrid()) ||
      !(u.time_grid() == sigma.grid())) {
    throw std::invalid_argument("trajectory/source lattice mismatch");
  }
  const TimeGrid& tg = u.time_grid();
  ModalTrajectory v(u.cross_section(), u.kgrid(), tg);
  for (int j = 0; j < u.kgrid().n_k; ++j) {
    for (int ell = 1; ell <= u.cross_section().l_max; ++ell) {
      const double E = u.energy(j, ell);
      const auto b = beta.at(j, ell);
      for (int i = 0; i <= tg.n_t; ++i) {
        v.set(j, ell, i, sigma.value(i) * b - E * u.at(j, ell, i));
      }
    }
  }
  return v;
}

NeumannTrace::NeumannTrace(KGrid kgrid, TimeGrid tg) : kgrid_(kgrid), tg_(tg) {
  kgrid_.validate();
  tg_.validate();
  d_.assign(static_cast<std::size_t>(kgrid_.n_k) * tg_.n_nodes(), {0.0, 0.0});
}

int NeumannTrace::index(int j, int i) const {
  if (j < 0 || j >= kgrid_.n_k) throw std::invalid_argument("k index out of range");
  if (i < 0 || i > tg_.n_t) throw std::invalid_argument("time index out of range");
  return j * tg_.n_nodes() + i;
}

NeumannTrace NeumannTrace::operator-(const NeumannTrace& other) const {
  if (!(kgrid_ == other.kgrid_) || !(tg_ == other.tg_)) {
    throw std::invalid_argument("trace lattice mismatch");
  }
  NeumannTrace out(kgrid_, tg_);
  for (std::size_t i = 0; i < d_.size(); ++i) out.d_[i] = d_[i] - other.d_[i];
  return out;
}

NeumannTrace neumann_trace(const ModalTrajectory& u) {
  const auto& cs = u.cross_section();
  NeumannTrace d(u.kgrid(), u.time_grid());
  for (int j = 0; j < u.kgrid().n_k; ++j) {
    for (int i = 0; i <= u.time_grid().n_t; ++i) {
      std::complex<double> acc(0.0, 0.0);
      for (int ell = 1; ell <= cs.l_max; ++ell) {
        acc += u.at(j, ell, i) * normal_derivative_on_gamma(cs, ell);
      }
      d.set(j, i, acc);
    }
  }
  return d;
}

namespace {

double trace_norm_sq(const NeumannTrace& d, bool with_derivative) {
  const TimeGrid& tg = d.time_grid();
  const double dk = d.kgrid().dk();
  const auto w = trapezoid_weights(tg.n_nodes(), tg.dt());
  double total = 0.0;
  std::vector<std::complex<double>> col(tg.n_nodes());
  for (int j = 0; j < d.kgrid().n_k; ++j) {
    for (int i = 0; i <= tg.n_t; ++i) col[i] = d.at(j, i);
    double s = 0.0;
    for (int i = 0; i <= tg.n_t; ++i) s += w[i] * std::norm(col[i]);
    if (with_derivative) {
      const auto dcol = fd_derivative(col, tg.dt());
      for (int i = 0; i <= tg.n_t; ++i) s += w[i] * std::norm(dcol[i]);
    }
    total += dk * s;
  }
  return total;
}

} // namespace

double trace_h1_norm(const NeumannTrace& d) { return std::sqrt(trace_norm_sq(d, true)); }

double trace_l2_norm(const NeumannTrace& d) { return std::sqrt(trace_norm_sq(d, false)); }

NeumannTrace add_noise(const NeumannTrace& d, double delta, std::uint64_t seed) {
  if (delta < 0.0) throw std::invalid_argument("noise level must be >= 0");
  NeumannTrace out = d;
  out.set_provenance({true, delta, seed});
  if (delta == 0.0) return out;

  const int n_k = d.kgrid().n_k;
  const int n_nodes = d.time_grid().n_nodes();
  GaussianStream gs(seed);
  std::vector<std::complex<double>> raw(static_cast<std::size_t>(n_k) * n_nodes);
  for (auto& z : raw) z = gs.next_complex();

  NeumannTrace e(d.kgrid(), d.time_grid());
  for (int j = 0; j < n_k; ++j) {
    const int jm = d.kgrid().mirror(j);
    for (int i = 0; i < n_nodes; ++i) {
      const auto z = raw[static_cast<std::size_t>(j) * n_nodes + i];
      const auto zm = raw[static_cast<std::size_t>(jm) * n_nodes + i];
      e.set(j, i, 0.5 * (z + std::conj(zm)));
    }
  }
  const double norm = trace_h1_norm(e);
  const double scale = delta / norm;
  for (int j = 0; j < n_k; ++j)
    for (int i = 0; i < n_nodes; ++i) out.set(j, i, d.at(j, i) + scale * e.at(j, i));
  return out;
}

EnergyEstimateReport check_energy_estimates(const ModalField& v0, const ModalField& beta,
                                            const SourceProfile& sigma, const TimeGrid& tg) {
  EnergyEstimateReport rep;

  // es1: driven solution with data (v0, sigma*beta).
  const ModalTrajectory v = solve_driven(v0, beta, sigma, tg);
  rep.es1_rhs = h1_norm(v0) + sigma.l2_norm() * h1_norm(beta);
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= tg.n_t; ++i) {
    const double lhs = h1_norm(v.field_at(i));
    rep.es1_lhs_max = std::max(rep.es1_lhs_max, lhs);
    worst = std::min(worst, rep.es1_rhs - lhs);
  }
  rep.es1_margin = worst;

  // es2: v = dt(u) for the source problem driven by sigma*beta.
  const ModalTrajectory u = solve_forward(beta, sigma, tg);
  const ModalTrajectory du = time_derivative(u, beta, sigma);
  rep.es2_rhs = (1.0 + std::sqrt(tg.T)) * sigma.c1_norm() * h1_norm(beta);
  worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= tg.n_t; ++i) {
    const double lhs = h1_norm(du.field_at(i));
    rep.es2_lhs_max = std::max(rep.es2_lhs_max, lhs);
    worst = std::min(worst, rep.es2_rhs - lhs);
  }
  rep.es2_margin = worst;
  return rep;
}

} // namespace heatguide
