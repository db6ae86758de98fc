#include "heatguide/modal_field.hpp"

#include <cmath>
#include <stdexcept>

#include "heatguide/rng.hpp"

namespace heatguide {

namespace {
constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343818684;
}

ModalField::ModalField(CrossSection cs, KGrid kgrid)
    : cs_(cs), kgrid_(kgrid) {
  cs_.validate();
  kgrid_.validate();
  c_.assign(static_cast<std::size_t>(kgrid_.n_k) * cs_.l_max, {0.0, 0.0});
}

int ModalField::index(int j, int ell) const {
  if (j < 0 || j >= kgrid_.n_k) throw std::invalid_argument("k index out of range");
  if (ell < 1 || ell > cs_.l_max) throw std::invalid_argument("mode index out of range");
  return j * cs_.l_max + (ell - 1);
}

double ModalField::energy(int j, int ell) const {
  const double k = kgrid_.node(j);
  return eigenvalue(cs_, ell) + k * k;
}

double ModalField::max_active_energy() const {
  double e = 0.0;
  for (int j = 0; j < kgrid_.n_k; ++j)
    for (int ell = 1; ell <= cs_.l_max; ++ell)
      if (std::abs(at(j, ell)) > 0.0) e = std::max(e, energy(j, ell));
  return e;
}

bool ModalField::is_zero() const {
  for (const auto& z : c_)
    if (z != std::complex<double>(0.0, 0.0)) return false;
  return true;
}

bool ModalField::is_hermitian(double tol) const {
  for (int j = 0; j < kgrid_.n_k; ++j) {
    const int jm = kgrid_.mirror(j);
    for (int ell = 1; ell <= cs_.l_max; ++ell) {
      if (std::abs(at(jm, ell) - std::conj(at(j, ell))) > tol) return false;
    }
  }
  return true;
}

bool ModalField::same_lattice(const ModalField& other) const {
  return cs_ == other.cs_ && kgrid_ == other.kgrid_;
}

ModalField ModalField::scaled(double s) const {
  ModalField out(*this);
  for (auto& z : out.c_) z *= s;
  return out;
}

ModalField ModalField::rescaled_to_h1(double m) const {
  const double n = h1_norm(*this);
  if (n == 0.0) throw std::invalid_argument("cannot rescale the zero field");
  return scaled(m / n);
}

ModalField ModalField::operator-(const ModalField& other) const {
  if (!same_lattice(other)) throw std::invalid_argument("lattice mismatch");
  ModalField out(*this);
  for (std::size_t i = 0; i < c_.size(); ++i) out.c_[i] -= other.c_[i];
  return out;
}

ModalField ModalField::operator+(const ModalField& other) const {
  if (!same_lattice(other)) throw std::invalid_argument("lattice mismatch");
  ModalField out(*this);
  for (std::size_t i = 0; i < c_.size(); ++i) out.c_[i] += other.c_[i];
  return out;
}

double l2_norm(const ModalField& f) {
  const double dk = f.kgrid().dk();
  double s = 0.0;
  for (int j = 0; j < f.kgrid().n_k; ++j)
    for (int ell = 1; ell <= f.cross_section().l_max; ++ell)
      s += dk * std::norm(f.at(j, ell));
  return std::sqrt(s);
}

double h1_seminorm(const ModalField& f) {
  const double dk = f.kgrid().dk();
  double s = 0.0;
  for (int j = 0; j < f.kgrid().n_k; ++j)
    for (int ell = 1; ell <= f.cross_section().l_max; ++ell)
      s += dk * f.energy(j, ell) * std::norm(f.at(j, ell));
  return std::sqrt(s);
}

double h1_norm(const ModalField& f) {
  const double a = l2_norm(f);
  const double b = h1_seminorm(f);
  return std::sqrt(a * a + b * b);
}

double synthesize(const ModalField& f, double x_prime, double x_n) {
  const auto& cs = f.cross_section();
  const auto& kg = f.kgrid();
  const double dk = kg.dk();
  std::complex<double> acc(0.0, 0.0);
  for (int j = 0; j < kg.n_k; ++j) {
    const double k = kg.node(j);
    std::complex<double> fiber(0.0, 0.0);
    for (int ell = 1; ell <= cs.l_max; ++ell) {
      const auto c = f.at(j, ell);
      if (c == std::complex<double>(0.0, 0.0)) continue;
      fiber += c * eigenfunction(cs, ell, x_prime);
    }
    if (fiber == std::complex<double>(0.0, 0.0)) continue;
    acc += fiber * std::polar(1.0, k * x_n);
  }
  return kInvSqrt2Pi * dk * acc.real();
}

ModalField random_field(const CrossSection& cs, const KGrid& kgrid,
                        double energy_cap, std::uint64_t seed) {
  ModalField f(cs, kgrid);
  GaussianStream gs(seed);
  // Fill the lower half of the k grid and mirror; fixed (j, ell) order keeps
  // the draw deterministic per seed.
  for (int j = 0; j < kgrid.n_k / 2; ++j) {
    for (int ell = 1; ell <= cs.l_max; ++ell) {
      if (f.energy(j, ell) > energy_cap) continue;
      const auto z = gs.next_complex();
      f.set(j, ell, z);
      f.set(kgrid.mirror(j), ell, std::conj(z));
    }
  }
  return f;
}

} // namespace heatguide
