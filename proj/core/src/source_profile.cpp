#include "heatguide/source_profile.hpp"

#include <cmath>
#include <stdexcept>

#include "heatguide/quadrature.hpp"

namespace heatguide {

SourceProfile::SourceProfile(Kind kind, double mu, std::vector<double> samples,
                             const TimeGrid& tg)
    : kind_(kind), mu_(mu), samples_(std::move(samples)), tg_(tg) {
  tg_.validate();
  if (samples_.size() != static_cast<std::size_t>(tg_.n_nodes())) {
    throw std::invalid_argument("sigma samples must cover every time node");
  }
  for (double s : samples_) {
    if (!std::isfinite(s)) throw std::invalid_argument("sigma samples must be finite");
  }
}

SourceProfile SourceProfile::constant_one(const TimeGrid& tg) {
  return SourceProfile(Kind::ConstantOne, 0.0,
                       std::vector<double>(tg.n_nodes(), 1.0), tg);
}

SourceProfile SourceProfile::exp_decay(double mu, const TimeGrid& tg) {
  std::vector<double> s(tg.n_nodes());
  for (int i = 0; i < tg.n_nodes(); ++i) s[i] = std::exp(-mu * tg.node(i));
  return SourceProfile(Kind::ExpDecay, mu, std::move(s), tg);
}

SourceProfile SourceProfile::from_samples(std::vector<double> samples, const TimeGrid& tg) {
  return SourceProfile(Kind::Samples, 0.0, std::move(samples), tg);
}

double SourceProfile::value_at(double t) const {
  if (t < 0.0 || t > tg_.T) throw std::invalid_argument("t outside [0, T]");
  const double pos = t / tg_.dt();
  const int i = std::min(static_cast<int>(pos), tg_.n_t - 1);
  const double w = pos - i;
  return (1.0 - w) * samples_[i] + w * samples_[i + 1];
}

double SourceProfile::derivative(int i) const {
  switch (kind_) {
    case Kind::ConstantOne:
      return 0.0;
    case Kind::ExpDecay:
      return -mu_ * samples_[i];
    case Kind::Samples: {
      const auto d = fd_derivative(samples_, tg_.dt());
      return d[i];
    }
  }
  return 0.0;
}

double SourceProfile::c1_norm() const {
  double vmax = 0.0;
  for (double s : samples_) vmax = std::max(vmax, std::abs(s));
  double dmax = 0.0;
  if (kind_ == Kind::Samples) {
    const auto d = fd_derivative(samples_, tg_.dt());
    for (double v : d) dmax = std::max(dmax, std::abs(v));
  } else {
    for (int i = 0; i < tg_.n_nodes(); ++i) dmax = std::max(dmax, std::abs(derivative(i)));
  }
  return vmax + dmax;
}

double SourceProfile::l2_norm() const {
  const auto w = trapezoid_weights(samples_.size(), tg_.dt());
  double s = 0.0;
  for (std::size_t i = 0; i < samples_.size(); ++i) s += w[i] * samples_[i] * samples_[i];
  return std::sqrt(s);
}

} // namespace heatguide
