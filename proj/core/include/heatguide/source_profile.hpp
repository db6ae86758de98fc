#ifndef HEATGUIDE_SOURCE_PROFILE_HPP
#define HEATGUIDE_SOURCE_PROFILE_HPP

#include <vector>

#include "heatguide/time_grid.hpp"

namespace heatguide {

/// Known time factor sigma(t) of the separable source sigma(t)*beta(x),
/// sampled at the time nodes. The constant-1 profile and the decay-heat
/// profile e^{-mu t} keep analytic derivatives; free-form samples fall back
/// to second-order difference stencils.
class SourceProfile {
 public:
  static SourceProfile constant_one(const TimeGrid& tg);
  static SourceProfile exp_decay(double mu, const TimeGrid& tg);
  static SourceProfile from_samples(std::vector<double> samples, const TimeGrid& tg);

  const TimeGrid& grid() const { return tg_; }
  bool is_constant_one() const { return kind_ == Kind::ConstantOne; }

  double value(int i) const { return samples_[i]; }
  double sigma0() const { return samples_.front(); }
  /// Linear interpolation between nodes (exact at nodes).
  double value_at(double t) const;
  double derivative(int i) const;

  /// max |sigma| + max |sigma'| over the nodes.
  double c1_norm() const;
  /// Trapezoid realization of ||sigma||_{L^2(0,T)}.
  double l2_norm() const;

 private:
  enum class Kind { ConstantOne, ExpDecay, Samples };
  SourceProfile(Kind kind, double mu, std::vector<double> samples, const TimeGrid& tg);

  Kind kind_;
  double mu_ = 0.0;
  std::vector<double> samples_;
  TimeGrid tg_;
};

} // namespace heatguide

#endif
