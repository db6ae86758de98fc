#ifndef HEATGUIDE_INVERSE_HPP
#define HEATGUIDE_INVERSE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "heatguide/forward.hpp"

namespace heatguide {

/// Log-stability modulus Phi(r) = sqrt(r) + |ln r|^{-1/2}, Phi(0) = 0.
/// Domain error at r = 1 where |ln r|^{-1/2} is undefined; the sweep only
/// ever evaluates it on the small-kappa branch r < e^{-2 T lambda_1} < 1.
double phi_modulus(double r);

enum class CutoffRegime { Zero, Cutoff, Saturated };

struct CutoffDecision {
  CutoffRegime regime = CutoffRegime::Zero;
  /// -ln(kappa)/(2T) in the Cutoff regime (> lambda_1 strictly); lambda_1
  /// in the Saturated regime where the only available bound is the budget M;
  /// 0 in the Zero regime.
  double lambda_cut = 0.0;
};

/// The three kappa regimes: kappa = 0, kappa in (0, e^{-2 T lambda_1}),
/// kappa >= e^{-2 T lambda_1}.
CutoffDecision choose_cutoff(double kappa, double T, double lambda_1);

/// Spectral reconstruction from the final state: beta = e^{E T} v(T) on
/// lattice points with E <= lambda_cut, zero outside. In-cutoff points with
/// E*T > 700 raise overflow_guard_error instead of producing Inf.
ModalField reconstruct_from_final_state(const ModalField& v_T, double T, double lambda_cut);

struct EnergySplit {
  double lhs = 0.0;    // l2(beta)^2
  double rhs = 0.0;    // e^{2 lambda T} l2(v_T)^2 + h1_seminorm(beta)^2 / lambda
  double margin = 0.0; // rhs - lhs
};

/// Energy-splitting inequality check; requires lambda > lambda_1. The first
/// rhs term saturates to +Inf when its exponent leaves the double range
/// (the inequality then holds trivially).
EnergySplit energy_split_check(const ModalField& beta, const ModalField& v_T,
                               double lambda, double T);

/// h1(v(T)) / ||d_nu v||_{L^2((0,T) x gamma)} for the homogeneous solution
/// with initial state v0. Scale-invariant; strictly positive denominator for
/// nonzero band-limited v0.
double observability_ratio(const ModalField& v0, const TimeGrid& tg);

/// Max observability ratio over seeded random draws with energies below
/// energy_cap; the empirical surrogate for the observability constant.
double empirical_observability_constant(const CrossSection& cs, const KGrid& kgrid,
                                        const TimeGrid& tg, int sample_size,
                                        double energy_cap, std::uint64_t seed);

enum class CutoffPolicy { PaperRule, Fixed };

struct InversionConfig {
  int l_fit = 16;
  /// Tikhonov parameter; defaults to the measured data norm kappa.
  std::optional<double> ridge;
  CutoffPolicy cutoff_policy = CutoffPolicy::PaperRule;
  double fixed_lambda_cut = 0.0;
  /// H^1 budget of the admissible set, reported in the Saturated regime.
  double m_budget = 1.0;
};

struct KFitDiagnostic {
  int k_index = 0;
  int n_modes = 0;
  double condition = 0.0; // of the equilibrated normal matrix, before ridge
};

struct InversionDiagnostics {
  double kappa = 0.0;
  CutoffRegime regime = CutoffRegime::Zero;
  double lambda_cut = 0.0;
  double ridge = 0.0;
  std::vector<KFitDiagnostic> fits;
  std::string note;
};

struct InversionResult {
  ModalField beta_hat;
  InversionDiagnostics diagnostics;
};

/// Reconstruction from the Neumann trace of the source problem:
/// differentiate the trace in time (second-order stencils), choose the
/// cutoff from the data norm (or the fixed policy), then per k node solve
/// the ridge-regularized least squares for the in-cutoff modal coefficients.
/// The design columns are the same stencil applied to the closed-form
/// Duhamel columns, so noiseless in-cutoff data is reproduced exactly.
/// Requires sigma(0) != 0.
InversionResult reconstruct_from_trace(const NeumannTrace& d, const CrossSection& cs,
                                       const SourceProfile& sigma,
                                       const InversionConfig& cfg);

struct SweepRecord {
  double delta = 0.0; // injected noise norm
  double kappa = 0.0; // measured trace norm of the perturbation
  double err = 0.0;   // l2(beta - beta_hat)
  double bound = 0.0; // C_fit * Phi(kappa)
  double ratio = 0.0; // err / kappa, the super-Lipschitz indicator
  bool saturated = false;
};

struct SweepResult {
  std::vector<SweepRecord> records;
  double c_fit = 0.0;
  bool has_c_fit = false;
};

/// Stability experiment against the log modulus: for each delta, perturb the
/// clean trace, reconstruct with the cutoff driven by the measured
/// perturbation norm, and calibrate C_fit = max err/Phi(kappa) over the
/// non-saturated records.
SweepResult stability_sweep(const ModalField& beta, const std::vector<double>& deltas,
                            const SourceProfile& sigma, const TimeGrid& tg,
                            const InversionConfig& cfg, std::uint64_t seed);

} // namespace heatguide

#endif
