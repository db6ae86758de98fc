#include "heatguide/inverse.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "heatguide/errors.hpp"
#include "heatguide/quadrature.hpp"

namespace heatguide {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double phi_modulus(double r) {
  if (r < 0.0) throw std::invalid_argument("phi_modulus requires r >= 0");
  if (r == 0.0) return 0.0;
  if (r == 1.0) throw std::domain_error("phi_modulus undefined at r = 1 (|ln r| = 0)");
  return std::sqrt(r) + 1.0 / std::sqrt(std::abs(std::log(r)));
}

CutoffDecision choose_cutoff(double kappa, double T, double lambda_1) {
  if (kappa < 0.0) throw std::invalid_argument("kappa must be >= 0");
  if (!(T > 0.0) || !(lambda_1 > 0.0))
    throw std::invalid_argument("choose_cutoff requires T > 0 and lambda_1 > 0");
  if (kappa == 0.0) return {CutoffRegime::Zero, 0.0};
  if (kappa < std::exp(-2.0 * T * lambda_1)) {
    return {CutoffRegime::Cutoff, -std::log(kappa) / (2.0 * T)};
  }
  return {CutoffRegime::Saturated, lambda_1};
}

ModalField reconstruct_from_final_state(const ModalField& v_T, double T, double lambda_cut) {
  if (!(T > 0.0)) throw std::invalid_argument("T must be > 0");
  ModalField beta(v_T.cross_section(), v_T.kgrid());
  for (int j = 0; j < v_T.kgrid().n_k; ++j) {
    for (int ell = 1; ell <= v_T.cross_section().l_max; ++ell) {
      const double E = v_T.energy(j, ell);
      if (E > lambda_cut) continue;
      const double expo = E * T;
      if (expo > 700.0) {
        throw overflow_guard_error("reconstruct_from_final_state: e^{E T} with E T = " +
                                   std::to_string(expo) + " exceeds the double range");
      }
      beta.set(j, ell, std::exp(expo) * v_T.at(j, ell));
    }
  }
  return beta;
}

EnergySplit energy_split_check(const ModalField& beta, const ModalField& v_T,
                               double lambda, double T) {
  if (!beta.same_lattice(v_T)) throw std::invalid_argument("lattice mismatch");
  const double l1 = lambda_1(beta.cross_section());
  if (!(lambda > l1)) {
    throw precondition_error("energy_split_check requires lambda > lambda_1 = " +
                             std::to_string(l1));
  }
  EnergySplit out;
  const double l2b = l2_norm(beta);
  out.lhs = l2b * l2b;
  const double l2v = l2_norm(v_T);
  double first;
  if (l2v == 0.0) {
    first = 0.0;
  } else {
    const double log_first = 2.0 * lambda * T + 2.0 * std::log(l2v);
    first = log_first > 709.0 ? kInf : std::exp(log_first);
  }
  const double semi = h1_seminorm(beta);
  out.rhs = first + semi * semi / lambda;
  out.margin = out.rhs - out.lhs;
  return out;
}

double observability_ratio(const ModalField& v0, const TimeGrid& tg) {
  if (v0.is_zero()) throw std::invalid_argument("observability_ratio requires nonzero v0");
  const ModalTrajectory v = solve_homogeneous(v0, tg);
  const double num = h1_norm(v.field_at(tg.n_t));
  const double den = trace_l2_norm(neumann_trace(v));
  if (den == 0.0) {
    // Impossible for nonzero band-limited v0 (the eigenfunction flux at
    // gamma' never vanishes); a zero here means quadrature underflow.
    throw std::runtime_error("observability_ratio: boundary quadrature underflow");
  }
  return num / den;
}

double empirical_observability_constant(const CrossSection& cs, const KGrid& kgrid,
                                        const TimeGrid& tg, int sample_size,
                                        double energy_cap, std::uint64_t seed) {
  if (sample_size < 1) throw std::invalid_argument("sample_size must be >= 1");
  double worst = 0.0;
  for (int s = 0; s < sample_size; ++s) {
    const ModalField v0 = random_field(cs, kgrid, energy_cap, seed + static_cast<std::uint64_t>(s));
    worst = std::max(worst, observability_ratio(v0, tg));
  }
  return worst;
}

namespace {

// Ridge-regularized weighted least squares for one k node. Columns are
// equilibrated to unit weighted norm before forming the normal equations;
// the penalty stays on the original coefficients.
struct KFit {
  std::vector<std::complex<double>> coeffs;
  double condition = 0.0;
};

KFit fit_k_node(const std::vector<std::vector<double>>& columns,
                const std::vector<std::complex<double>>& target,
                const std::vector<double>& weights, double ridge) {
  const int n_rows = static_cast<int>(target.size());
  const int n_cols = static_cast<int>(columns.size());
  Eigen::MatrixXd X(n_rows, n_cols);
  for (int c = 0; c < n_cols; ++c)
    for (int r = 0; r < n_rows; ++r) X(r, c) = columns[c][r];
  Eigen::VectorXd w(n_rows);
  for (int r = 0; r < n_rows; ++r) w(r) = weights[r];

  Eigen::VectorXd scale(n_cols);
  for (int c = 0; c < n_cols; ++c) {
    const double nrm = std::sqrt((w.array() * X.col(c).array().square()).sum());
    scale(c) = nrm > 0.0 ? 1.0 / nrm : 1.0;
    X.col(c) *= scale(c);
  }

  Eigen::MatrixXd G = X.transpose() * w.asDiagonal() * X;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  const double emin = es.eigenvalues().minCoeff();
  const double emax = es.eigenvalues().maxCoeff();
  KFit out;
  out.condition = (emin > 0.0) ? emax / emin : kInf;

  Eigen::MatrixXd A = G;
  // Penalty on the original coefficients: gamma = beta / scale, so the ridge
  // block is r * diag(scale^2).
  for (int c = 0; c < n_cols; ++c) A(c, c) += ridge * scale(c) * scale(c);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(A);

  Eigen::VectorXd rhs_re(n_cols), rhs_im(n_cols);
  Eigen::VectorXd tre(n_rows), tim(n_rows);
  for (int r = 0; r < n_rows; ++r) {
    tre(r) = target[r].real();
    tim(r) = target[r].imag();
  }
  rhs_re = X.transpose() * (w.array() * tre.array()).matrix();
  rhs_im = X.transpose() * (w.array() * tim.array()).matrix();
  const Eigen::VectorXd gre = ldlt.solve(rhs_re);
  const Eigen::VectorXd gim = ldlt.solve(rhs_im);

  out.coeffs.resize(n_cols);
  for (int c = 0; c < n_cols; ++c) {
    out.coeffs[c] = std::complex<double>(gre(c) * scale(c), gim(c) * scale(c));
  }
  return out;
}

} // namespace

InversionResult reconstruct_from_trace(const NeumannTrace& d, const CrossSection& cs,
                                       const SourceProfile& sigma,
                                       const InversionConfig& cfg) {
  cs.validate();
  if (sigma.sigma0() == 0.0) {
    throw precondition_error("reconstruct_from_trace requires sigma(0) != 0");
  }
  if (!(sigma.grid() == d.time_grid())) throw std::invalid_argument("trace/sigma grid mismatch");
  if (cfg.l_fit < 1) throw std::invalid_argument("l_fit must be >= 1");
  const int l_fit = std::min(cfg.l_fit, cs.l_max); // cap on the modes fit per k

  const TimeGrid& tg = d.time_grid();
  const KGrid& kg = d.kgrid();
  const int n_nodes = tg.n_nodes();
  const double dt = tg.dt();

  InversionResult result{ModalField(cs, kg), {}};
  InversionDiagnostics& diag = result.diagnostics;

  diag.kappa = trace_h1_norm(d);
  const double l1 = lambda_1(cs);
  if (cfg.cutoff_policy == CutoffPolicy::PaperRule) {
    const CutoffDecision cut = choose_cutoff(diag.kappa, tg.T, l1);
    diag.regime = cut.regime;
    diag.lambda_cut = cut.lambda_cut;
  } else {
    diag.regime = CutoffRegime::Cutoff;
    diag.lambda_cut = cfg.fixed_lambda_cut;
  }
  diag.ridge = cfg.ridge.value_or(diag.kappa);

  if (diag.regime == CutoffRegime::Zero) {
    diag.note = "zero data: reconstruction is the zero field";
    return result;
  }
  if (cfg.cutoff_policy == CutoffPolicy::PaperRule && diag.regime == CutoffRegime::Saturated) {
    diag.note = "saturated regime: lambda_cut = lambda_1; error bound is the budget M = " +
                std::to_string(cfg.m_budget);
  }
  if (!sigma.is_constant_one()) {
    if (!diag.note.empty()) diag.note += "; ";
    diag.note += "non-constant sigma: best-effort fit against trapezoid Duhamel columns";
  }

  const auto weights = trapezoid_weights(n_nodes, dt);

  // v-trace: the same stencil is applied to the data and to the model
  // columns, so the fit is consistent on the lattice.
  std::vector<std::complex<double>> column_data(n_nodes);

  for (int j = 0; j < kg.n_k; ++j) {
    const double k = kg.node(j);
    std::vector<int> modes;
    for (int ell = 1; ell <= l_fit; ++ell) {
      if (eigenvalue(cs, ell) + k * k <= diag.lambda_cut) modes.push_back(ell);
    }
    if (modes.empty()) continue;

    std::vector<std::vector<double>> columns;
    columns.reserve(modes.size());
    for (int ell : modes) {
      const double E = eigenvalue(cs, ell) + k * k;
      std::vector<double> u_col(n_nodes);
      for (int i = 0; i < n_nodes; ++i) {
        u_col[i] = duhamel_coefficient(sigma, E, tg.node(i)) * normal_derivative_on_gamma(cs, ell);
      }
      columns.push_back(fd_derivative(u_col, dt));
    }

    for (int i = 0; i < n_nodes; ++i) column_data[i] = d.at(j, i);
    const auto v_trace = fd_derivative(column_data, dt);

    const KFit fit = fit_k_node(columns, v_trace, weights, diag.ridge);
    for (std::size_t c = 0; c < modes.size(); ++c) result.beta_hat.set(j, modes[c], fit.coeffs[c]);
    diag.fits.push_back({j, static_cast<int>(modes.size()), fit.condition});
  }
  return result;
}

SweepResult stability_sweep(const ModalField& beta, const std::vector<double>& deltas,
                            const SourceProfile& sigma, const TimeGrid& tg,
                            const InversionConfig& cfg, std::uint64_t seed) {
  const double h1 = h1_norm(beta);
  if (h1 > cfg.m_budget * (1.0 + 1e-12)) {
    throw precondition_error("stability_sweep requires h1_norm(beta) <= M = " +
                             std::to_string(cfg.m_budget));
  }
  const double l1 = lambda_1(beta.cross_section());
  const NeumannTrace clean = neumann_trace(solve_forward(beta, sigma, tg));

  SweepResult out;
  double c_fit = 0.0;
  for (std::size_t idx = 0; idx < deltas.size(); ++idx) {
    const double delta = deltas[idx];
    if (delta < 0.0) throw std::invalid_argument("sweep deltas must be >= 0");
    SweepRecord rec;
    rec.delta = delta;

    InversionConfig run_cfg = cfg;
    run_cfg.cutoff_policy = CutoffPolicy::Fixed;

    NeumannTrace noisy = add_noise(clean, delta, seed + static_cast<std::uint64_t>(idx));
    rec.kappa = trace_h1_norm(noisy - clean);

    if (delta == 0.0) {
      // Degenerate noiseless record: full cutoff over the active energies,
      // no regularization; excluded from the C_fit calibration (Phi(0) = 0).
      run_cfg.fixed_lambda_cut = beta.max_active_energy();
      run_cfg.ridge = 0.0;
    } else {
      const CutoffDecision cut = choose_cutoff(rec.kappa, tg.T, l1);
      if (cut.regime == CutoffRegime::Saturated) {
        rec.saturated = true;
        rec.err = l2_norm(beta); // the trivial budget bound applies
        out.records.push_back(rec);
        continue;
      }
      run_cfg.fixed_lambda_cut = cut.lambda_cut;
      if (!run_cfg.ridge.has_value()) run_cfg.ridge = rec.kappa;
    }

    const InversionResult inv =
        reconstruct_from_trace(noisy, beta.cross_section(), sigma, run_cfg);
    rec.err = l2_norm(beta - inv.beta_hat);
    if (rec.kappa > 0.0) {
      rec.ratio = rec.err / rec.kappa;
      c_fit = std::max(c_fit, rec.err / phi_modulus(rec.kappa));
      out.has_c_fit = true;
    }
    out.records.push_back(rec);
  }

  out.c_fit = c_fit;
  for (auto& rec : out.records) {
    if (!rec.saturated && rec.kappa > 0.0) rec.bound = out.c_fit * phi_modulus(rec.kappa);
  }
  return out;
}

} // namespace heatguide
