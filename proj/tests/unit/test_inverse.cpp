#include <doctest.h>

#include <cmath>
#include <complex>

#include "heatguide/errors.hpp"
#include "heatguide/inverse.hpp"

using namespace heatguide;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

struct EngineeredLattice {
  CrossSection cs;
  KGrid kgrid;
  int j;
};

EngineeredLattice lattice_with_energy(double E, double k_max = 0.4, int n_k = 8, int l_max = 4) {
  const KGrid kg{k_max, n_k};
  const double k = kg.node(n_k / 2);
  const double lam1 = E - k * k;
  REQUIRE(lam1 > 0.0);
  return {CrossSection{kPi / std::sqrt(lam1), GammaSide::RightEnd, l_max}, kg, n_k / 2};
}

} // namespace

TEST_CASE("phi_modulus") {
  CHECK(phi_modulus(0.0) == 0.0);
  CHECK(phi_modulus(std::exp(-4.0)) ==
        doctest::Approx(std::exp(-2.0) + 0.5).epsilon(1e-13));
  CHECK(phi_modulus(std::exp(-1.0)) ==
        doctest::Approx(std::exp(-0.5) + 1.0).epsilon(1e-13));
  CHECK_THROWS_AS((void)phi_modulus(1.0), std::domain_error);
  CHECK_THROWS_AS((void)phi_modulus(-0.1), std::invalid_argument);

  // continuous at 0 and strictly increasing on the operative branch
  CHECK(phi_modulus(1e-300) <= 0.05);
  double prev = 0.0;
  for (double r = 1e-12; r < std::exp(-2.0); r *= 10.0) {
    const double cur = phi_modulus(r);
    CHECK(cur > prev);
    prev = cur;
  }
}

TEST_CASE("choose_cutoff regimes") {
  CHECK(choose_cutoff(0.0, 1.0, 1.0).regime == CutoffRegime::Zero);

  const CutoffDecision c = choose_cutoff(std::exp(-4.0), 1.0, 1.0);
  CHECK(c.regime == CutoffRegime::Cutoff);
  CHECK(c.lambda_cut == doctest::Approx(2.0).epsilon(1e-14));

  const CutoffDecision s = choose_cutoff(1.0, 1.0, 1.0);
  CHECK(s.regime == CutoffRegime::Saturated);
  CHECK(s.lambda_cut == doctest::Approx(1.0).epsilon(1e-14));
  // the threshold itself saturates
  CHECK(choose_cutoff(std::exp(-2.0), 1.0, 1.0).regime == CutoffRegime::Saturated);

  // strict dominance of the Cutoff branch over lambda_1
  for (double kappa : {1e-1 * std::exp(-2.0), 1e-3, 1e-9}) {
    const CutoffDecision d = choose_cutoff(kappa, 1.0, 1.0);
    CHECK(d.regime == CutoffRegime::Cutoff);
    CHECK(d.lambda_cut > 1.0);
  }
  CHECK_THROWS_AS((void)choose_cutoff(-1e-9, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("reconstruct_from_final_state") {
  SUBCASE("single-mode inflation") {
    const auto lat = lattice_with_energy(1.0);
    ModalField vT(lat.cs, lat.kgrid);
    vT.set(lat.j, 1, {std::exp(-1.0), 0.0});
    const ModalField beta = reconstruct_from_final_state(vT, 1.0, 2.0);
    CHECK(std::abs(beta.at(lat.j, 1).real() - 1.0) <= 1e-12);
  }
  SUBCASE("cutoff zeroing") {
    const auto lat = lattice_with_energy(3.0);
    ModalField vT(lat.cs, lat.kgrid);
    vT.set(lat.j, 1, {0.5, 0.0}); // energy 3 > cutoff 2
    const ModalField beta = reconstruct_from_final_state(vT, 1.0, 2.0);
    CHECK(beta.at(lat.j, 1) == std::complex<double>(0.0, 0.0));
  }
  SUBCASE("roundtrip identity on the lattice") {
    const CrossSection cs{kPi, GammaSide::RightEnd, 4};
    const KGrid kg{2.0, 16};
    const TimeGrid tg{1.0, 64};
    const ModalField beta = random_field(cs, kg, 20.0, 31);
    REQUIRE(!beta.is_zero());
    const ModalField vT = solve_homogeneous(beta, tg).field_at(tg.n_t);
    const ModalField rec = reconstruct_from_final_state(vT, tg.T, 21.0);
    CHECK(l2_norm(rec - beta) <= 1e-10 * l2_norm(beta));
  }
  SUBCASE("overflow guard") {
    const auto lat = lattice_with_energy(800.0, 0.4, 8, 1);
    ModalField vT(lat.cs, lat.kgrid);
    vT.set(lat.j, 1, {1e-300, 0.0});
    CHECK_THROWS_AS((void)reconstruct_from_final_state(vT, 1.0, 1000.0),
                    overflow_guard_error);
  }
}

TEST_CASE("energy_split_check") {
  const CrossSection cs{kPi, GammaSide::RightEnd, 6};
  const KGrid kg{2.0, 16};
  const TimeGrid tg{1.0, 64};

  SUBCASE("zero field") {
    const ModalField zero(cs, kg);
    const EnergySplit es = energy_split_check(zero, zero, 2.0, tg.T);
    CHECK(es.lhs == 0.0);
    CHECK(es.rhs == 0.0);
    CHECK(es.margin == 0.0);
  }
  SUBCASE("single mode dominated by the first term when lambda >= E") {
    const auto lat = lattice_with_energy(2.0);
    ModalField beta(lat.cs, lat.kgrid);
    beta.set(lat.j, 1, {1.0, 0.0});
    const ModalField vT = solve_homogeneous(beta, tg).field_at(tg.n_t);
    const EnergySplit es = energy_split_check(beta, vT, 3.0, tg.T);
    const double first = std::exp(2.0 * 3.0 * tg.T) * l2_norm(vT) * l2_norm(vT);
    CHECK(es.lhs <= first * (1.0 + 1e-12));
    CHECK(es.margin >= -1e-12 * es.rhs);
  }
  SUBCASE("randomized inequality sweep") {
    const double l1 = lambda_1(cs);
    for (std::uint64_t s = 0; s < 100; ++s) {
      const ModalField beta = random_field(cs, kg, 25.0, 1000 + s);
      const ModalField vT = solve_homogeneous(beta, tg).field_at(tg.n_t);
      for (int p = 1; p <= 10; ++p) {
        const double lambda = std::ldexp(l1, p); // 2^p lambda_1
        const EnergySplit es = energy_split_check(beta, vT, lambda, tg.T);
        CHECK(es.margin >= -1e-12 * es.rhs);
      }
    }
  }
  SUBCASE("lambda at or below lambda_1 is rejected") {
    const ModalField beta = random_field(cs, kg, 10.0, 9);
    const ModalField vT = solve_homogeneous(beta, tg).field_at(tg.n_t);
    CHECK_THROWS_AS((void)energy_split_check(beta, vT, lambda_1(cs), tg.T),
                    precondition_error);
  }
}

TEST_CASE("observability_ratio") {
  SUBCASE("single-mode closed form") {
    const auto lat = lattice_with_energy(2.0);
    const TimeGrid tg{1.0, 1024};
    ModalField v0(lat.cs, lat.kgrid);
    v0.set(lat.j, 1, {1.0, 0.0});
    const double E = 2.0, T = tg.T;
    const double dk = lat.kgrid.dk();
    const double phip = std::abs(normal_derivative_on_gamma(lat.cs, 1));
    const double expected = std::sqrt((1.0 + E) * dk) * std::exp(-E * T) /
                            (phip * std::sqrt(dk * (1.0 - std::exp(-2.0 * E * T)) / (2.0 * E)));
    CHECK(observability_ratio(v0, tg) == doctest::Approx(expected).epsilon(1e-4));
  }
  SUBCASE("scale invariance") {
    const CrossSection cs{kPi, GammaSide::RightEnd, 4};
    const TimeGrid tg{1.0, 256};
    const ModalField v0 = random_field(cs, KGrid{1.0, 8}, 8.0, 3);
    CHECK(observability_ratio(v0.scaled(10.0), tg) ==
          doctest::Approx(observability_ratio(v0, tg)).epsilon(1e-12));
  }
  SUBCASE("ratio grows with the mode energy at small T") {
    // Single ell = 1 modes with E = 1 + k^2 in {1.25, 4, 9}; at T = 0.1 the
    // closed form is increasing across these energies.
    const TimeGrid tg{0.1, 512};
    const CrossSection cs{kPi, GammaSide::RightEnd, 2};
    double prev = 0.0;
    for (double k0 : {0.5, std::sqrt(3.0), std::sqrt(8.0)}) {
      const KGrid kg{2.0 * k0, 2}; // nodes exactly +-k0
      ModalField v0(cs, kg);
      v0.set(1, 1, {1.0, 0.0});
      const double r = observability_ratio(v0, tg);
      CHECK(r > prev);
      prev = r;
    }
  }
  SUBCASE("zero initial state is rejected") {
    const CrossSection cs{kPi, GammaSide::RightEnd, 4};
    const ModalField zero(cs, KGrid{1.0, 8});
    CHECK_THROWS_AS((void)observability_ratio(zero, TimeGrid{1.0, 64}),
                    std::invalid_argument);
  }
}

TEST_CASE("empirical_observability_constant") {
  const CrossSection cs{kPi, GammaSide::RightEnd, 6};
  const KGrid kg{2.0, 16};
  const TimeGrid tg{1.0, 256};

  SUBCASE("a single sample is that sample's ratio") {
    const double c = empirical_observability_constant(cs, kg, tg, 1, 20.0, 7);
    const ModalField v0 = random_field(cs, kg, 20.0, 7);
    CHECK(c == doctest::Approx(observability_ratio(v0, tg)).epsilon(1e-14));
  }
  SUBCASE("nondecreasing in the sample size") {
    const double c10 = empirical_observability_constant(cs, kg, tg, 10, 20.0, 7);
    const double c25 = empirical_observability_constant(cs, kg, tg, 25, 20.0, 7);
    CHECK(c25 >= c10);
  }
  SUBCASE("stable under time-grid refinement") {
    const double c1 = empirical_observability_constant(cs, kg, tg, 15, 20.0, 7);
    const double c2 =
        empirical_observability_constant(cs, kg, TimeGrid{1.0, 512}, 15, 20.0, 7);
    CHECK(std::abs(c1 - c2) / c1 < 0.05);
  }
}

TEST_CASE("reconstruct_from_trace") {
  const TimeGrid tg{1.0, 512};
  const SourceProfile one = SourceProfile::constant_one(tg);

  SUBCASE("clean single in-cutoff mode is recovered exactly") {
    const auto lat = lattice_with_energy(2.0);
    ModalField beta(lat.cs, lat.kgrid);
    beta.set(lat.j, 1, {0.8, -0.3});
    beta.set(lat.kgrid.mirror(lat.j), 1, {0.8, 0.3});
    const NeumannTrace d = neumann_trace(solve_forward(beta, one, tg));

    InversionConfig cfg;
    cfg.l_fit = lat.cs.l_max;
    cfg.cutoff_policy = CutoffPolicy::Fixed;
    cfg.fixed_lambda_cut = 3.0;
    cfg.ridge = 0.0;
    const InversionResult res = reconstruct_from_trace(d, lat.cs, one, cfg);
    CHECK(l2_norm(res.beta_hat - beta) <= 1e-8 * l2_norm(beta));
  }
  SUBCASE("zero trace returns the zero field with the Zero regime flag") {
    const CrossSection cs{kPi, GammaSide::RightEnd, 4};
    const NeumannTrace d{KGrid{1.0, 8}, tg};
    const InversionResult res = reconstruct_from_trace(d, cs, one, InversionConfig{});
    CHECK(res.diagnostics.regime == CutoffRegime::Zero);
    CHECK(res.beta_hat.is_zero());
  }
  SUBCASE("condition number grows with the fitted mode count") {
    const CrossSection cs{kPi, GammaSide::RightEnd, 6};
    const KGrid kg{0.4, 2}; // single +-k pair
    ModalField beta(cs, kg);
    beta.set(1, 1, {1.0, 0.0});
    beta.set(0, 1, {1.0, 0.0});
    const NeumannTrace d = neumann_trace(solve_forward(beta, one, tg));

    double prev = 0.0;
    for (int lf = 1; lf <= 5; ++lf) {
      InversionConfig cfg;
      cfg.l_fit = lf;
      cfg.cutoff_policy = CutoffPolicy::Fixed;
      cfg.fixed_lambda_cut = 1e6;
      cfg.ridge = 0.0;
      const InversionResult res = reconstruct_from_trace(d, cs, one, cfg);
      REQUIRE(!res.diagnostics.fits.empty());
      const double cond = res.diagnostics.fits.front().condition;
      CHECK(res.diagnostics.fits.front().n_modes == lf);
      CHECK(cond >= prev);
      prev = cond;
    }
  }
  SUBCASE("sigma(0) = 0 violates the theorem hypothesis") {
    const CrossSection cs{kPi, GammaSide::RightEnd, 4};
    const NeumannTrace d{KGrid{1.0, 8}, tg};
    std::vector<double> samples(tg.n_nodes(), 1.0);
    samples[0] = 0.0;
    const SourceProfile bad = SourceProfile::from_samples(samples, tg);
    CHECK_THROWS_AS((void)reconstruct_from_trace(d, cs, bad, InversionConfig{}),
                    precondition_error);
  }
}

TEST_CASE("stability_sweep") {
  const CrossSection cs{kPi, GammaSide::RightEnd, 6};
  const KGrid kg{2.5, 16};
  const TimeGrid tg{1.0, 512};
  const SourceProfile one = SourceProfile::constant_one(tg);

  // Six active energies spread over [lambda_1, 30/T], Hermitian pairs.
  auto make_beta = [&](std::uint64_t seed) {
    ModalField f = random_field(cs, kg, 30.0, seed);
    return f.rescaled_to_h1(1.0);
  };

  SUBCASE("degenerate noiseless record") {
    const ModalField beta = make_beta(50);
    InversionConfig cfg;
    cfg.l_fit = cs.l_max;
    const SweepResult res = stability_sweep(beta, {0.0}, one, tg, cfg, 5);
    REQUIRE(res.records.size() == 1);
    CHECK(res.records[0].err <= 1e-8 * l2_norm(beta));
    CHECK(!res.has_c_fit);
  }
  SUBCASE("records satisfy the calibrated bound and the super-Lipschitz trend") {
    const ModalField beta = make_beta(51);
    InversionConfig cfg;
    cfg.l_fit = cs.l_max;
    const std::vector<double> deltas = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
    const SweepResult res = stability_sweep(beta, deltas, one, tg, cfg, 77);
    REQUIRE(res.has_c_fit);
    double prev_ratio = 0.0;
    for (const auto& rec : res.records) {
      CHECK(!rec.saturated);
      CHECK(rec.err <= res.c_fit * phi_modulus(rec.kappa) * (1.0 + 1e-12));
      CHECK(rec.bound >= rec.err * (1.0 - 1e-12));
      CHECK(rec.ratio >= prev_ratio);
      prev_ratio = rec.ratio;
    }
  }
  SUBCASE("budget precondition") {
    const ModalField beta = make_beta(52).scaled(10.0);
    InversionConfig cfg; // m_budget = 1
    CHECK_THROWS_AS(
        (void)stability_sweep(beta, {1e-3}, one, tg, cfg, 1), precondition_error);
  }
  SUBCASE("deltas beyond the small-kappa regime are flagged Saturated") {
    const ModalField beta = make_beta(53);
    InversionConfig cfg;
    cfg.l_fit = cs.l_max;
    const SweepResult res = stability_sweep(beta, {0.5, 1e-3}, one, tg, cfg, 9);
    REQUIRE(res.records.size() == 2);
    CHECK(res.records[0].saturated); // 0.5 > e^{-2}
    CHECK(!res.records[1].saturated);
    CHECK(res.has_c_fit); // calibrated from the non-saturated record alone
  }
}
