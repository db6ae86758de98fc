#include <doctest.h>

#include <cmath>
#include <complex>

#include "heatguide/errors.hpp"
#include "heatguide/forward.hpp"

using namespace heatguide;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

struct EngineeredLattice {
  CrossSection cs;
  KGrid kgrid;
  int j; // node with the requested energy at ell = 1
};

EngineeredLattice lattice_with_energy(double E, double k_max = 0.4, int n_k = 8, int l_max = 4) {
  const KGrid kg{k_max, n_k};
  const double k = kg.node(n_k / 2);
  const double lam1 = E - k * k;
  REQUIRE(lam1 > 0.0);
  return {CrossSection{kPi / std::sqrt(lam1), GammaSide::RightEnd, l_max}, kg, n_k / 2};
}

} // namespace

TEST_CASE("duhamel coefficient") {
  const TimeGrid tg{1.0, 256};
  const SourceProfile one = SourceProfile::constant_one(tg);

  SUBCASE("constant profile closed form") {
    CHECK(duhamel_coefficient(one, 2.0, 1.0) ==
          doctest::Approx((1.0 - std::exp(-2.0)) / 2.0).epsilon(1e-13));
    CHECK(duhamel_coefficient(one, 5.0, 0.0) == 0.0);
    CHECK(std::abs(duhamel_coefficient(one, 100.0, 1.0) - 0.01) <= 1e-6);
  }
  SUBCASE("argument validation") {
    CHECK_THROWS_AS((void)duhamel_coefficient(one, 0.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS((void)duhamel_coefficient(one, -1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS((void)duhamel_coefficient(one, 1.0, 1.5), std::invalid_argument);
  }
  SUBCASE("exponential profile vs closed form, trapezoid accuracy") {
    const TimeGrid fine{1.0, 2048};
    const double mu = 1.0, E = 3.0;
    const SourceProfile sig = SourceProfile::exp_decay(mu, fine);
    for (double t : {0.25, 0.7, 1.0}) {
      const double exact = (std::exp(-mu * t) - std::exp(-E * t)) / (E - mu);
      CHECK(duhamel_coefficient(sig, E, t) == doctest::Approx(exact).epsilon(1e-5));
    }
  }
}

TEST_CASE("solve_forward") {
  const TimeGrid tg{1.0, 256};
  const SourceProfile one = SourceProfile::constant_one(tg);

  SUBCASE("zero source gives the zero trajectory") {
    const auto lat = lattice_with_energy(2.0);
    const ModalField beta(lat.cs, lat.kgrid);
    const ModalTrajectory u = solve_forward(beta, one, tg);
    CHECK(u.at(lat.j, 1, tg.n_t) == std::complex<double>(0.0, 0.0));
  }
  SUBCASE("unit-energy single mode matches 1 - e^{-t}") {
    const auto lat = lattice_with_energy(1.0);
    ModalField beta(lat.cs, lat.kgrid);
    beta.set(lat.j, 1, {1.0, 0.0});
    const ModalTrajectory u = solve_forward(beta, one, tg);
    CHECK(u.at(lat.j, 1, 0) == std::complex<double>(0.0, 0.0));
    CHECK(u.at(lat.j, 1, tg.n_t).real() ==
          doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-13));
  }
  SUBCASE("modal ODE residual against finite differences") {
    const CrossSection cs{kPi, GammaSide::RightEnd, 4};
    const KGrid kg{1.0, 8};
    const TimeGrid fine{1.0, 512};
    for (const bool use_exp : {false, true}) {
      const SourceProfile sig = use_exp ? SourceProfile::exp_decay(1.0, fine)
                                        : SourceProfile::constant_one(fine);
      const ModalField beta = random_field(cs, kg, 5.0, 17);
      const ModalTrajectory u = solve_forward(beta, sig, fine);
      double worst = 0.0;
      for (int j = 0; j < kg.n_k; ++j) {
        for (int ell = 1; ell <= cs.l_max; ++ell) {
          if (beta.at(j, ell) == std::complex<double>(0.0, 0.0)) continue;
          const double E = beta.energy(j, ell);
          if (E > 5.0) continue;
          for (int i = 1; i < fine.n_t; ++i) {
            const auto du =
                (u.at(j, ell, i + 1) - u.at(j, ell, i - 1)) / (2.0 * fine.dt());
            const auto rhs = sig.value(i) * beta.at(j, ell) - E * u.at(j, ell, i);
            worst = std::max(worst, std::abs(du - rhs));
          }
        }
      }
      CHECK(worst <= 1e-3);
    }
  }
  SUBCASE("grid mismatch is rejected") {
    const auto lat = lattice_with_energy(2.0);
    const ModalField beta(lat.cs, lat.kgrid);
    const TimeGrid other{2.0, 64};
    CHECK_THROWS_AS((void)solve_forward(beta, one, other), std::invalid_argument);
  }
  SUBCASE("Hermitian symmetry propagates to the trajectory and the trace") {
    const CrossSection cs{kPi, GammaSide::RightEnd, 4};
    const KGrid kg{1.0, 8};
    const ModalField beta = random_field(cs, kg, 6.0, 23);
    REQUIRE(beta.is_hermitian());
    const ModalTrajectory u = solve_forward(beta, one, tg);
    for (int i : {0, tg.n_t / 2, tg.n_t}) CHECK(u.field_at(i).is_hermitian());
    const NeumannTrace d = neumann_trace(u);
    for (int j = 0; j < kg.n_k; ++j)
      for (int i = 0; i <= tg.n_t; ++i)
        CHECK(std::abs(d.at(kg.mirror(j), i) - std::conj(d.at(j, i))) <= 1e-14);
  }
}

TEST_CASE("solve_homogeneous") {
  const TimeGrid tg{1.0, 64};

  SUBCASE("single mode decay and initial condition") {
    const auto lat = lattice_with_energy(1.0);
    ModalField v0(lat.cs, lat.kgrid);
    v0.set(lat.j, 1, {1.0, 0.0});
    const ModalTrajectory v = solve_homogeneous(v0, tg);
    CHECK(v.at(lat.j, 1, 0) == std::complex<double>(1.0, 0.0));
    CHECK(v.at(lat.j, 1, tg.n_t).real() == doctest::Approx(std::exp(-1.0)).epsilon(1e-13));
  }
  SUBCASE("semigroup restart identity") {
    const CrossSection cs{kPi, GammaSide::RightEnd, 4};
    const KGrid kg{1.5, 8};
    const ModalField v0 = random_field(cs, kg, 12.0, 3);
    const ModalTrajectory direct = solve_homogeneous(v0, tg);
    const TimeGrid half{0.5, 32};
    const ModalTrajectory first = solve_homogeneous(v0, half);
    const ModalTrajectory second = solve_homogeneous(first.field_at(half.n_t), half);
    for (int j = 0; j < kg.n_k; ++j)
      for (int ell = 1; ell <= cs.l_max; ++ell) {
        const auto a = direct.at(j, ell, tg.n_t);
        const auto b = second.at(j, ell, half.n_t);
        CHECK(std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a)));
      }
  }
  SUBCASE("l2 contraction in time") {
    const CrossSection cs{kPi, GammaSide::RightEnd, 4};
    const ModalField v0 = random_field(cs, KGrid{1.5, 8}, 12.0, 9);
    const ModalTrajectory v = solve_homogeneous(v0, tg);
    double prev = l2_norm(v.field_at(0));
    for (int i = 1; i <= tg.n_t; ++i) {
      const double cur = l2_norm(v.field_at(i));
      CHECK(cur <= prev * (1.0 + 1e-14));
      prev = cur;
    }
  }
}

TEST_CASE("time_derivative is the exact modal identity") {
  const TimeGrid tg{1.0, 64};
  const SourceProfile one = SourceProfile::constant_one(tg);

  SUBCASE("v(0) = beta for sigma == 1") {
    const CrossSection cs{kPi, GammaSide::RightEnd, 4};
    const ModalField beta = random_field(cs, KGrid{1.0, 8}, 8.0, 4);
    const ModalTrajectory u = solve_forward(beta, one, tg);
    const ModalTrajectory v = time_derivative(u, beta, one);
    for (int j = 0; j < 8; ++j)
      for (int ell = 1; ell <= cs.l_max; ++ell)
        CHECK(std::abs(v.at(j, ell, 0) - beta.at(j, ell)) <= 1e-14);
  }
  SUBCASE("single unit-energy mode at t = 1 gives e^{-1} beta") {
    const auto lat = lattice_with_energy(1.0);
    ModalField beta(lat.cs, lat.kgrid);
    beta.set(lat.j, 1, {1.0, 0.0});
    const ModalTrajectory u = solve_forward(beta, one, tg);
    const ModalTrajectory v = time_derivative(u, beta, one);
    CHECK(v.at(lat.j, 1, tg.n_t).real() == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  }
}

TEST_CASE("neumann_trace") {
  const CrossSection cs{kPi, GammaSide::RightEnd, 3};
  const KGrid kg{1.0, 4};
  const TimeGrid tg{1.0, 16};

  SUBCASE("zero trajectory gives the zero trace") {
    const ModalTrajectory u(cs, kg, tg);
    const NeumannTrace d = neumann_trace(u);
    CHECK(trace_h1_norm(d) == 0.0);
  }
  SUBCASE("single constant mode") {
    ModalTrajectory u(cs, kg, tg);
    for (int i = 0; i <= tg.n_t; ++i) u.set(0, 1, i, {1.0, 0.0});
    const NeumannTrace d = neumann_trace(u);
    CHECK(d.at(0, 5).real() == doctest::Approx(-std::sqrt(2.0 / kPi)).epsilon(1e-13));
    CHECK(d.at(1, 5) == std::complex<double>(0.0, 0.0));
  }
  SUBCASE("linearity over modes") {
    ModalTrajectory u1(cs, kg, tg), u2(cs, kg, tg), both(cs, kg, tg);
    for (int i = 0; i <= tg.n_t; ++i) {
      u1.set(2, 1, i, {0.3 * i, 0.1});
      u2.set(2, 2, i, {-0.2, 0.05 * i});
      both.set(2, 1, i, {0.3 * i, 0.1});
      both.set(2, 2, i, {-0.2, 0.05 * i});
    }
    const NeumannTrace d1 = neumann_trace(u1), d2 = neumann_trace(u2), db = neumann_trace(both);
    for (int i = 0; i <= tg.n_t; ++i)
      CHECK(std::abs(db.at(2, i) - (d1.at(2, i) + d2.at(2, i))) <= 1e-15);
  }
}

TEST_CASE("trace_h1_norm") {
  SUBCASE("single-mode closed form") {
    const auto lat = lattice_with_energy(2.0);
    const TimeGrid tg{1.0, 1024};
    const SourceProfile one = SourceProfile::constant_one(tg);
    ModalField beta(lat.cs, lat.kgrid);
    beta.set(lat.j, 1, {1.0, 0.0});
    const NeumannTrace d = neumann_trace(solve_forward(beta, one, tg));

    const double E = 2.0, T = 1.0;
    const double phip = normal_derivative_on_gamma(lat.cs, 1);
    const double int_u2 =
        (T - 2.0 * (1.0 - std::exp(-E * T)) / E + (1.0 - std::exp(-2.0 * E * T)) / (2.0 * E)) /
        (E * E);
    const double int_du2 = (1.0 - std::exp(-2.0 * E * T)) / (2.0 * E);
    // Hermitian pair: the mirrored node carries the conjugate coefficient.
    const double expected =
        std::sqrt(lat.kgrid.dk() * phip * phip * (int_u2 + int_du2));
    CHECK(trace_h1_norm(d) == doctest::Approx(expected).epsilon(1e-4));
  }
  SUBCASE("Richardson order check") {
    const auto lat = lattice_with_energy(3.0);
    ModalField beta(lat.cs, lat.kgrid);
    beta.set(lat.j, 1, {1.0, 0.0});
    beta.set(lat.j, 2, {0.5, 0.0});
    auto kappa_at = [&](int n_t) {
      const TimeGrid tg{1.0, n_t};
      const SourceProfile one = SourceProfile::constant_one(tg);
      return trace_h1_norm(neumann_trace(solve_forward(beta, one, tg)));
    };
    const double k1 = kappa_at(64), k2 = kappa_at(128), k4 = kappa_at(256);
    const double rate = (k1 - k2) / (k2 - k4);
    CHECK(rate > 2.5);
    CHECK(rate < 6.0);
  }
}

TEST_CASE("add_noise") {
  const CrossSection cs{kPi, GammaSide::RightEnd, 4};
  const KGrid kg{1.0, 8};
  const TimeGrid tg{1.0, 128};
  const SourceProfile one = SourceProfile::constant_one(tg);
  const ModalField beta = random_field(cs, kg, 8.0, 12);
  const NeumannTrace clean = neumann_trace(solve_forward(beta, one, tg));

  SUBCASE("zero level leaves the data unchanged") {
    const NeumannTrace d = add_noise(clean, 0.0, 5);
    for (int j = 0; j < kg.n_k; ++j)
      for (int i = 0; i <= tg.n_t; ++i) CHECK(d.at(j, i) == clean.at(j, i));
    CHECK(d.provenance().noisy);
  }
  SUBCASE("perturbation norm is exact") {
    const double delta = 1e-3;
    const NeumannTrace d = add_noise(clean, delta, 5);
    CHECK(std::abs(trace_h1_norm(d - clean) - delta) <= 1e-12 * delta);
  }
  SUBCASE("different seeds, same norm") {
    const NeumannTrace d1 = add_noise(clean, 1e-3, 5);
    const NeumannTrace d2 = add_noise(clean, 1e-3, 6);
    bool differ = false;
    for (int j = 0; j < kg.n_k && !differ; ++j)
      for (int i = 0; i <= tg.n_t && !differ; ++i) differ = d1.at(j, i) != d2.at(j, i);
    CHECK(differ);
    CHECK(trace_h1_norm(d1 - clean) == doctest::Approx(trace_h1_norm(d2 - clean)).epsilon(1e-12));
  }
  SUBCASE("Hermitian symmetry of the perturbation") {
    const NeumannTrace d = add_noise(clean, 1e-2, 8);
    const NeumannTrace e = d - clean;
    for (int j = 0; j < kg.n_k; ++j) {
      const int jm = kg.mirror(j);
      for (int i = 0; i <= tg.n_t; ++i)
        CHECK(std::abs(e.at(jm, i) - std::conj(e.at(j, i))) <= 1e-15);
    }
  }
  SUBCASE("negative level is rejected") {
    CHECK_THROWS_AS((void)add_noise(clean, -1.0, 5), std::invalid_argument);
  }
}

TEST_CASE("energy estimates") {
  const TimeGrid tg{1.0, 128};

  SUBCASE("zero data has zero margins") {
    const CrossSection cs{kPi, GammaSide::RightEnd, 3};
    const KGrid kg{1.0, 4};
    const ModalField zero(cs, kg);
    const EnergyEstimateReport rep =
        check_energy_estimates(zero, zero, SourceProfile::constant_one(tg), tg);
    CHECK(rep.es1_margin == 0.0);
    CHECK(rep.es2_margin == 0.0);
  }
  SUBCASE("single unit-energy mode closed form") {
    const auto lat = lattice_with_energy(1.0);
    ModalField beta(lat.cs, lat.kgrid);
    beta.set(lat.j, 1, {1.0, 0.0});
    const ModalField zero(lat.cs, lat.kgrid);
    const EnergyEstimateReport rep =
        check_energy_estimates(zero, beta, SourceProfile::constant_one(tg), tg);
    // dt u = e^{-t} beta, so the es2 gap is (1+sqrt(T)) - 1 = 1 in units of h1(beta).
    CHECK(rep.es2_rhs == doctest::Approx(2.0 * h1_norm(beta)).epsilon(1e-12));
    CHECK(rep.es2_lhs_max == doctest::Approx(h1_norm(beta)).epsilon(1e-10));
    CHECK(rep.es2_margin == doctest::Approx(h1_norm(beta)).epsilon(1e-9));
    CHECK(rep.es1_margin >= 0.0);
  }
  SUBCASE("randomized sweep keeps both margins nonnegative") {
    const CrossSection cs{kPi, GammaSide::RightEnd, 6};
    const KGrid kg{2.0, 16};
    for (std::uint64_t s = 0; s < 20; ++s) {
      const ModalField v0 = random_field(cs, kg, 20.0, 100 + 2 * s);
      const ModalField beta = random_field(cs, kg, 20.0, 101 + 2 * s);
      const SourceProfile sig = (s % 2 == 0) ? SourceProfile::constant_one(tg)
                                             : SourceProfile::exp_decay(1.0, tg);
      const EnergyEstimateReport rep = check_energy_estimates(v0, beta, sig, tg);
      CHECK(rep.es1_margin >= 0.0);
      CHECK(rep.es2_margin >= 0.0);
    }
  }
}
