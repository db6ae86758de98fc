#ifndef HEATGUIDE_CROSS_SECTION_HPP
#define HEATGUIDE_CROSS_SECTION_HPP

namespace heatguide {

/// Which endpoint of the interval (0,a) carries the flux observation.
enum class GammaSide { LeftEnd, RightEnd };

/// Transverse cross-section omega = (0,a) with its Dirichlet eigenbasis
/// metadata. Eigenpairs are closed-form; no discretized eigensolver is
/// involved anywhere (verification grids live in the tests only).
struct CrossSection {
  double a = 3.141592653589793;
  GammaSide gamma_side = GammaSide::RightEnd;
  int l_max = 16;

  /// Throws std::invalid_argument unless a > 0 and l_max >= 1.
  void validate() const;

  /// Coordinate of the observed endpoint gamma'.
  double gamma_point() const { return gamma_side == GammaSide::RightEnd ? a : 0.0; }

  bool operator==(const CrossSection&) const = default;
};

/// lambda_ell = (ell*pi/a)^2, strictly increasing in ell.
double eigenvalue(const CrossSection& cs, int ell);

/// First eigenvalue (pi/a)^2; the threshold in the kappa-regime logic.
double lambda_1(const CrossSection& cs);

/// phi_ell(x') = sqrt(2/a) sin(ell*pi*x'/a). Returns exactly 0 at the
/// endpoints: the Dirichlet zero must be exact, not ~1e-16, because the
/// Carleman weights amplify boundary roundoff by (lambda*g)^3.
double eigenfunction(const CrossSection& cs, int ell, double x_prime);

/// Outward normal derivative of phi_ell at gamma'. RightEnd: phi'(a) =
/// sqrt(2/a)(ell*pi/a)(-1)^ell; LeftEnd: -phi'(0) = -sqrt(2/a)(ell*pi/a).
/// Never zero.
double normal_derivative_on_gamma(const CrossSection& cs, int ell);

} // namespace heatguide

#endif
