#pragma once

#include <array>
#include <optional>
#include <vector>

#include <json.hpp>

#include "maxcgo/cauchy.hpp"
#include "maxcgo/cgo.hpp"

namespace maxcgo {

struct ZetaPair {
  Vec3 xi;
  double tau;
  Vec3 eta1, eta2;
  CVec3 zeta1, zeta2;
};

// Frame: eta1 = xi x e_m / |.| (m the axis least aligned with xi), eta2 = xi x eta1 / |.|.
ZetaPair make_zeta_pair(const Vec3& xi, double tau, double k0sq);
// Explicit orthonormal frame orthogonal to xi; also valid at xi = 0.
ZetaPair make_zeta_pair_with_frame(const Vec3& xi, double tau, double k0sq, const Vec3& eta1, const Vec3& eta2);

enum class PolarizationMode { Alpha, Beta };

// Pair for lattice mode m; xi = 0 uses the frame (e3, e1).
ZetaPair zeta_pair_for_mode(const Grid3& g, const std::array<int, 3>& m, double tau, double k0sq);

// nu = (i eta1 + eta2) / sqrt 2. Alpha: a1 = conj(nu), a2_hat = nu; beta: the same on b.
struct PairPolarization {
  CVec3 a1{}, b1{}, a2_hat{}, b2_hat{};
};
PairPolarization pairing_polarization(const ZetaPair& zp, PolarizationMode mode);

struct RecoveryConfig {
  double tau = 16.0;
  double r_cut = 0.0;  // 0: max(tau^{2/3}, first lattice shell)
  double s1 = -0.5;
  double s2 = 0.45;
  FaddeevConfig faddeev;  // delta, floor and shift; zeta is set per mode
  FixedPointOptions fixed_point;
  double max_failed_fraction = 0.05;
  int threads = 0;

  double theta() const { return s2 / (s2 - s1); }  // 0 = theta s1 + (1 - theta) s2
  double cutoff(const Grid3& g) const;
  void validate() const;
};

// <(Q1 - Q2) Z1, Y2>_Omega with Z1 built on pair 1 at zeta1 and Y2 the adjoint solution of pair 2 at zeta2.
cplx pairing_q_diff(const CgoOperators& o1, const CgoOperators& o2, const ZetaPair& zp, PolarizationMode mode,
                    const RecoveryConfig& cfg);

// Lattice modes m (xi = pi m / L) with |xi| <= r, ordered by shell then index.
std::vector<std::array<int, 3>> lattice_modes(const Grid3& g, double r);
Vec3 mode_xi(const Grid3& g, const std::array<int, 3>& m);

struct FourierSamples {
  std::vector<std::array<int, 3>> modes;
  std::vector<cplx> f_hat, g_hat;
  std::vector<bool> failed;
  double tau = 0.0, r_cut = 0.0;
  std::size_t failures() const;
};

FourierSamples extract_fg_hat(const CgoOperators& o1, const CgoOperators& o2, const RecoveryConfig& cfg);

// f and g from known coefficients (indicator of closed Omega applied).
struct FgFields {
  ScalarField f, g;
};
FgFields exact_fg(const CgoOperators& o1, const CgoOperators& o2);
// Same fields from the closed-form bump derivatives (no spectral differentiation).
FgFields analytic_fg(const Grid3& g, const CoefficientSpec& s1, const CoefficientSpec& s2);
// Direct quadrature of the integral of e^{-i xi.x} f over Omega at the given modes.
FourierSamples oracle_fg_hat(const FgFields& fg, const std::vector<std::array<int, 3>>& modes);

// Truncated Fourier series sum_m c_hat(xi_m) e^{i xi_m x} / (2L)^3, restricted to closed Omega.
ScalarField invert_fourier(const Grid3& g, const std::vector<std::array<int, 3>>& modes, const std::vector<cplx>& values);

struct RecoveryReport {
  ScalarField f, g;
  ScalarField phi1, phi2;  // gamma1^1/2 - gamma2^1/2, mu1^1/2 - mu2^1/2
  ScalarField gamma2, mu2;
  double gamma_h1_error = 0.0, mu_h1_error = 0.0;  // against the supplied truth
  double gamma_h1_relative = 0.0, mu_h1_relative = 0.0;
  double phi_h1_relative = 0.0;
  int picard_iterations = 0;
  bool negative_mu = false;
  double h1_error() const { return gamma_h1_error + mu_h1_error; }
  nlohmann::json to_json() const;
};

// Solves the coupled elliptic system for (phi1, phi2) given f, g and pair 1.
// `truth` supplies the Dirichlet data on the boundary of Omega and the reference for the errors.
RecoveryReport invert_and_solve(const ScalarField& f, const ScalarField& g, const CoefficientPair& c1,
                                const CoefficientPair& truth, double tol = 1e-10, int max_picard = 60);

// H^1(Omega) norm with second-order differences and trapezoid weights.
double h1_omega(const ScalarField& u);

struct InterpolationCheck {
  double l2 = 0.0, hs1 = 0.0, hs2 = 0.0, theta = 0.0;
  double ratio() const;  // l2 / (hs1^theta hs2^(1 - theta))
};
InterpolationCheck interpolation_check(const ScalarField& f, double s1, double s2);

// c in e^{c tau}: slope of log(||Z1||_{boundary} ||Y2||_{boundary}) over tau on pair o.
double fit_growth_constant(const CgoOperators& o, const RecoveryConfig& cfg, const std::vector<double>& taus = {2, 4, 8, 16});

// tau = -log B(delta) / (2c), B = identity, clamped below at 1.
double tau_from_delta(double delta, double c, double tau_min = 1.0, double tau_max = 0.0);

struct CurvePoint {
  std::string label;
  double amplitude = 0.0;
  double delta_c = 0.0;
  double tau = 0.0;
  double h1_error = 0.0;
  double f_l2 = 0.0;
  std::size_t failed_modes = 0;
};

struct StabilityCurve {
  std::vector<CurvePoint> points;
  double growth_c = 0.0;
  double lambda = 0.0, log_C = 0.0;  // error ~ C |log delta|^{-lambda}
  bool monotone = false;               // error nondecreasing in 1 / |log delta|
  std::vector<InterpolationCheck> interpolation;
  nlohmann::json to_json() const;
  std::string to_csv() const;
};

struct CurveOptions {
  RecoveryConfig recovery;
  int probes = 48;
  double tau_max = 0.0;  // 0: no cap
  double c = 0.0;        // 0: fit on the base pair
};

// For each perturbed spec: Cauchy data of base and perturbed pair, delta_C, tau(delta_C),
// extraction and elliptic recovery of the perturbed pair.
StabilityCurve stability_curve(const Grid3& g, const CoefficientSpec& base, const std::vector<CoefficientSpec>& perturbed,
                               const std::vector<double>& amplitudes, const CurveOptions& opts);

}  // namespace maxcgo
