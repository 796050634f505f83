#pragma once

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

#include "maxcgo/grid.hpp"

namespace maxcgo {

struct Bump {
  Vec3 center{0.0, 0.0, 0.0};
  double radius = 0.25;
  cplx amplitude = 0.0;
};

struct CoefficientSpec {
  double omega = 1.0;
  double eps0 = 1.0;
  double mu0 = 1.0;
  double M = 10.0;
  double s = 0.45;
  std::vector<Bump> gamma_bumps;
  std::vector<Bump> mu_bumps;
};

CoefficientSpec spec_from_json(const nlohmann::json& j);
nlohmann::json spec_to_json(const CoefficientSpec& spec);
CoefficientSpec load_spec(const std::string& path);

// exp(-1/(1-t)) for t = |x-c|^2/r^2 < 1, else 0.
double bump_profile(double t);
cplx eval_bumps(const std::vector<Bump>& bumps, const Vec3& x);

// Value, gradient and Laplacian of the bump sum in closed form.
struct BumpJet {
  cplx value = 0.0;
  CVec3 grad{};
  cplx lap = 0.0;
};
BumpJet eval_bumps_jet(const std::vector<Bump>& bumps, const Vec3& x);

struct CoefficientPair {
  ScalarField gamma;
  ScalarField mu;
  double omega = 1.0;
  double eps0 = 1.0;
  double mu0 = 1.0;
  double M = 10.0;
  double s = 0.45;

  const Grid3& grid() const { return gamma.grid(); }
  // omega^2 eps0 mu0
  double k0sq() const { return omega * omega * eps0 * mu0; }
  double kappa0() const;
};

CoefficientPair synth_coefficients(const Grid3& g, const CoefficientSpec& spec);

struct DerivedScalars {
  ScalarField alpha, beta, kappa, q1, q2;
  VectorField3 grad_alpha, grad_beta, grad_kappa;
  ScalarField lap_alpha, lap_beta;
  std::array<ScalarField, 6> hess_alpha, hess_beta;
  double omega;
  double kappa0;
};

// Spectral derivatives; derivative fields are exactly zero outside B(O, rho).
DerivedScalars derive_scalars(const CoefficientPair& c);

struct AdmissibilityReport {
  bool ellipticity = false;
  bool boundary_bound = false;
  bool interior_w2inf = false;
  bool interior_hs = false;
  double min_re_gamma = 0.0;
  double min_mu = 0.0;
  double min_im_gamma = 0.0;
  double boundary_c01 = 0.0;
  double w2inf = 0.0;
  double hs = 0.0;
  bool all() const { return ellipticity && boundary_bound && interior_w2inf && interior_hs; }
  nlohmann::json to_json() const;
};

AdmissibilityReport check_admissible(const CoefficientPair& c);

// Pieces of the admissibility report, exposed for diagnostics.
double c01_boundary_norm(const ScalarField& f);
double w2inf_omega_norm(const ScalarField& f);
double hs_proxy_norm(const ScalarField& f, double order);

}  // namespace maxcgo
