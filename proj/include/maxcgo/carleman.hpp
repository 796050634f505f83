#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "maxcgo/coefficients.hpp"

namespace maxcgo {

// Weight phi(x) = |x - x0|^2 / 2 with x0 outside closed Omega.
struct CarlemanConfig {
  Vec3 x0{0.0, 0.0, 0.0};
  bool x0_set = false;  // false: (3a, 0, 0)
  std::vector<double> h_values{0.05, 0.1, 0.2, 0.3};

  Vec3 center(const Grid3& g) const;
  // inf and sup of |x - x0|^2 over closed Omega.
  double d1(const Grid3& g) const;
  double d2(const Grid3& g) const;
  void validate(const Grid3& g) const;
};

// Weighted norms are stored as e^{-log_scale} times their true value,
// log_scale = 2 max(phi) / h, so lhs / rhs is unaffected.
struct CarlemanTerms {
  double h = 0.0;
  double lhs = 0.0, rhs = 0.0, ratio = 0.0;
  double log_scale = 0.0;
  double interior_l2 = 0.0, interior_grad = 0.0, laplacian = 0.0;
  double boundary_l2 = 0.0, boundary_grad = 0.0;
};

// lhs = h |w u|^2 + h^3 |w grad u|^2 on Omega,
// rhs = h^4 |w lap u|^2 + h |w u|^2_{bdry} + h^3 |w grad u|^2_{bdry}, w = e^{phi/h}.
// The ratio is 0 when rhs vanishes.
CarlemanTerms carleman_ratio(const ScalarField& u, const CarlemanConfig& cfg, double h);
std::vector<CarlemanTerms> carleman_sweep(const ScalarField& u, const CarlemanConfig& cfg, int threads = 0);
std::string carleman_csv(const std::vector<CarlemanTerms>& rows);

// Smooth field supported in a compact subset of Omega: one to three bumps with
// random centers, radii and complex amplitudes, times a random plane wave.
ScalarField random_test_function(const Grid3& g, std::uint64_t seed);

struct AbsorbRow {
  double h = 0.0;
  // Weighted form before absorption (shifted exponent, common factor dropped).
  double weighted_lhs = 0.0, weighted_rhs = 0.0;
  // Unweighted consequence, in logs: d1/h + log(left) and d2/h + log(bracket).
  double log_left = 0.0, log_right = 0.0;
  bool holds = false;  // log_left <= log C'' + log_right
};

struct AbsorbReport {
  std::vector<AbsorbRow> rows;
  double c_fit = 0.0;        // max weighted_lhs / weighted_rhs over h
  double h_threshold = 0.0;  // c_fit^{-1/3}
  bool holds_below_threshold = false;
  // ||phi_j||_{L2(bdry)} against the trace bound from sup |c1 - c2| on the boundary.
  double gamma_trace = 0.0, gamma_trace_bound = 0.0;
  double mu_trace = 0.0, mu_trace_bound = 0.0;
  double margin() const { return std::min(gamma_trace_bound - gamma_trace, mu_trace_bound - mu_trace); }
  nlohmann::json to_json() const;
};

AbsorbReport absorb_check(const ScalarField& phi1, const ScalarField& phi2, const ScalarField& f, const ScalarField& g,
                          const CoefficientPair& c1, const CoefficientPair& c2, const CarlemanConfig& cfg);

}  // namespace maxcgo
