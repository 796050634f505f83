#pragma once

#include <json.hpp>

#include "maxcgo/block_operators.hpp"
#include "maxcgo/coefficients.hpp"
#include "maxcgo/faddeev.hpp"
#include "maxcgo/modulated.hpp"

namespace maxcgo {

struct FixedPointOptions {
  double tol = 1e-10;
  int max_iter = 200;
  double damping = 1.0;
};

struct RemainderReport {
  int iterations = 0;
  double contraction = 0.0;
  double final_update = 0.0;
  std::size_t floored = 0;
};

struct RemainderSolution {
  StateY R;
  RemainderReport report;
};

// Solves R = -F_zeta (k0sq I + Q)(L + R) by damped fixed-point iteration.
RemainderSolution solve_remainder(const BlockMatrixField& Q, const FaddeevOperator& G, const Vec8& L, double k0sq,
                                  const FixedPointOptions& opts = {});

// Everything the CGO builders need from one coefficient pair.
struct CgoOperators {
  CoefficientPair coeffs;
  DerivedScalars derived;
  BlockMatrixField W, Wt, Wbar, Wstar, Q, Qhat;
  RescaleMaps rescale;
  explicit CgoOperators(const CoefficientPair& c);
};

enum class CgoKind { Schrodinger, Adjoint };

struct CgoDiagnostics {
  double remainder_weighted_norm = 0.0;  // ||R||_{L^2_delta Y}
  double correction_norm = 0.0;          // adjoint: ||S||_{L^2(Omega; Y)}
  double residual_norm = 0.0;            // ||(-Delta + Q) Z|| / ||Z|| on Omega
  double maxwell_residual = 0.0;
  double eh_sup_norm = 0.0;              // sup(|e| + |h|) / sup(|E| + |H|) on Omega
  RemainderReport fixed_point;
  nlohmann::json to_json() const;
};

struct CgoSolution {
  CgoKind kind;
  CVec3 zeta;
  CVec3 a, b;        // (a, b) or (a_hat, b_hat)
  Vec8 principal;    // L or L_hat
  Vec8 leading;      // schrodinger: L; adjoint: M = i P_zeta L_hat
  ModulatedState Z;  // e^{i zeta.x}(L + R)
  ModulatedState Y;  // (P - W^t) Z or (P - conj W) Z_hat
  CgoDiagnostics diag;
};

Vec8 principal_L(const CVec3& zeta, const CVec3& a, const CVec3& b, double kappa0);
Vec8 principal_L_hat(const CVec3& zeta, const CVec3& a_hat, const CVec3& b_hat);
Vec8 principal_M(const CVec3& zeta, const CVec3& a_hat, const CVec3& b_hat);

struct CgoOptions {
  FixedPointOptions fixed_point;
  bool diagnostics = true;  // residual norms cost a few extra transforms
};

CgoSolution build_maxwell_cgo(const CgoOperators& ops, const FaddeevConfig& cfg, const CVec3& a, const CVec3& b,
                              const CgoOptions& opts = {});
CgoSolution build_adjoint_cgo(const CgoOperators& ops, const FaddeevConfig& cfg, const CVec3& a_hat,
                              const CVec3& b_hat, const CgoOptions& opts = {});

// Physical fields of a Schrodinger-kind solution: X = diag(mu^-1/2 I4, gamma^-1/2 I4) Y.
ModulatedState physical_fields(const CgoOperators& ops, const CgoSolution& s);

// e^{i zeta.x}-free part S = Y_hat e^{-i zeta.x} - M of an adjoint solution.
StateY adjoint_correction(const CgoSolution& s);

}  // namespace maxcgo
