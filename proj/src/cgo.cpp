#include "maxcgo/cgo.hpp"

#include <algorithm>
#include <cmath>

namespace maxcgo {

namespace {

const cplx I(0.0, 1.0);

double l2_all(const StateY& y) {
  double s = 0;
  for (const cplx& v : y.raw()) s += std::norm(v);
  return std::sqrt(s);
}

BlockMatrixField shifted_potential(const BlockMatrixField& Q, double k0sq) {
  BlockMatrixField v = Q;
  ScalarField k(Q.grid());
  for (auto& x : k.raw()) x = k0sq;
  for (int c = 0; c < 8; ++c) v.add(c, c, k);
  return v;
}

StateY constant_state(const Grid3& g, const Vec8& c) {
  StateY y(g);
  for (int k = 0; k < 8; ++k)
    for (auto& v : y.comp(k)) v = c[k];
  return y;
}

CVec3 cross(const CVec3& a, const CVec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double sup_omega(const Grid3& g, auto fn) {
  double s = 0;
  for (int k = g.omega_lo(); k <= g.omega_hi(); ++k)
    for (int j = g.omega_lo(); j <= g.omega_hi(); ++j)
      for (int i = g.omega_lo(); i <= g.omega_hi(); ++i) s = std::max(s, fn(g.index(i, j, k)));
  return s;
}

double vec_l2_omega(const VectorField3& v) {
  double s = 0;
  for (int c = 0; c < 3; ++c) s += integrate_omega(v.comp(c), v.comp(c), v.grid()).real();
  return std::sqrt(s);
}

// (-Delta - 2i zeta.grad + zeta.zeta + Q) in the conjugated frame.
ModulatedState schrodinger_residual(const BlockMatrixField& Q, const ModulatedState& z, const SpectralOps& ops) {
  ModulatedState r = multiply(Q, z);
  const cplx zz = bilinear(z.zeta, z.zeta);
  for (int k = 0; k < 8; ++k) r.constant[k] += zz * z.constant[k];
  const CVec3 zeta = z.zeta;
  for (int k = 0; k < 8; ++k) {
    std::vector<cplx> f(z.fluct.comp(k).begin(), z.fluct.comp(k).end());
    ops.apply_symbol(f, [&](double sx, double sy, double sz) {
      return sx * sx + sy * sy + sz * sz + 2.0 * (zeta[0] * sx + zeta[1] * sy + zeta[2] * sz) + zz;
    });
    auto o = r.fluct.comp(k);
    for (std::size_t i = 0; i < f.size(); ++i) o[i] += f[i];
  }
  return r;
}

double relative_omega(const StateY& num, const StateY& den) {
  double a = 0, b = 0;
  for (int c = 0; c < 8; ++c) {
    a += integrate_omega(num.comp(c), num.comp(c), num.grid()).real();
    b += integrate_omega(den.comp(c), den.comp(c), den.grid()).real();
  }
  return b > 0 ? std::sqrt(a / b) : 0.0;
}

ModulatedState diag_blocks(const ModulatedState& y, const ScalarField& top, const ScalarField& bottom) {
  BlockMatrixField m(y.grid());
  for (int c = 0; c < 8; ++c) m.add(c, c, c < 4 ? top : bottom);
  return multiply(m, y);
}

}  // namespace

RemainderSolution solve_remainder(const BlockMatrixField& Q, const FaddeevOperator& G, const Vec8& L, double k0sq,
                                  const FixedPointOptions& opts) {
  const Grid3& g = Q.grid();
  BlockMatrixField V = shifted_potential(Q, k0sq);
  StateY VL = V.apply(constant_state(g, L));
  RemainderSolution sol{StateY(g), {}};
  sol.report.floored = G.floored_modes();
  if (l2_all(VL) == 0.0) {
    sol.report.iterations = 1;
    return sol;
  }
  double prev_update = 0;
  for (int it = 1; it <= opts.max_iter; ++it) {
    StateY rhs = VL;
    rhs += V.apply(sol.R);
    StateY next = G.apply(rhs);
    next *= -1.0;
    StateY delta = next - sol.R;
    delta *= opts.damping;
    double upd = l2_all(delta);
    sol.R += delta;
    double rn = l2_all(sol.R);
    sol.report.iterations = it;
    sol.report.final_update = rn > 0 ? upd / rn : 0.0;
    if (it >= 2 && prev_update > 0) sol.report.contraction = upd / prev_update;
    if (!std::isfinite(upd)) throw NumericError(NumericFailure::NoConvergence, "remainder iteration produced non-finite values");
    if (sol.report.final_update < opts.tol) return sol;
    if (it >= 3 && sol.report.contraction >= 1.0)
      throw NumericError(NumericFailure::NonContractive,
                         "fixed-point contraction factor " + std::to_string(sol.report.contraction) + " >= 1; |zeta| too small");
    prev_update = upd;
  }
  throw NumericError(NumericFailure::NoConvergence,
                     "remainder iteration hit " + std::to_string(opts.max_iter) + " iterations, last relative update " +
                         std::to_string(sol.report.final_update));
}

CgoOperators::CgoOperators(const CoefficientPair& c)
    : coeffs(c),
      derived(derive_scalars(c)),
      W(assemble_W(derived)),
      Wt(W.transpose()),
      Wbar(W.conjugate()),
      Wstar(W.adjoint()),
      Q(assemble_Q(derived)),
      Qhat(assemble_Q_hat(derived)),
      rescale(c) {}

nlohmann::json CgoDiagnostics::to_json() const {
  return {{"remainder_weighted_norm", remainder_weighted_norm},
          {"correction_norm", correction_norm},
          {"residual_norm", residual_norm},
          {"maxwell_residual", maxwell_residual},
          {"eh_sup_norm", eh_sup_norm},
          {"fixed_point_iterations", fixed_point.iterations},
          {"contraction", fixed_point.contraction},
          {"final_update", fixed_point.final_update},
          {"floored_modes", fixed_point.floored}};
}

Vec8 principal_L(const CVec3& zeta, const CVec3& a, const CVec3& b, double kappa0) {
  double za = zeta_abs(zeta);
  Vec8 L{};
  L[kF1] = bilinear(zeta, a) / za;
  L[kF2] = bilinear(zeta, b) / za;
  for (int j = 0; j < 3; ++j) {
    L[kU1 + j] = kappa0 * b[j] / za;
    L[kU2 + j] = kappa0 * a[j] / za;
  }
  return L;
}

Vec8 principal_L_hat(const CVec3& zeta, const CVec3& a_hat, const CVec3& b_hat) {
  double za = zeta_abs(zeta);
  Vec8 L{};
  for (int j = 0; j < 3; ++j) {
    L[kU1 + j] = b_hat[j] / za;
    L[kU2 + j] = a_hat[j] / za;
  }
  return L;
}

Vec8 principal_M(const CVec3& zeta, const CVec3& a_hat, const CVec3& b_hat) {
  double za = zeta_abs(zeta);
  CVec3 za_x = cross(zeta, a_hat), zb_x = cross(zeta, b_hat);
  Vec8 M{};
  M[kF1] = bilinear(zeta, a_hat) / za;
  M[kF2] = bilinear(zeta, b_hat) / za;
  for (int j = 0; j < 3; ++j) {
    M[kU1 + j] = -za_x[j] / za;
    M[kU2 + j] = zb_x[j] / za;
  }
  return M;
}

CgoSolution build_maxwell_cgo(const CgoOperators& ops, const FaddeevConfig& cfg, const CVec3& a, const CVec3& b,
                              const CgoOptions& opts) {
  const CoefficientPair& c = ops.coeffs;
  FaddeevOperator G(c.grid(), cfg, c.k0sq());
  Vec8 L = principal_L(cfg.zeta, a, b, c.kappa0());
  RemainderSolution rem = solve_remainder(ops.Q, G, L, c.k0sq(), opts.fixed_point);
  ModulatedState Z(cfg.zeta, L, std::move(rem.R));
  ModulatedState Y = apply_P(Z, G.ops());
  Y -= multiply(ops.Wt, Z);
  CgoSolution s{CgoKind::Schrodinger, cfg.zeta, a, b, L, L, std::move(Z), std::move(Y), {}};
  s.diag.fixed_point = rem.report;
  s.diag.remainder_weighted_norm = weighted_norm(s.Z.fluct, cfg.delta);
  if (!opts.diagnostics) return s;

  const Grid3& g = c.grid();
  s.diag.residual_norm = relative_omega(schrodinger_residual(ops.Q, s.Z, G.ops()).values(), s.Z.values());

  ModulatedState X = physical_fields(ops, s);
  ModulatedVector H = slot_u1(X), E = slot_u2(X);
  ModulatedVector r1 = curl(H, G.ops());
  ModulatedVector gE = multiply(c.gamma, E);
  ModulatedVector r2 = curl(E, G.ops());
  ModulatedVector mH = multiply(c.mu, H);
  for (int k = 0; k < 3; ++k) {
    r1.constant[k] += I * c.omega * gE.constant[k];
    r2.constant[k] -= I * c.omega * mH.constant[k];
  }
  r1.fluct += (I * c.omega) * gE.fluct;
  r2.fluct -= (I * c.omega) * mH.fluct;
  double num = vec_l2_omega(r1.values()) + vec_l2_omega(r2.values());
  double den = c.omega * (vec_l2_omega(gE.values()) + vec_l2_omega(mH.values()));
  s.diag.maxwell_residual = den > 0 ? num / den : 0.0;

  StateY xv = X.values();
  double scal = sup_omega(g, [&](std::size_t i) { return std::abs(xv(kF1, i)) + std::abs(xv(kF2, i)); });
  double vec = sup_omega(g, [&](std::size_t i) {
    double e = 0, h = 0;
    for (int k = 0; k < 3; ++k) {
      h += std::norm(xv(kU1 + k, i));
      e += std::norm(xv(kU2 + k, i));
    }
    return std::sqrt(e) + std::sqrt(h);
  });
  s.diag.eh_sup_norm = vec > 0 ? scal / vec : 0.0;
  return s;
}

CgoSolution build_adjoint_cgo(const CgoOperators& ops, const FaddeevConfig& cfg, const CVec3& a_hat,
                              const CVec3& b_hat, const CgoOptions& opts) {
  const CoefficientPair& c = ops.coeffs;
  FaddeevOperator G(c.grid(), cfg, c.k0sq());
  Vec8 L = principal_L_hat(cfg.zeta, a_hat, b_hat);
  RemainderSolution rem = solve_remainder(ops.Qhat, G, L, c.k0sq(), opts.fixed_point);
  ModulatedState Z(cfg.zeta, L, std::move(rem.R));
  ModulatedState Y = apply_P(Z, G.ops());
  Y -= multiply(ops.Wbar, Z);
  CgoSolution s{CgoKind::Adjoint, cfg.zeta, a_hat, b_hat, L, principal_M(cfg.zeta, a_hat, b_hat),
                std::move(Z), std::move(Y), {}};
  s.diag.fixed_point = rem.report;
  s.diag.remainder_weighted_norm = weighted_norm(s.Z.fluct, cfg.delta);
  s.diag.correction_norm = group_norm_omega(adjoint_correction(s));
  if (!opts.diagnostics) return s;

  s.diag.residual_norm = relative_omega(schrodinger_residual(ops.Qhat, s.Z, G.ops()).values(), s.Z.values());
  ModulatedState r = apply_P(s.Y, G.ops());
  ModulatedState py = r;
  r += multiply(ops.Wstar, s.Y);
  s.diag.maxwell_residual = relative_omega(r.values(), py.values());
  return s;
}

ModulatedState physical_fields(const CgoOperators& ops, const CgoSolution& s) {
  return diag_blocks(s.Y, ops.rescale.mu_inv_sqrt, ops.rescale.gamma_inv_sqrt);
}

StateY adjoint_correction(const CgoSolution& s) {
  Vec8 c;
  for (int k = 0; k < 8; ++k) c[k] = s.Y.constant[k] - s.leading[k];
  ModulatedState S(s.zeta, c, s.Y.fluct);
  return S.envelope();
}

}  // namespace maxcgo
