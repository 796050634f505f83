#include "maxcgo/recovery.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "maxcgo/boundary.hpp"
#include "maxcgo/fft.hpp"
#include "maxcgo/parallel.hpp"

namespace maxcgo {

namespace {

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
Vec3 scaled(const Vec3& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }

// Local indexing of the (m+1)^3 nodes of closed Omega.
struct OmegaBox {
  const Grid3& g;
  int m, lo;
  explicit OmegaBox(const Grid3& grid) : g(grid), m(grid.omega_cells()), lo(grid.omega_lo()) {}
  int side() const { return m + 1; }
  std::size_t count() const { return std::size_t(side()) * side() * side(); }
  std::size_t local(int i, int j, int k) const { return i + std::size_t(side()) * (j + std::size_t(side()) * k); }
  std::size_t global(int i, int j, int k) const { return g.index(lo + i, lo + j, lo + k); }
  bool interior(int i, int j, int k) const { return i > 0 && j > 0 && k > 0 && i < m && j < m && k < m; }
};

// Second-order derivative along one axis on the Omega box (one-sided at the ends).
cplx box_diff(const std::vector<cplx>& u, const OmegaBox& b, int i, int j, int k, int axis) {
  int idx[3] = {i, j, k};
  auto at = [&](int t) {
    int p[3] = {idx[0], idx[1], idx[2]};
    p[axis] = t;
    return u[b.local(p[0], p[1], p[2])];
  };
  const int t = idx[axis];
  const double h = b.g.h();
  if (t == 0) return (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2 * h);
  if (t == b.m) return (3.0 * at(b.m) - 4.0 * at(b.m - 1) + at(b.m - 2)) / (2 * h);
  return (at(t + 1) - at(t - 1)) / (2 * h);
}

double box_h1(const std::vector<cplx>& u, const OmegaBox& b) {
  const double h3 = std::pow(b.g.h(), 3);
  auto w = [&](int t) { return (t == 0 || t == b.m) ? 0.5 : 1.0; };
  double s = 0;
  for (int k = 0; k <= b.m; ++k)
    for (int j = 0; j <= b.m; ++j)
      for (int i = 0; i <= b.m; ++i) {
        double v = std::norm(u[b.local(i, j, k)]);
        for (int ax = 0; ax < 3; ++ax) v += std::norm(box_diff(u, b, i, j, k, ax));
        s += w(i) * w(j) * w(k) * h3 * v;
      }
  return std::sqrt(s);
}

std::vector<cplx> restrict_box(const ScalarField& f, const OmegaBox& b) {
  std::vector<cplx> out(b.count());
  for (int k = 0; k <= b.m; ++k)
    for (int j = 0; j <= b.m; ++j)
      for (int i = 0; i <= b.m; ++i) out[b.local(i, j, k)] = f(0, b.global(i, j, k));
  return out;
}

ScalarField extend_box(const std::vector<cplx>& u, const OmegaBox& b) {
  ScalarField f(b.g);
  for (int k = 0; k <= b.m; ++k)
    for (int j = 0; j <= b.m; ++j)
      for (int i = 0; i <= b.m; ++i) f(0, b.global(i, j, k)) = u[b.local(i, j, k)];
  return f;
}

std::vector<cplx> box_sqrt(const std::vector<cplx>& u) {
  std::vector<cplx> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = std::sqrt(u[i]);
  return out;
}

cplx box_laplacian(const std::vector<cplx>& u, const OmegaBox& b, int i, int j, int k) {
  const double ih2 = 1.0 / (b.g.h() * b.g.h());
  return ih2 * (u[b.local(i + 1, j, k)] + u[b.local(i - 1, j, k)] + u[b.local(i, j + 1, k)] + u[b.local(i, j - 1, k)] +
                u[b.local(i, j, k + 1)] + u[b.local(i, j, k - 1)] - 6.0 * u[b.local(i, j, k)]);
}

double boundary_state_norm(const ModulatedState& s) {
  const Grid3& g = s.grid();
  StateY v = s.values();
  BoundaryField w(g, 8);
  for (int face = 0; face < 6; ++face)
    for (int q = 0; q < w.side_nodes(); ++q)
      for (int p = 0; p < w.side_nodes(); ++p) {
        auto n = w.node(face, p, q);
        std::size_t idx = g.index(n[0], n[1], n[2]);
        for (int c = 0; c < 8; ++c) w.at(face, c, p, q) = v(c, idx);
      }
  return boundary_l2(w);
}

CVec3 nu_vector(const ZetaPair& zp) {
  const double r = 1.0 / std::sqrt(2.0);
  CVec3 nu;
  for (int i = 0; i < 3; ++i) nu[i] = cplx(zp.eta2[i] * r, zp.eta1[i] * r);
  return nu;
}

CVec3 conj3(const CVec3& v) { return {std::conj(v[0]), std::conj(v[1]), std::conj(v[2])}; }

}  // namespace

ZetaPair zeta_pair_for_mode(const Grid3& g, const std::array<int, 3>& m, double tau, double k0sq) {
  Vec3 xi = mode_xi(g, m);
  if (m[0] == 0 && m[1] == 0 && m[2] == 0) return make_zeta_pair_with_frame(xi, tau, k0sq, {0, 0, 1}, {1, 0, 0});
  return make_zeta_pair(xi, tau, k0sq);
}

PairPolarization pairing_polarization(const ZetaPair& zp, PolarizationMode mode) {
  const CVec3 nu = nu_vector(zp);
  const CVec3 zero{};
  const bool alpha = mode == PolarizationMode::Alpha;
  PairPolarization p;
  p.a1 = alpha ? conj3(nu) : zero;
  p.b1 = alpha ? zero : conj3(nu);
  p.a2_hat = alpha ? nu : zero;
  p.b2_hat = alpha ? zero : nu;
  return p;
}

ZetaPair make_zeta_pair_with_frame(const Vec3& xi, double tau, double k0sq, const Vec3& eta1, const Vec3& eta2) {
  if (!(tau >= 1.0)) throw ConfigError("tau must be at least 1");
  const double xn = norm(xi);
  const double scale = std::max(1.0, xn);
  if (std::abs(norm(eta1) - 1) > 1e-12 || std::abs(norm(eta2) - 1) > 1e-12 || std::abs(dot(eta1, eta2)) > 1e-12 ||
      std::abs(dot(eta1, xi)) > 1e-12 * scale || std::abs(dot(eta2, xi)) > 1e-12 * scale)
    throw ConfigError("eta1, eta2 must be orthonormal and orthogonal to xi");
  ZetaPair zp{xi, tau, eta1, eta2, {}, {}};
  const double s = std::sqrt(tau * tau + 0.25 * xn * xn);
  const double t = std::sqrt(tau * tau + k0sq);
  for (int i = 0; i < 3; ++i) {
    zp.zeta1[i] = cplx(-0.5 * xi[i] + t * eta2[i], s * eta1[i]);
    zp.zeta2[i] = cplx(0.5 * xi[i] + t * eta2[i], -s * eta1[i]);
  }
  return zp;
}

ZetaPair make_zeta_pair(const Vec3& xi, double tau, double k0sq) {
  const double xn = norm(xi);
  if (xn == 0.0) throw ConfigError("xi = 0 needs an explicit frame");
  int axis = 0;
  for (int d = 1; d < 3; ++d)
    if (std::abs(xi[d]) < std::abs(xi[axis])) axis = d;
  Vec3 e{0, 0, 0};
  e[axis] = 1;
  Vec3 eta1 = cross(xi, e);
  eta1 = scaled(eta1, 1.0 / norm(eta1));
  Vec3 eta2 = cross(xi, eta1);
  eta2 = scaled(eta2, 1.0 / norm(eta2));
  return make_zeta_pair_with_frame(xi, tau, k0sq, eta1, eta2);
}

double RecoveryConfig::cutoff(const Grid3& g) const {
  if (r_cut > 0) return r_cut;
  return std::max(std::pow(tau, 2.0 / 3.0), M_PI / g.L());
}

void RecoveryConfig::validate() const {
  if (!(tau >= 1.0)) throw ConfigError("tau must be at least 1");
  if (!(s1 < 0.0) || !(s2 > 0.0 && s2 < 0.5)) throw ConfigError("need s1 < 0 < s2 < 1/2");
  if (r_cut < 0) throw ConfigError("r_cut must be nonnegative");
  if (!(max_failed_fraction >= 0.0 && max_failed_fraction <= 1.0)) throw ConfigError("max_failed_fraction out of [0, 1]");
}

cplx pairing_q_diff(const CgoOperators& o1, const CgoOperators& o2, const ZetaPair& zp, PolarizationMode mode,
                    const RecoveryConfig& cfg) {
  const Grid3& g = o1.coeffs.grid();
  if (!(g == o2.coeffs.grid())) throw GridMismatch();
  if (std::abs(o1.coeffs.k0sq() - o2.coeffs.k0sq()) > 1e-12 * o1.coeffs.k0sq())
    throw ConfigError("pairs must share omega^2 eps0 mu0");
  const PairPolarization pol = pairing_polarization(zp, mode);
  CgoOptions opts{cfg.fixed_point, false};

  FaddeevConfig f1 = cfg.faddeev, f2 = cfg.faddeev;
  f1.zeta = zp.zeta1;
  f2.zeta = zp.zeta2;
  CgoSolution z1 = build_maxwell_cgo(o1, f1, pol.a1, pol.b1, opts);
  CgoSolution y2 = build_adjoint_cgo(o2, f2, pol.a2_hat, pol.b2_hat, opts);

  // e^{i zeta1.x} conj(e^{i zeta2.x}) = e^{-i xi.x}
  StateY env1 = z1.Z.envelope();
  StateY env2 = y2.Y.envelope();
  StateY d = o1.Q.apply(env1) - o2.Q.apply(env1);
  std::vector<cplx> phase(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    Vec3 x = g.point(i);
    phase[i] = std::exp(cplx(0, -dot(zp.xi, x)));
  }
  for (int c = 0; c < 8; ++c) {
    auto dc = d.comp(c);
    for (std::size_t i = 0; i < g.size(); ++i) dc[i] *= phase[i];
  }
  return inner_omega(d, env2);
}

std::vector<std::array<int, 3>> lattice_modes(const Grid3& g, double r) {
  const int half = g.n() / 2 - 1;
  const int M = std::min(half, int(std::floor(r * g.L() / M_PI + 1e-12)));
  const double r2 = std::pow(r * g.L() / M_PI, 2) + 1e-9;
  std::vector<std::array<int, 3>> out;
  for (int a = -M; a <= M; ++a)
    for (int b = -M; b <= M; ++b)
      for (int c = -M; c <= M; ++c)
        if (double(a * a + b * b + c * c) <= r2) out.push_back({a, b, c});
  std::stable_sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    return x[0] * x[0] + x[1] * x[1] + x[2] * x[2] < y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
  });
  return out;
}

Vec3 mode_xi(const Grid3& g, const std::array<int, 3>& m) {
  const double k = M_PI / g.L();
  return {k * m[0], k * m[1], k * m[2]};
}

std::size_t FourierSamples::failures() const { return std::size_t(std::count(failed.begin(), failed.end(), true)); }

FourierSamples extract_fg_hat(const CgoOperators& o1, const CgoOperators& o2, const RecoveryConfig& cfg) {
  cfg.validate();
  const Grid3& g = o1.coeffs.grid();
  FourierSamples s;
  s.tau = cfg.tau;
  s.r_cut = cfg.cutoff(g);
  s.modes = lattice_modes(g, s.r_cut);
  const std::size_t n = s.modes.size();
  s.f_hat.assign(n, 0.0);
  s.g_hat.assign(n, 0.0);
  std::vector<char> failed(n, 0);
  const double k0sq = o1.coeffs.k0sq();
  parallel_for(
      2 * n,
      [&](std::size_t job) {
        const std::size_t i = job / 2;
        const bool alpha = job % 2 == 0;
        try {
          ZetaPair zp = zeta_pair_for_mode(g, s.modes[i], cfg.tau, k0sq);
          cplx v = pairing_q_diff(o1, o2, zp, alpha ? PolarizationMode::Alpha : PolarizationMode::Beta, cfg);
          (alpha ? s.f_hat : s.g_hat)[i] = v;
        } catch (const NumericError&) {
          failed[i] = 1;
        }
      },
      cfg.threads);
  s.failed.assign(failed.begin(), failed.end());
  for (std::size_t i = 0; i < n; ++i)
    if (s.failed[i]) s.f_hat[i] = s.g_hat[i] = 0.0;
  if (double(s.failures()) > cfg.max_failed_fraction * double(n))
    throw NumericError(NumericFailure::NoConvergence, std::to_string(s.failures()) + " of " + std::to_string(n) +
                                                          " Fourier modes failed");
  return s;
}

FgFields exact_fg(const CgoOperators& o1, const CgoOperators& o2) {
  const Grid3& g = o1.coeffs.grid();
  if (!(g == o2.coeffs.grid())) throw GridMismatch();
  const DerivedScalars& d1 = o1.derived;
  const DerivedScalars& d2 = o2.derived;
  FgFields out{ScalarField(g), ScalarField(g)};
  for (int k = 0; k < g.n(); ++k)
    for (int j = 0; j < g.n(); ++j)
      for (int i = 0; i < g.n(); ++i) {
        if (!g.in_closed_omega(i, j, k)) continue;
        std::size_t idx = g.index(i, j, k);
        cplx ga1 = 0, ga2 = 0, gb1 = 0, gb2 = 0;
        for (int c = 0; c < 3; ++c) {
          ga1 += d1.grad_alpha(c, idx) * d1.grad_alpha(c, idx);
          ga2 += d2.grad_alpha(c, idx) * d2.grad_alpha(c, idx);
          gb1 += d1.grad_beta(c, idx) * d1.grad_beta(c, idx);
          gb2 += d2.grad_beta(c, idx) * d2.grad_beta(c, idx);
        }
        cplx dk = d2.kappa(0, idx) * d2.kappa(0, idx) - d1.kappa(0, idx) * d1.kappa(0, idx);
        out.f(0, idx) = 0.5 * (d1.lap_alpha(0, idx) - d2.lap_alpha(0, idx)) + 0.25 * (ga1 - ga2) + dk;
        out.g(0, idx) = 0.5 * (d1.lap_beta(0, idx) - d2.lap_beta(0, idx)) + 0.25 * (gb1 - gb2) + dk;
      }
  return out;
}

FgFields analytic_fg(const Grid3& g, const CoefficientSpec& s1, const CoefficientSpec& s2) {
  if (s1.omega != s2.omega) throw ConfigError("pairs must share omega");
  const double w2 = s1.omega * s1.omega;
  // Delta(c^1/2) / c^1/2 = Delta c / 2c - grad c . grad c / 4c^2
  auto root_ratio = [](cplx base, const BumpJet& j) {
    const cplx c = base + j.value;
    const cplx gg = j.grad[0] * j.grad[0] + j.grad[1] * j.grad[1] + j.grad[2] * j.grad[2];
    return j.lap / (2.0 * c) - gg / (4.0 * c * c);
  };
  FgFields out{ScalarField(g), ScalarField(g)};
  for (int k = 0; k < g.n(); ++k)
    for (int j = 0; j < g.n(); ++j)
      for (int i = 0; i < g.n(); ++i) {
        if (!g.in_closed_omega(i, j, k)) continue;
        const std::size_t idx = g.index(i, j, k);
        const Vec3 x = g.point(idx);
        const BumpJet ga1 = eval_bumps_jet(s1.gamma_bumps, x), ga2 = eval_bumps_jet(s2.gamma_bumps, x);
        const BumpJet mu1 = eval_bumps_jet(s1.mu_bumps, x), mu2 = eval_bumps_jet(s2.mu_bumps, x);
        const cplx dk = w2 * ((s2.eps0 + ga2.value) * (s2.mu0 + mu2.value) - (s1.eps0 + ga1.value) * (s1.mu0 + mu1.value));
        out.f(0, idx) = root_ratio(s1.eps0, ga1) - root_ratio(s2.eps0, ga2) + dk;
        out.g(0, idx) = root_ratio(s1.mu0, mu1) - root_ratio(s2.mu0, mu2) + dk;
      }
  return out;
}

FourierSamples oracle_fg_hat(const FgFields& fg, const std::vector<std::array<int, 3>>& modes) {
  const Grid3& g = fg.f.grid();
  FourierSamples s;
  s.modes = modes;
  s.failed.assign(modes.size(), false);
  ScalarField wave(g);
  for (const auto& m : modes) {
    Vec3 xi = mode_xi(g, m);
    for (std::size_t i = 0; i < g.size(); ++i) wave(0, i) = std::exp(cplx(0, dot(xi, g.point(i))));
    s.f_hat.push_back(integrate_omega(fg.f.comp(0), wave.comp(0), g));
    s.g_hat.push_back(integrate_omega(fg.g.comp(0), wave.comp(0), g));
  }
  return s;
}

ScalarField invert_fourier(const Grid3& g, const std::vector<std::array<int, 3>>& modes, const std::vector<cplx>& values) {
  if (modes.size() != values.size()) throw ConfigError("mode and value counts differ");
  const int n = g.n();
  std::vector<cplx> buf(g.size(), 0.0);
  const double vol = std::pow(2.0 * g.L(), 3);
  for (std::size_t t = 0; t < modes.size(); ++t) {
    const auto& m = modes[t];
    int bin[3];
    for (int d = 0; d < 3; ++d) {
      if (2 * std::abs(m[d]) >= n) throw ConfigError("mode outside the grid band");
      bin[d] = (m[d] % n + n) % n;
    }
    // x_0 = -L contributes e^{-i pi m_d} per axis.
    const double sign = ((m[0] + m[1] + m[2]) % 2 == 0) ? 1.0 : -1.0;
    buf[g.index(bin[0], bin[1], bin[2])] += sign * values[t] / vol;
  }
  box_fft(n).backward(buf.data());
  ScalarField f(g);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        if (g.in_closed_omega(i, j, k)) f(0, g.index(i, j, k)) = buf[g.index(i, j, k)];
  return f;
}

double h1_omega(const ScalarField& u) {
  OmegaBox b(u.grid());
  return box_h1(restrict_box(u, b), b);
}

RecoveryReport invert_and_solve(const ScalarField& f, const ScalarField& g, const CoefficientPair& c1,
                                const CoefficientPair& truth, double tol, int max_picard) {
  const Grid3& grid = c1.grid();
  if (!(grid == f.grid()) || !(grid == g.grid()) || !(grid == truth.grid())) throw GridMismatch();
  OmegaBox b(grid);
  if (b.m < 2) throw ConfigError("Omega needs at least two cells per axis");
  const double w2 = c1.omega * c1.omega;

  const auto gam1 = restrict_box(c1.gamma, b), mu1 = restrict_box(c1.mu, b);
  const auto gam2t = restrict_box(truth.gamma, b), mu2t = restrict_box(truth.mu, b);
  const auto a = box_sqrt(gam1), am = box_sqrt(mu1);
  const auto bt = box_sqrt(gam2t), nt = box_sqrt(mu2t);
  const auto fb = restrict_box(f, b), gb = restrict_box(g, b);

  std::vector<cplx> phi1(b.count(), 0.0), phi2(b.count(), 0.0);
  std::vector<cplx> phi1t(b.count()), phi2t(b.count());
  for (std::size_t i = 0; i < b.count(); ++i) {
    phi1t[i] = a[i] - bt[i];
    phi2t[i] = am[i] - nt[i];
  }
  // Dirichlet data from the truth.
  std::vector<int> unk(b.count(), -1);
  int nun = 0;
  for (int k = 0; k <= b.m; ++k)
    for (int j = 0; j <= b.m; ++j)
      for (int i = 0; i <= b.m; ++i) {
        std::size_t l = b.local(i, j, k);
        if (b.interior(i, j, k)) {
          unk[l] = nun++;
        } else {
          phi1[l] = phi1t[l];
          phi2[l] = phi2t[l];
        }
      }

  using SpMat = Eigen::SparseMatrix<cplx>;
  const double ih2 = 1.0 / (grid.h() * grid.h());
  RecoveryReport rep{f, g, ScalarField(grid), ScalarField(grid), ScalarField(grid), ScalarField(grid)};
  std::vector<cplx> bb(b.count()), nn(b.count());
  int it = 0;
  for (; it < max_picard; ++it) {
    for (std::size_t i = 0; i < b.count(); ++i) {
      bb[i] = a[i] - phi1[i];
      nn[i] = am[i] - phi2[i];
    }
    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(std::size_t(nun) * 16);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(2 * nun);
    for (int k = 1; k < b.m; ++k)
      for (int j = 1; j < b.m; ++j)
        for (int i = 1; i < b.m; ++i) {
          const std::size_t l = b.local(i, j, k);
          const int r = unk[l];
          const cplx lb = box_laplacian(bb, b, i, j, k) / bb[l];
          const cplx ln = box_laplacian(nn, b, i, j, k) / nn[l];
          const cplx g2 = bb[l] * bb[l], m2 = nn[l] * nn[l];
          const cplx qf = -(lb + w2 * a[l] * (a[l] * mu1[l] + bb[l] * m2));
          const cplx pf = -w2 * gam1[l] * bb[l] * (am[l] + nn[l]);
          const cplx qg = -(ln + w2 * am[l] * (am[l] * gam1[l] + nn[l] * g2));
          const cplx pg = -w2 * mu1[l] * nn[l] * (a[l] + bb[l]);
          rhs[r] = a[l] * fb[l];
          rhs[nun + r] = am[l] * gb[l];
          trip.emplace_back(r, r, -6.0 * ih2 + qf);
          trip.emplace_back(r, nun + r, pf);
          trip.emplace_back(nun + r, nun + r, -6.0 * ih2 + qg);
          trip.emplace_back(nun + r, r, pg);
          const int nb[6][3] = {{i + 1, j, k}, {i - 1, j, k}, {i, j + 1, k}, {i, j - 1, k}, {i, j, k + 1}, {i, j, k - 1}};
          for (const auto& p : nb) {
            const std::size_t ln2 = b.local(p[0], p[1], p[2]);
            if (unk[ln2] >= 0) {
              trip.emplace_back(r, unk[ln2], ih2);
              trip.emplace_back(nun + r, nun + unk[ln2], ih2);
            } else {
              rhs[r] -= ih2 * phi1[ln2];
              rhs[nun + r] -= ih2 * phi2[ln2];
            }
          }
        }
    SpMat A(2 * nun, 2 * nun);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::VectorXcd x0(2 * nun);
    for (std::size_t l = 0; l < b.count(); ++l)
      if (unk[l] >= 0) {
        x0[unk[l]] = phi1[l];
        x0[nun + unk[l]] = phi2[l];
      }
    Eigen::BiCGSTAB<SpMat, Eigen::IncompleteLUT<cplx>> solver;
    solver.preconditioner().setDroptol(1e-4);
    solver.preconditioner().setFillfactor(20);
    solver.setTolerance(1e-12);
    solver.setMaxIterations(2000);
    solver.compute(A);
    if (solver.info() != Eigen::Success) throw NumericError(NumericFailure::SolverFailure, "elliptic preconditioner failed");
    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(2 * nun);
    if (rhs.squaredNorm() != 0.0) x = solver.solveWithGuess(rhs, x0);
    if (rhs.squaredNorm() != 0.0 && solver.info() != Eigen::Success)
      throw NumericError(NumericFailure::SolverFailure, "elliptic solve did not reach tolerance");
    double change = 0, size = 0;
    for (std::size_t l = 0; l < b.count(); ++l) {
      if (unk[l] < 0) continue;
      const cplx n1 = x[unk[l]], n2 = x[nun + unk[l]];
      change = std::max({change, std::abs(n1 - phi1[l]), std::abs(n2 - phi2[l])});
      size = std::max({size, std::abs(n1), std::abs(n2)});
      phi1[l] = n1;
      phi2[l] = n2;
    }
    if (change <= tol * std::max(size, 1e-300) || size == 0.0) {
      ++it;
      break;
    }
    if (it + 1 == max_picard)
      throw NumericError(NumericFailure::NoConvergence, "Picard iteration for the elliptic system did not converge");
  }
  rep.picard_iterations = it;

  std::vector<cplx> gam2(b.count()), mu2(b.count());
  for (std::size_t l = 0; l < b.count(); ++l) {
    gam2[l] = (a[l] - phi1[l]) * (a[l] - phi1[l]);
    mu2[l] = (am[l] - phi2[l]) * (am[l] - phi2[l]);
    if (mu2[l].real() <= 0) rep.negative_mu = true;
  }
  rep.phi1 = extend_box(phi1, b);
  rep.phi2 = extend_box(phi2, b);
  rep.gamma2 = extend_box(gam2, b);
  rep.mu2 = extend_box(mu2, b);

  auto diff = [](const std::vector<cplx>& x, const std::vector<cplx>& y) {
    std::vector<cplx> d(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - y[i];
    return d;
  };
  auto rel = [](double e, double ref) { return ref > 0 ? e / ref : e; };
  rep.gamma_h1_error = box_h1(diff(gam2, gam2t), b);
  rep.mu_h1_error = box_h1(diff(mu2, mu2t), b);
  rep.gamma_h1_relative = rel(rep.gamma_h1_error, box_h1(diff(gam1, gam2t), b));
  rep.mu_h1_relative = rel(rep.mu_h1_error, box_h1(diff(mu1, mu2t), b));
  rep.phi_h1_relative = rel(box_h1(diff(phi1, phi1t), b) + box_h1(diff(phi2, phi2t), b), box_h1(phi1t, b) + box_h1(phi2t, b));
  return rep;
}

nlohmann::json RecoveryReport::to_json() const {
  return {{"gamma_h1_error", gamma_h1_error},       {"mu_h1_error", mu_h1_error},
          {"h1_error", h1_error()},                 {"gamma_h1_relative", gamma_h1_relative},
          {"mu_h1_relative", mu_h1_relative},       {"phi_h1_relative", phi_h1_relative},
          {"picard_iterations", picard_iterations}, {"negative_mu", negative_mu},
          {"f_l2", l2_omega(f.comp(0), f.grid())},  {"g_l2", l2_omega(g.comp(0), g.grid())}};
}

double InterpolationCheck::ratio() const {
  const double den = std::pow(hs1, theta) * std::pow(hs2, 1.0 - theta);
  return den > 0 ? l2 / den : 0.0;
}

InterpolationCheck interpolation_check(const ScalarField& f, double s1, double s2) {
  if (!(s1 < 0.0 && s2 > 0.0)) throw ConfigError("need s1 < 0 < s2");
  InterpolationCheck c;
  c.theta = s2 / (s2 - s1);
  c.l2 = hs_proxy_norm(f, 0.0);
  c.hs1 = hs_proxy_norm(f, s1);
  c.hs2 = hs_proxy_norm(f, s2);
  return c;
}

double fit_growth_constant(const CgoOperators& o, const RecoveryConfig& cfg, const std::vector<double>& taus) {
  if (taus.size() < 2) throw ConfigError("need at least two tau values");
  const Grid3& g = o.coeffs.grid();
  std::vector<double> x, y;
  for (double tau : taus) {
    ZetaPair zp = zeta_pair_for_mode(g, {1, 0, 0}, tau, o.coeffs.k0sq());
    const CVec3 nu = nu_vector(zp), zero{};
    FaddeevConfig f1 = cfg.faddeev, f2 = cfg.faddeev;
    f1.zeta = zp.zeta1;
    f2.zeta = zp.zeta2;
    CgoOptions opts{cfg.fixed_point, false};
    CgoSolution z1 = build_maxwell_cgo(o, f1, conj3(nu), zero, opts);
    CgoSolution y2 = build_adjoint_cgo(o, f2, nu, zero, opts);
    x.push_back(tau);
    y.push_back(std::log(boundary_state_norm(z1.Z) * boundary_state_norm(y2.Y)));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / x.size();
    my += y[i] / y.size();
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

double tau_from_delta(double delta, double c, double tau_min, double tau_max) {
  if (!(c > 0)) throw ConfigError("growth constant must be positive");
  double tau = delta > 0 ? -std::log(delta) / (2.0 * c) : INFINITY;
  tau = std::max(tau, tau_min);
  if (tau_max > 0) tau = std::min(tau, tau_max);
  if (!std::isfinite(tau)) throw ConfigError("delta = 0 needs a tau cap");
  return tau;
}

nlohmann::json StabilityCurve::to_json() const {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : points)
    pts.push_back({{"label", p.label},
                   {"amplitude", p.amplitude},
                   {"delta_c", p.delta_c},
                   {"tau", p.tau},
                   {"h1_error", p.h1_error},
                   {"f_l2", p.f_l2},
                   {"failed_modes", p.failed_modes}});
  nlohmann::json interp = nlohmann::json::array();
  for (const auto& c : interpolation)
    interp.push_back({{"l2", c.l2}, {"hs1", c.hs1}, {"hs2", c.hs2}, {"theta", c.theta}, {"ratio", c.ratio()}});
  return {{"points", pts}, {"growth_c", growth_c}, {"lambda", lambda},
          {"log_C", log_C}, {"monotone", monotone}, {"interpolation", interp}};
}

std::string StabilityCurve::to_csv() const {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "delta_c,h1_error,tau,lambda_fit\n";
  for (const auto& p : points) os << p.delta_c << ',' << p.h1_error << ',' << p.tau << ',' << lambda << '\n';
  return os.str();
}

StabilityCurve stability_curve(const Grid3& g, const CoefficientSpec& base, const std::vector<CoefficientSpec>& perturbed,
                               const std::vector<double>& amplitudes, const CurveOptions& opts) {
  if (perturbed.size() != amplitudes.size()) throw ConfigError("one amplitude per perturbation");
  opts.recovery.validate();
  StabilityCurve curve;
  const CoefficientPair c0 = synth_coefficients(g, base);
  const CgoOperators o0(c0);
  const auto probes = plane_wave_probes(opts.probes);
  const CauchySet s0 = make_cauchy_set(c0, probes, spec_hash(base));
  curve.growth_c = opts.c > 0 ? opts.c : fit_growth_constant(o0, opts.recovery);
  if (!(curve.growth_c > 0)) throw NumericError(NumericFailure::NoConvergence, "fitted growth constant is not positive");

  for (std::size_t i = 0; i < perturbed.size(); ++i) {
    const CoefficientPair c2 = synth_coefficients(g, perturbed[i]);
    const CauchySet s2 = make_cauchy_set(c2, probes, spec_hash(perturbed[i]));
    CurvePoint p;
    p.label = "p" + std::to_string(i);
    p.amplitude = amplitudes[i];
    p.delta_c = delta_c(s0, s2).delta;
    RecoveryConfig rc = opts.recovery;
    const double cap = opts.tau_max > 0 ? opts.tau_max : 16.0;
    rc.tau = p.delta_c > 1e-300 ? tau_from_delta(p.delta_c, curve.growth_c, 1.0, opts.tau_max) : cap;
    p.tau = rc.tau;
    const CgoOperators o2(c2);
    FourierSamples fs = extract_fg_hat(o0, o2, rc);
    p.failed_modes = fs.failures();
    ScalarField f = invert_fourier(g, fs.modes, fs.f_hat);
    ScalarField gg = invert_fourier(g, fs.modes, fs.g_hat);
    RecoveryReport rep = invert_and_solve(f, gg, c0, c2);
    p.h1_error = rep.h1_error();
    p.f_l2 = l2_omega(f.comp(0), g);
    curve.points.push_back(p);
    curve.interpolation.push_back(interpolation_check(f, rc.s1, rc.s2));
  }

  // Least squares log err = log C - lambda log|log delta| over points with delta, error > 0.
  std::vector<double> x, y;
  for (const auto& p : curve.points)
    if (p.delta_c > 1e-12 && p.delta_c < 1 && p.h1_error > 0) {
      x.push_back(std::log(std::abs(std::log(p.delta_c))));
      y.push_back(std::log(p.h1_error));
    }
  if (x.size() >= 2) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      mx += x[i] / x.size();
      my += y[i] / y.size();
    }
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sxy += (x[i] - mx) * (y[i] - my);
      sxx += (x[i] - mx) * (x[i] - mx);
    }
    curve.lambda = sxx > 0 ? -sxy / sxx : 0.0;
    curve.log_C = my + curve.lambda * mx;
  }
  // Error nondecreasing in u = 1 / |log delta| (u = 0 at delta = 0).
  std::vector<std::pair<double, double>> ue;
  for (const auto& p : curve.points) {
    double u = p.delta_c > 1e-300 && p.delta_c < 1 ? 1.0 / std::abs(std::log(p.delta_c)) : (p.delta_c >= 1 ? INFINITY : 0.0);
    ue.emplace_back(u, p.h1_error);
  }
  std::sort(ue.begin(), ue.end());
  curve.monotone = true;
  for (std::size_t i = 1; i < ue.size(); ++i)
    if (ue[i].second < ue[i - 1].second) curve.monotone = false;
  return curve;
}

}  // namespace maxcgo
