#include "maxcgo/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "maxcgo/fft.hpp"
#include "maxcgo/spectral.hpp"

namespace maxcgo {

namespace {

std::vector<Bump> bumps_from_json(const nlohmann::json& arr) {
  std::vector<Bump> out;
  for (const auto& b : arr) {
    Bump bump;
    auto c = b.at("center");
    if (c.size() != 3) throw ConfigError("bump center must have 3 coordinates");
    bump.center = {c[0].get<double>(), c[1].get<double>(), c[2].get<double>()};
    bump.radius = b.at("radius").get<double>();
    bump.amplitude = {b.value("amplitude_re", 0.0), b.value("amplitude_im", 0.0)};
    out.push_back(bump);
  }
  return out;
}

nlohmann::json bumps_to_json(const std::vector<Bump>& bumps) {
  auto arr = nlohmann::json::array();
  for (const auto& b : bumps)
    arr.push_back({{"center", {b.center[0], b.center[1], b.center[2]}},
                   {"radius", b.radius},
                   {"amplitude_re", b.amplitude.real()},
                   {"amplitude_im", b.amplitude.imag()}});
  return arr;
}

double norm3(const Vec3& x) { return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]); }

void check_bumps(const Grid3& g, const std::vector<Bump>& bumps, const char* which) {
  for (const auto& b : bumps) {
    if (!(b.radius > 0)) throw ConfigError(std::string(which) + " bump radius must be positive");
    for (double c : b.center)
      if (std::abs(c) >= g.a()) throw ConfigError(std::string(which) + " bump center must lie in Omega");
    if (norm3(b.center) + b.radius > g.rho() * (1 + 1e-12))
      throw ConfigError(std::string(which) + " bump support leaves B(O, rho)");
    for (double c : b.center)
      if (std::abs(c) + b.radius > g.L() - 2 * g.h())
        throw ConfigError(std::string(which) + " bump support reaches the periodic seam");
  }
}

}  // namespace

CoefficientSpec spec_from_json(const nlohmann::json& j) {
  try {
    CoefficientSpec s;
    s.omega = j.value("omega", s.omega);
    s.eps0 = j.value("eps0", s.eps0);
    s.mu0 = j.value("mu0", s.mu0);
    s.M = j.value("M", s.M);
    s.s = j.value("s", s.s);
    if (j.contains("gamma_bumps")) s.gamma_bumps = bumps_from_json(j.at("gamma_bumps"));
    if (j.contains("mu_bumps")) s.mu_bumps = bumps_from_json(j.at("mu_bumps"));
    if (!(s.omega > 0) || !(s.eps0 > 0) || !(s.mu0 > 0) || !(s.M > 0)) throw ConfigError("omega, eps0, mu0, M must be positive");
    if (!(s.s > 0 && s.s < 0.5)) throw ConfigError("sobolev s must lie in (0, 1/2)");
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("coefficient spec: ") + e.what());
  }
}

nlohmann::json spec_to_json(const CoefficientSpec& s) {
  return {{"omega", s.omega}, {"eps0", s.eps0}, {"mu0", s.mu0}, {"M", s.M}, {"s", s.s},
          {"gamma_bumps", bumps_to_json(s.gamma_bumps)}, {"mu_bumps", bumps_to_json(s.mu_bumps)}};
}

CoefficientSpec load_spec(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return spec_from_json(j);
}

double bump_profile(double t) { return t < 1.0 ? std::exp(-1.0 / (1.0 - t)) : 0.0; }

cplx eval_bumps(const std::vector<Bump>& bumps, const Vec3& x) {
  cplx v = 0;
  for (const auto& b : bumps) {
    double r2 = 0;
    for (int d = 0; d < 3; ++d) r2 += (x[d] - b.center[d]) * (x[d] - b.center[d]);
    v += b.amplitude * bump_profile(r2 / (b.radius * b.radius));
  }
  return v;
}

BumpJet eval_bumps_jet(const std::vector<Bump>& bumps, const Vec3& x) {
  BumpJet j;
  for (const auto& b : bumps) {
    const double r2 = b.radius * b.radius;
    double d2 = 0;
    for (int d = 0; d < 3; ++d) d2 += (x[d] - b.center[d]) * (x[d] - b.center[d]);
    const double t = d2 / r2;
    if (t >= 1.0) continue;
    const double u = 1.0 / (1.0 - t);
    const double p = std::exp(-u);
    const double p1 = -p * u * u;                      // dp/dt
    const double p2 = p * (std::pow(u, 4) - 2 * std::pow(u, 3));  // d2p/dt2
    j.value += b.amplitude * p;
    for (int d = 0; d < 3; ++d) j.grad[d] += b.amplitude * (p1 * 2.0 * (x[d] - b.center[d]) / r2);
    j.lap += b.amplitude * (p2 * 4.0 * d2 / (r2 * r2) + p1 * 6.0 / r2);
  }
  return j;
}

double CoefficientPair::kappa0() const { return omega * std::sqrt(eps0 * mu0); }

CoefficientPair synth_coefficients(const Grid3& g, const CoefficientSpec& spec) {
  check_bumps(g, spec.gamma_bumps, "gamma");
  check_bumps(g, spec.mu_bumps, "mu");
  for (const auto& b : spec.mu_bumps)
    if (b.amplitude.imag() != 0.0) throw ConfigError("mu must be real: mu bump amplitude_im must be 0");
  CoefficientPair c{sample(g, [&](const Vec3& x) { return spec.eps0 + eval_bumps(spec.gamma_bumps, x); }),
                    sample(g, [&](const Vec3& x) { return spec.mu0 + eval_bumps(spec.mu_bumps, x); }),
                    spec.omega, spec.eps0, spec.mu0, spec.M, spec.s};
  for (std::size_t i = 0; i < g.size(); ++i) {
    cplx gm = c.gamma(0, i);
    double mu = c.mu(0, i).real();
    if (gm.real() < 1.0 / spec.M || mu < 1.0 / spec.M) throw ConfigError("bumps violate uniform ellipticity");
    if (gm.imag() < 0) throw ConfigError("bumps make Im gamma negative");
  }
  return c;
}

DerivedScalars derive_scalars(const CoefficientPair& c) {
  const Grid3& g = c.grid();
  for (std::size_t i = 0; i < g.size(); ++i)
    if (c.gamma(0, i).real() <= 0 || c.mu(0, i).real() <= 0 || c.mu(0, i).imag() != 0.0)
      throw ConfigError("derive_scalars: coefficients are not elliptic");
  ScalarField alpha(g), beta(g), kappa(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    alpha(0, i) = std::log(c.gamma(0, i));
    beta(0, i) = std::log(c.mu(0, i).real());
    kappa(0, i) = c.omega * std::sqrt(c.mu(0, i).real()) * std::sqrt(c.gamma(0, i));
  }
  SpectralOps ops(g);
  DerivedScalars d{alpha, beta, kappa, ScalarField(g), ScalarField(g),
                   ops.grad(alpha), ops.grad(beta), ops.grad(kappa),
                   ops.laplacian(alpha), ops.laplacian(beta),
                   ops.hessian(alpha), ops.hessian(beta), c.omega, c.kappa0()};

  const double rho2 = g.rho() * g.rho();
  for (std::size_t i = 0; i < g.size(); ++i) {
    Vec3 x = g.point(i);
    if (x[0] * x[0] + x[1] * x[1] + x[2] * x[2] <= rho2) continue;
    for (int ax = 0; ax < 3; ++ax) {
      d.grad_alpha(ax, i) = 0;
      d.grad_beta(ax, i) = 0;
      d.grad_kappa(ax, i) = 0;
    }
    d.lap_alpha(0, i) = 0;
    d.lap_beta(0, i) = 0;
    for (int p = 0; p < 6; ++p) {
      d.hess_alpha[p](0, i) = 0;
      d.hess_beta[p](0, i) = 0;
    }
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    cplx k2 = d.kappa(0, i) * d.kappa(0, i);
    cplx gb = 0, ga = 0;
    for (int ax = 0; ax < 3; ++ax) {
      gb += d.grad_beta(ax, i) * d.grad_beta(ax, i);
      ga += d.grad_alpha(ax, i) * d.grad_alpha(ax, i);
    }
    // Dv.Dv = -grad v . grad v
    d.q1(0, i) = -0.5 * d.lap_beta(0, i) - k2 + 0.25 * gb;
    d.q2(0, i) = -0.5 * d.lap_alpha(0, i) - k2 + 0.25 * ga;
  }
  return d;
}

double c01_boundary_norm(const ScalarField& f) {
  const Grid3& g = f.grid();
  const int lo = g.omega_lo(), hi = g.omega_hi();
  auto on_boundary = [&](int i, int j, int k) {
    return g.in_closed_omega(i, j, k) && (i == lo || i == hi || j == lo || j == hi || k == lo || k == hi);
  };
  double sup = 0, lip = 0;
  for (int k = lo; k <= hi; ++k)
    for (int j = lo; j <= hi; ++j)
      for (int i = lo; i <= hi; ++i) {
        if (!on_boundary(i, j, k)) continue;
        cplx v = f(0, g.index(i, j, k));
        sup = std::max(sup, std::abs(v));
        for (int dk = -3; dk <= 3; ++dk)
          for (int dj = -3; dj <= 3; ++dj)
            for (int di = -3; di <= 3; ++di) {
              int d2 = di * di + dj * dj + dk * dk;
              if (d2 == 0 || d2 > 9) continue;
              if (!on_boundary(i + di, j + dj, k + dk)) continue;
              double dist = std::sqrt(static_cast<double>(d2)) * g.h();
              lip = std::max(lip, std::abs(f(0, g.index(i + di, j + dj, k + dk)) - v) / dist);
            }
      }
  return sup + lip;
}

double w2inf_omega_norm(const ScalarField& f) {
  const Grid3& g = f.grid();
  std::vector<ScalarField> parts;
  parts.push_back(f);
  for (int ax = 0; ax < 3; ++ax) parts.push_back(stencil::derivative(f, ax));
  for (auto [a, b] : kHessianPairs) {
    if (a == b) {
      // second difference (f(x+h) - 2f + f(x-h)) / h^2 along a
      ScalarField s(g);
      const int n = g.n();
      const double inv = 1.0 / (g.h() * g.h());
      for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
          for (int i = 0; i < n; ++i) {
            int c[3] = {i, j, k};
            int p[3] = {i, j, k}, m[3] = {i, j, k};
            p[a] = (c[a] + 1) % n;
            m[a] = (c[a] - 1 + n) % n;
            s(0, g.index(i, j, k)) =
                (f(0, g.index(p[0], p[1], p[2])) - 2.0 * f(0, g.index(i, j, k)) + f(0, g.index(m[0], m[1], m[2]))) * inv;
          }
      parts.push_back(std::move(s));
    } else {
      parts.push_back(stencil::derivative(stencil::derivative(f, a), b));
    }
  }
  double total = 0;
  for (const auto& p : parts) {
    double sup = 0;
    for (int k = g.omega_lo(); k <= g.omega_hi(); ++k)
      for (int j = g.omega_lo(); j <= g.omega_hi(); ++j)
        for (int i = g.omega_lo(); i <= g.omega_hi(); ++i) sup = std::max(sup, std::abs(p(0, g.index(i, j, k))));
    total += sup;
  }
  return total;
}

double hs_proxy_norm(const ScalarField& f, double order) {
  const Grid3& g = f.grid();
  std::vector<cplx> hat(f.comp(0).begin(), f.comp(0).end());
  Fft fft = box_fft(g.n());
  fft.forward(hat.data());
  const int n = g.n();
  double s = 0;
  std::size_t idx = 0;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i, ++idx) {
        double kk = std::pow(g.wavenumber(i), 2) + std::pow(g.wavenumber(j), 2) + std::pow(g.wavenumber(k), 2);
        s += std::pow(1.0 + kk, order) * std::norm(hat[idx]);
      }
  // Parseval: sum |f|^2 h^3 = h^3 / n^3 sum |f_hat|^2
  double h3 = g.h() * g.h() * g.h();
  return std::sqrt(s * h3 / static_cast<double>(g.size()));
}

AdmissibilityReport check_admissible(const CoefficientPair& c) {
  const Grid3& g = c.grid();
  AdmissibilityReport r;
  r.min_re_gamma = r.min_mu = r.min_im_gamma = INFINITY;
  for (std::size_t i = 0; i < g.size(); ++i) {
    r.min_re_gamma = std::min(r.min_re_gamma, c.gamma(0, i).real());
    r.min_im_gamma = std::min(r.min_im_gamma, c.gamma(0, i).imag());
    r.min_mu = std::min(r.min_mu, c.mu(0, i).real());
  }
  r.ellipticity = r.min_re_gamma >= 1.0 / c.M && r.min_mu >= 1.0 / c.M && r.min_im_gamma >= 0.0;
  r.boundary_c01 = c01_boundary_norm(c.gamma) + c01_boundary_norm(c.mu);
  r.boundary_bound = r.boundary_c01 < c.M;
  r.w2inf = w2inf_omega_norm(c.gamma) + w2inf_omega_norm(c.mu);
  r.interior_w2inf = r.w2inf <= c.M;
  r.hs = hs_proxy_norm(c.gamma, 2.0 + c.s) + hs_proxy_norm(c.mu, 2.0 + c.s);
  r.interior_hs = r.hs <= c.M;
  return r;
}

nlohmann::json AdmissibilityReport::to_json() const {
  return {{"ellipticity", ellipticity},   {"boundary_bound", boundary_bound}, {"interior_w2inf", interior_w2inf},
          {"interior_hs", interior_hs},   {"min_re_gamma", min_re_gamma},     {"min_mu", min_mu},
          {"min_im_gamma", min_im_gamma}, {"boundary_c01", boundary_c01},     {"w2inf", w2inf},
          {"hs", hs},                     {"admissible", all()}};
}

}  // namespace maxcgo
