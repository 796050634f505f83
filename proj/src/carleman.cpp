#include "maxcgo/carleman.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

#include "maxcgo/parallel.hpp"

namespace maxcgo {

namespace {

// Values, gradient and Laplacian of u on the (m+1)^3 nodes of closed Omega,
// second order with one-sided stencils on the faces.
struct OmegaJet {
  int m = 0;
  std::vector<cplx> u, lap;
  std::array<std::vector<cplx>, 3> grad;
  std::vector<Vec3> x;
  std::size_t at(int i, int j, int k) const { return i + std::size_t(m + 1) * (j + std::size_t(m + 1) * k); }
};

OmegaJet omega_jet(const ScalarField& f) {
  const Grid3& g = f.grid();
  OmegaJet J;
  J.m = g.omega_cells();
  const int m = J.m, lo = g.omega_lo(), s = m + 1;
  const std::size_t count = std::size_t(s) * s * s;
  J.u.resize(count);
  J.x.resize(count);
  for (int k = 0; k <= m; ++k)
    for (int j = 0; j <= m; ++j)
      for (int i = 0; i <= m; ++i) {
        std::size_t gi = g.index(lo + i, lo + j, lo + k);
        J.u[J.at(i, j, k)] = f(0, gi);
        J.x[J.at(i, j, k)] = g.point(gi);
      }
  const double h = g.h();
  for (auto& c : J.grad) c.assign(count, 0.0);
  J.lap.assign(count, 0.0);
  for (int k = 0; k <= m; ++k)
    for (int j = 0; j <= m; ++j)
      for (int i = 0; i <= m; ++i) {
        const int p[3] = {i, j, k};
        const std::size_t here = J.at(i, j, k);
        for (int ax = 0; ax < 3; ++ax) {
          auto v = [&](int t) {
            int q[3] = {p[0], p[1], p[2]};
            q[ax] = t;
            return J.u[J.at(q[0], q[1], q[2])];
          };
          const int t = p[ax];
          cplx d1, d2;
          if (t == 0) {
            d1 = (-3.0 * v(0) + 4.0 * v(1) - v(2)) / (2 * h);
            d2 = (2.0 * v(0) - 5.0 * v(1) + 4.0 * v(2) - v(3)) / (h * h);
          } else if (t == m) {
            d1 = (3.0 * v(m) - 4.0 * v(m - 1) + v(m - 2)) / (2 * h);
            d2 = (2.0 * v(m) - 5.0 * v(m - 1) + 4.0 * v(m - 2) - v(m - 3)) / (h * h);
          } else {
            d1 = (v(t + 1) - v(t - 1)) / (2 * h);
            d2 = (v(t + 1) - 2.0 * v(t) + v(t - 1)) / (h * h);
          }
          J.grad[ax][here] = d1;
          J.lap[here] += d2;
        }
      }
  return J;
}

double dist2(const Vec3& x, const Vec3& c) {
  double s = 0;
  for (int d = 0; d < 3; ++d) s += (x[d] - c[d]) * (x[d] - c[d]);
  return s;
}

// Weighted squared norms with weight exp(2 (phi - phi_max) / h); h = 0 means unweighted.
struct Norms {
  double u = 0, grad = 0, lap = 0, bu = 0, bgrad = 0;
};

Norms weighted_norms(const OmegaJet& J, const Grid3& g, const Vec3& x0, double d2, double h) {
  const int m = J.m;
  const double hg = g.h();
  auto weight = [&](std::size_t idx) { return h > 0 ? std::exp((dist2(J.x[idx], x0) - d2) / h) : 1.0; };
  auto tw = [&](int t) { return (t == 0 || t == m) ? 0.5 : 1.0; };
  auto gsq = [&](std::size_t idx) { return std::norm(J.grad[0][idx]) + std::norm(J.grad[1][idx]) + std::norm(J.grad[2][idx]); };
  Norms n;
  for (int k = 0; k <= m; ++k)
    for (int j = 0; j <= m; ++j)
      for (int i = 0; i <= m; ++i) {
        const std::size_t idx = J.at(i, j, k);
        const double w = weight(idx);
        const double q = tw(i) * tw(j) * tw(k) * hg * hg * hg * w;
        n.u += q * std::norm(J.u[idx]);
        n.grad += q * gsq(idx);
        n.lap += q * std::norm(J.lap[idx]);
      }
  for (int ax = 0; ax < 3; ++ax)
    for (int side : {0, m}) {
      const int a1 = (ax + 1) % 3, a2 = (ax + 2) % 3;
      for (int q = 0; q <= m; ++q)
        for (int p = 0; p <= m; ++p) {
          int c[3];
          c[ax] = side;
          c[a1] = p;
          c[a2] = q;
          const std::size_t idx = J.at(c[0], c[1], c[2]);
          const double wq = tw(p) * tw(q) * hg * hg * weight(idx);
          n.bu += wq * std::norm(J.u[idx]);
          n.bgrad += wq * gsq(idx);
        }
    }
  return n;
}

}  // namespace

Vec3 CarlemanConfig::center(const Grid3& g) const { return x0_set ? x0 : Vec3{3.0 * g.a(), 0.0, 0.0}; }

double CarlemanConfig::d1(const Grid3& g) const {
  const Vec3 c = center(g);
  double s = 0;
  for (int d = 0; d < 3; ++d) {
    const double e = std::max(0.0, std::abs(c[d]) - g.a());
    s += e * e;
  }
  return s;
}

double CarlemanConfig::d2(const Grid3& g) const {
  const Vec3 c = center(g);
  double s = 0;
  for (int d = 0; d < 3; ++d) {
    const double e = std::abs(c[d]) + g.a();
    s += e * e;
  }
  return s;
}

void CarlemanConfig::validate(const Grid3& g) const {
  if (!(d1(g) > 0)) throw ConfigError("Carleman center must lie outside the closed cube");
  if (h_values.empty()) throw ConfigError("no h values");
  for (double h : h_values)
    if (!(h > 0 && h <= 1)) throw ConfigError("h values must lie in (0, 1]");
}

CarlemanTerms carleman_ratio(const ScalarField& u, const CarlemanConfig& cfg, double h) {
  const Grid3& g = u.grid();
  cfg.validate(g);
  if (!(h > 0 && h <= 1)) throw ConfigError("h must lie in (0, 1]");
  const double d2 = cfg.d2(g);
  const Norms n = weighted_norms(omega_jet(u), g, cfg.center(g), d2, h);
  CarlemanTerms t;
  t.h = h;
  t.log_scale = d2 / h;
  t.interior_l2 = n.u;
  t.interior_grad = n.grad;
  t.laplacian = n.lap;
  t.boundary_l2 = n.bu;
  t.boundary_grad = n.bgrad;
  t.lhs = h * n.u + h * h * h * n.grad;
  t.rhs = std::pow(h, 4) * n.lap + h * n.bu + h * h * h * n.bgrad;
  t.ratio = t.rhs > 0 ? t.lhs / t.rhs : 0.0;
  return t;
}

std::vector<CarlemanTerms> carleman_sweep(const ScalarField& u, const CarlemanConfig& cfg, int threads) {
  cfg.validate(u.grid());
  std::vector<CarlemanTerms> rows(cfg.h_values.size());
  parallel_for(rows.size(), [&](std::size_t i) { rows[i] = carleman_ratio(u, cfg, cfg.h_values[i]); }, threads);
  return rows;
}

std::string carleman_csv(const std::vector<CarlemanTerms>& rows) {
  std::ostringstream os;
  os << std::setprecision(17) << "h,lhs,rhs,ratio\n";
  for (const auto& r : rows) os << r.h << ',' << r.lhs << ',' << r.rhs << ',' << r.ratio << '\n';
  return os.str();
}

ScalarField random_test_function(const Grid3& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double a = g.a();
  const double margin = 2 * g.h();
  std::vector<Bump> bumps(1 + static_cast<int>(3 * unit(rng)) % 3);
  for (auto& b : bumps) {
    b.radius = a * (0.4 + 0.4 * unit(rng));
    const double room = std::max(0.0, a - b.radius - margin);
    for (int d = 0; d < 3; ++d) b.center[d] = room * (2 * unit(rng) - 1);
    b.amplitude = cplx(normal(rng), normal(rng));
  }
  Vec3 k;
  for (double& v : k) v = 2.0 * normal(rng) / a;
  return sample(g, [&](const Vec3& x) {
    return eval_bumps(bumps, x) * std::exp(cplx(0, k[0] * x[0] + k[1] * x[1] + k[2] * x[2]));
  });
}

nlohmann::json AbsorbReport::to_json() const {
  nlohmann::json rj = nlohmann::json::array();
  for (const auto& r : rows)
    rj.push_back({{"h", r.h},
                  {"weighted_lhs", r.weighted_lhs},
                  {"weighted_rhs", r.weighted_rhs},
                  {"log_left", r.log_left},
                  {"log_right", r.log_right},
                  {"holds", r.holds}});
  return {{"rows", rj},
          {"c_fit", c_fit},
          {"h_threshold", h_threshold},
          {"holds_below_threshold", holds_below_threshold},
          {"gamma_trace", gamma_trace},
          {"gamma_trace_bound", gamma_trace_bound},
          {"mu_trace", mu_trace},
          {"mu_trace_bound", mu_trace_bound},
          {"margin", margin()}};
}

AbsorbReport absorb_check(const ScalarField& phi1, const ScalarField& phi2, const ScalarField& f, const ScalarField& g,
                          const CoefficientPair& c1, const CoefficientPair& c2, const CarlemanConfig& cfg) {
  const Grid3& gr = phi1.grid();
  for (const Grid3* o : {&phi2.grid(), &f.grid(), &g.grid(), &c1.grid(), &c2.grid()})
    if (!(*o == gr)) throw GridMismatch();
  cfg.validate(gr);
  const Vec3 x0 = cfg.center(gr);
  const double d1 = cfg.d1(gr), d2 = cfg.d2(gr);
  const OmegaJet j1 = omega_jet(phi1), j2 = omega_jet(phi2), jf = omega_jet(f), jg = omega_jet(g);

  AbsorbReport rep;
  const Norms p1 = weighted_norms(j1, gr, x0, d2, 0), p2 = weighted_norms(j2, gr, x0, d2, 0);
  const Norms nf = weighted_norms(jf, gr, x0, d2, 0), ng = weighted_norms(jg, gr, x0, d2, 0);
  for (double h : cfg.h_values) {
    const Norms w1 = weighted_norms(j1, gr, x0, d2, h), w2 = weighted_norms(j2, gr, x0, d2, h);
    const Norms wf = weighted_norms(jf, gr, x0, d2, h), wg = weighted_norms(jg, gr, x0, d2, h);
    const double h3 = h * h * h, h4 = h3 * h;
    AbsorbRow r;
    r.h = h;
    r.weighted_lhs = h * (w1.u + w2.u) + h3 * (w1.grad + w2.grad);
    r.weighted_rhs = h4 * (w1.u + w2.u) + h * (w1.bu + w2.bu) + h3 * (w1.bgrad + w2.bgrad) + h4 * (wf.u + wg.u);
    const double left = h * (p1.u + p2.u) + h3 * (p1.grad + p2.grad);
    const double bracket = h4 * (nf.u + ng.u) + h * (p1.bu + p2.bu) + h3 * (p1.bgrad + p2.bgrad);
    r.log_left = left > 0 ? d1 / h + std::log(left) : -std::numeric_limits<double>::infinity();
    r.log_right = bracket > 0 ? d2 / h + std::log(bracket) : -std::numeric_limits<double>::infinity();
    if (r.weighted_rhs > 0) rep.c_fit = std::max(rep.c_fit, r.weighted_lhs / r.weighted_rhs);
    rep.rows.push_back(r);
  }
  const double log_c = rep.c_fit > 0 ? std::log(rep.c_fit) : 0.0;
  rep.h_threshold = rep.c_fit > 0 ? std::cbrt(1.0 / rep.c_fit) : std::numeric_limits<double>::infinity();
  rep.holds_below_threshold = true;
  for (auto& r : rep.rows) {
    r.holds = r.log_left == -std::numeric_limits<double>::infinity() || r.log_left <= log_c + r.log_right + 1e-12;
    if (r.h < rep.h_threshold && !r.holds) rep.holds_below_threshold = false;
  }

  // |phi1| = |gamma1 - gamma2| / |gamma1^1/2 + gamma2^1/2| on the faces.
  const int m = gr.omega_cells(), lo = gr.omega_lo();
  double sup_g = 0, sup_m = 0, min_g = std::numeric_limits<double>::infinity(), min_m = min_g;
  for (int k = 0; k <= m; ++k)
    for (int j = 0; j <= m; ++j)
      for (int i = 0; i <= m; ++i) {
        if (i != 0 && i != m && j != 0 && j != m && k != 0 && k != m) continue;
        const std::size_t idx = gr.index(lo + i, lo + j, lo + k);
        const cplx ga = c1.gamma(0, idx), gb = c2.gamma(0, idx), ma = c1.mu(0, idx), mb = c2.mu(0, idx);
        sup_g = std::max(sup_g, std::abs(ga - gb));
        sup_m = std::max(sup_m, std::abs(ma - mb));
        min_g = std::min(min_g, std::abs(std::sqrt(ga) + std::sqrt(gb)));
        min_m = std::min(min_m, std::abs(std::sqrt(ma) + std::sqrt(mb)));
      }
  const double area = 24.0 * gr.a() * gr.a();
  rep.gamma_trace = std::sqrt(p1.bu);
  rep.mu_trace = std::sqrt(p2.bu);
  rep.gamma_trace_bound = sup_g / min_g * std::sqrt(area);
  rep.mu_trace_bound = sup_m / min_m * std::sqrt(area);
  return rep;
}

}  // namespace maxcgo
