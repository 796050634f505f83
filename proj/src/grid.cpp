#include "maxcgo/grid.hpp"

#include <cmath>
#include <string>

namespace maxcgo {

const char* to_string(NumericFailure kind) {
  switch (kind) {
    case NumericFailure::NonContractive: return "NonContractive";
    case NumericFailure::NearResonance: return "NearResonance";
    case NumericFailure::NoConvergence: return "NoConvergence";
    case NumericFailure::SingularSymbol: return "SingularSymbol";
    case NumericFailure::SolverFailure: return "SolverFailure";
  }
  return "NumericFailure";
}

Grid3::Grid3(int n, double box_half_width, double omega_half_width)
    : n_(n), L_(box_half_width), a_(omega_half_width) {
  if (n < 8 || n % 2 != 0) throw ConfigError("grid: n must be even and >= 8, got " + std::to_string(n));
  if (!(L_ > 0) || !(a_ > 0) || !(a_ < L_)) throw ConfigError("grid: need 0 < a < L");
  double cells = 2.0 * a_ / h();
  m_ = static_cast<int>(std::lround(cells));
  if (std::abs(cells - m_) > 1e-9 * cells || m_ < 2)
    throw ConfigError("grid: Omega must span a whole number (>= 2) of cells");
  double lo = (L_ - a_) / h();
  lo_ = static_cast<int>(std::lround(lo));
  if (std::abs(lo - lo_) > 1e-9 * n_) throw ConfigError("grid: Omega faces must lie on node planes");
}

double Grid3::rho() const { return a_ * std::sqrt(3.0); }

Vec3 Grid3::point(std::size_t idx) const {
  int i = static_cast<int>(idx % n_);
  int j = static_cast<int>((idx / n_) % n_);
  int k = static_cast<int>(idx / (static_cast<std::size_t>(n_) * n_));
  return {coord(i), coord(j), coord(k)};
}

bool Grid3::in_closed_omega(int i, int j, int k) const {
  auto in = [&](int t) { return t >= lo_ && t <= lo_ + m_; };
  return in(i) && in(j) && in(k);
}

double Grid3::wavenumber(int i) const {
  int m = i < n_ / 2 ? i : i - n_;
  return M_PI * m / L_;
}

double omega_axis_weight(const Grid3& g, int i) {
  if (i < g.omega_lo() || i > g.omega_hi()) return 0.0;
  return (i == g.omega_lo() || i == g.omega_hi()) ? 0.5 : 1.0;
}

cplx integrate_omega(std::span<const cplx> u, std::span<const cplx> v, const Grid3& g) {
  const double h3 = g.h() * g.h() * g.h();
  cplx s = 0;
  for (int k = g.omega_lo(); k <= g.omega_hi(); ++k) {
    double wk = omega_axis_weight(g, k);
    for (int j = g.omega_lo(); j <= g.omega_hi(); ++j) {
      double wjk = wk * omega_axis_weight(g, j);
      cplx row = 0;
      for (int i = g.omega_lo(); i <= g.omega_hi(); ++i) {
        std::size_t idx = g.index(i, j, k);
        row += omega_axis_weight(g, i) * u[idx] * std::conj(v[idx]);
      }
      s += wjk * row;
    }
  }
  return s * h3;
}

double l2_omega(std::span<const cplx> u, const Grid3& g) {
  return std::sqrt(std::max(0.0, integrate_omega(u, u, g).real()));
}

double group_norm_omega(const StateY& y) {
  const Grid3& g = y.grid();
  auto sq = [&](int c) { return integrate_omega(y.comp(c), y.comp(c), g).real(); };
  double f1 = std::sqrt(sq(kF1));
  double u1 = std::sqrt(sq(1) + sq(2) + sq(3));
  double f2 = std::sqrt(sq(kF2));
  double u2 = std::sqrt(sq(5) + sq(6) + sq(7));
  return f1 + u1 + f2 + u2;
}

namespace {

void check_delta(double delta) {
  if (!(delta > -1.0 && delta < 1.0) || delta == 0.0)
    throw ConfigError("weighted_norm: delta must satisfy -1 < delta < 1, delta != 0");
}

double weighted_sq(std::span<const cplx> f, const Grid3& g, double delta) {
  const double h3 = g.h() * g.h() * g.h();
  double s = 0;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    Vec3 x = g.point(idx);
    double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    s += std::pow(1.0 + r2, delta) * std::norm(f[idx]);
  }
  return s * h3;
}

}  // namespace

double weighted_norm(std::span<const cplx> f, const Grid3& g, double delta) {
  check_delta(delta);
  return std::sqrt(weighted_sq(f, g, delta));
}

double weighted_norm(const ScalarField& f, double delta) { return weighted_norm(f.comp(0), f.grid(), delta); }

double weighted_norm(const StateY& y, double delta) {
  check_delta(delta);
  const Grid3& g = y.grid();
  auto sq = [&](int c) { return weighted_sq(y.comp(c), g, delta); };
  return std::sqrt(sq(0)) + std::sqrt(sq(1) + sq(2) + sq(3)) + std::sqrt(sq(4)) + std::sqrt(sq(5) + sq(6) + sq(7));
}

}  // namespace maxcgo
