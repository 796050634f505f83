#pragma once

#include <cmath>
#include <functional>
#include <random>

#include "maxcgo/grid.hpp"

namespace support {

using maxcgo::cplx;
using maxcgo::Grid3;
using maxcgo::Vec3;

// Random trigonometric polynomial with lattice modes |m_j| <= kmax.
template <int N>
maxcgo::Field<N> random_smooth(const Grid3& g, std::uint64_t seed, int kmax = 2, int terms = 6) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> mode(-kmax, kmax);
  std::normal_distribution<double> amp(0.0, 1.0);
  maxcgo::Field<N> f(g);
  for (int c = 0; c < N; ++c)
    for (int t = 0; t < terms; ++t) {
      double k[3] = {M_PI * mode(rng) / g.L(), M_PI * mode(rng) / g.L(), M_PI * mode(rng) / g.L()};
      cplx a(amp(rng), amp(rng));
      for (std::size_t i = 0; i < g.size(); ++i) {
        Vec3 x = g.point(i);
        f(c, i) += a * std::exp(cplx(0, k[0] * x[0] + k[1] * x[1] + k[2] * x[2]));
      }
    }
  return f;
}

inline double smooth_bump(const Vec3& x, const Vec3& c, double r) {
  double t = 0;
  for (int d = 0; d < 3; ++d) t += (x[d] - c[d]) * (x[d] - c[d]);
  t /= r * r;
  return t < 1 ? std::exp(-1.0 / (1.0 - t)) : 0.0;
}

// Random field made of C-infinity bumps centered at `center` with radius r.
template <int N>
maxcgo::Field<N> random_bumps(const Grid3& g, std::uint64_t seed, Vec3 center, double r) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> amp(0.0, 1.0);
  maxcgo::Field<N> f(g);
  for (int c = 0; c < N; ++c) {
    cplx a(amp(rng), amp(rng));
    double kx = amp(rng), ky = amp(rng);
    for (std::size_t i = 0; i < g.size(); ++i) {
      Vec3 x = g.point(i);
      f(c, i) = a * smooth_bump(x, center, r) * std::exp(cplx(0, kx * x[0] + ky * x[1]));
    }
  }
  return f;
}

template <int N>
double max_abs(const maxcgo::Field<N>& f) {
  double m = 0;
  for (const cplx& v : f.raw()) m = std::max(m, std::abs(v));
  return m;
}

template <int N>
double max_diff(const maxcgo::Field<N>& a, const maxcgo::Field<N>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.raw().size(); ++i) m = std::max(m, std::abs(a.raw()[i] - b.raw()[i]));
  return m;
}

// Adaptive Simpson on [a, b].
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol, int depth = 40) {
  auto simpson = [&](double l, double r, double fl, double fm, double fr) { return (r - l) / 6 * (fl + 4 * fm + fr); };
  std::function<double(double, double, double, double, double, double, int)> rec =
      [&](double l, double r, double fl, double fm, double fr, double whole, int d) {
        double m = 0.5 * (l + r), lm = 0.5 * (l + m), rm = 0.5 * (m + r);
        double flm = f(lm), frm = f(rm);
        double left = simpson(l, m, fl, flm, fm), right = simpson(m, r, fm, frm, fr);
        if (d <= 0 || std::abs(left + right - whole) < 15 * tol) return left + right + (left + right - whole) / 15;
        return rec(l, m, fl, flm, fm, left, d - 1) + rec(m, r, fm, frm, fr, right, d - 1);
      };
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return rec(a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), depth);
}

// Slope of least-squares line through (x, y).
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

// zeta = A e_re + i B e_im with zeta.zeta = k0sq and |zeta| = za; e_re, e_im orthonormal.
inline maxcgo::CVec3 test_zeta(double za, double k0sq, Vec3 e_re = {1, 0, 0}, Vec3 e_im = {0, 1, 0}) {
  double A = std::sqrt(0.5 * (za * za + k0sq)), B = std::sqrt(0.5 * (za * za - k0sq));
  return {cplx(A * e_re[0], B * e_im[0]), cplx(A * e_re[1], B * e_im[1]), cplx(A * e_re[2], B * e_im[2])};
}

}  // namespace support
