#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "maxcgo/errors.hpp"

namespace maxcgo {

using cplx = std::complex<double>;
using Vec3 = std::array<double, 3>;
using CVec3 = std::array<cplx, 3>;

// Periodic box [-L, L]^3 with n nodes per axis, x_i = -L + i h.
// Omega = (-a, a)^3 must sit on node planes.
class Grid3 {
 public:
  Grid3(int n, double box_half_width, double omega_half_width);

  int n() const { return n_; }
  double L() const { return L_; }
  double a() const { return a_; }
  double h() const { return 2.0 * L_ / n_; }
  double rho() const;
  std::size_t size() const { return static_cast<std::size_t>(n_) * n_ * n_; }

  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(n_) * (j + static_cast<std::size_t>(n_) * k);
  }
  double coord(int i) const { return -L_ + i * h(); }
  Vec3 point(std::size_t idx) const;

  // Node index of x = -a and x = +a, and the number of cells across Omega.
  int omega_lo() const { return lo_; }
  int omega_hi() const { return lo_ + m_; }
  int omega_cells() const { return m_; }
  bool in_closed_omega(int i, int j, int k) const;

  // Fourier lattice wavenumber for FFT bin i (pi m / L, m in [-n/2, n/2)).
  double wavenumber(int i) const;

  bool operator==(const Grid3& o) const { return n_ == o.n_ && L_ == o.L_ && a_ == o.a_; }

 private:
  int n_;
  double L_;
  double a_;
  int lo_;
  int m_;
};

// Trapezoid weight of node i along one axis of closed Omega (0 outside).
double omega_axis_weight(const Grid3& g, int i);

template <int N>
class Field {
 public:
  static constexpr int components = N;

  explicit Field(const Grid3& g) : grid_(g), data_(static_cast<std::size_t>(N) * g.size()) {}

  const Grid3& grid() const { return grid_; }
  std::span<cplx> comp(int c) { return {data_.data() + c * grid_.size(), grid_.size()}; }
  std::span<const cplx> comp(int c) const { return {data_.data() + c * grid_.size(), grid_.size()}; }
  cplx& operator()(int c, std::size_t idx) { return data_[c * grid_.size() + idx]; }
  const cplx& operator()(int c, std::size_t idx) const { return data_[c * grid_.size() + idx]; }
  std::vector<cplx>& raw() { return data_; }
  const std::vector<cplx>& raw() const { return data_; }

  Field& operator+=(const Field& o) {
    check(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  Field& operator-=(const Field& o) {
    check(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  Field& operator*=(cplx s) {
    for (auto& v : data_) v *= s;
    return *this;
  }
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(cplx s, Field a) { return a *= s; }

 private:
  void check(const Field& o) const {
    if (!(grid_ == o.grid_)) throw GridMismatch();
  }
  Grid3 grid_;
  std::vector<cplx> data_;
};

using ScalarField = Field<1>;
using VectorField3 = Field<3>;
using StateY = Field<8>;

// Component groups of StateY: f1 = 0, u1 = 1..3, f2 = 4, u2 = 5..7.
inline constexpr int kF1 = 0;
inline constexpr int kU1 = 1;
inline constexpr int kF2 = 4;
inline constexpr int kU2 = 5;

ScalarField sample(const Grid3& g, const auto& fn) {
  ScalarField f(g);
  for (std::size_t idx = 0; idx < g.size(); ++idx) f(0, idx) = fn(g.point(idx));
  return f;
}

VectorField3 sample3(const Grid3& g, const auto& fn) {
  VectorField3 f(g);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    CVec3 v = fn(g.point(idx));
    for (int c = 0; c < 3; ++c) f(c, idx) = v[c];
  }
  return f;
}

// Integral over closed Omega of one component product u conj(v) (trapezoid rule).
cplx integrate_omega(std::span<const cplx> u, std::span<const cplx> v, const Grid3& g);

// <Y, Z>_Omega summed over components.
template <int N>
cplx inner_omega(const Field<N>& y, const Field<N>& z) {
  if (!(y.grid() == z.grid())) throw GridMismatch();
  cplx s = 0;
  for (int c = 0; c < N; ++c) s += integrate_omega(y.comp(c), z.comp(c), y.grid());
  return s;
}

double l2_omega(std::span<const cplx> u, const Grid3& g);

// L^2(Omega; Y) norm: sum over the four groups of their L^2 norms.
double group_norm_omega(const StateY& y);

// Weighted norm over the whole box, sum over groups of (int (1+|x|^2)^delta |.|^2)^(1/2).
double weighted_norm(const StateY& y, double delta);
double weighted_norm(const ScalarField& f, double delta);
double weighted_norm(std::span<const cplx> f, const Grid3& g, double delta);

}  // namespace maxcgo
