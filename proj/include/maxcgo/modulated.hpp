#pragma once

#include <array>

#include "maxcgo/block_operators.hpp"
#include "maxcgo/grid.hpp"
#include "maxcgo/spectral.hpp"

namespace maxcgo {

// The field e^{i zeta.x} (c + F(x)) with c constant and F quasi-periodic
// (e^{i s.x} times periodic, s the Bloch shift of the ops used on it).
template <int N>
struct Modulated {
  CVec3 zeta{};
  std::array<cplx, N> constant{};
  Field<N> fluct;

  explicit Modulated(const Grid3& g) : fluct(g) {}
  Modulated(const CVec3& z, const std::array<cplx, N>& c, Field<N> f) : zeta(z), constant(c), fluct(std::move(f)) {}

  const Grid3& grid() const { return fluct.grid(); }

  // c + F at every node (the conjugated frame).
  Field<N> envelope() const {
    Field<N> out = fluct;
    for (int k = 0; k < N; ++k)
      for (auto& v : out.comp(k)) v += constant[k];
    return out;
  }
  // e^{i zeta.x}(c + F) at every node.
  Field<N> values() const {
    Field<N> out = envelope();
    const Grid3& g = grid();
    for (std::size_t i = 0; i < g.size(); ++i) {
      Vec3 x = g.point(i);
      cplx ph = std::exp(cplx(0, 1) * (zeta[0] * x[0] + zeta[1] * x[1] + zeta[2] * x[2]));
      for (int k = 0; k < N; ++k) out(k, i) *= ph;
    }
    return out;
  }

  Modulated& operator+=(const Modulated& o) {
    for (int k = 0; k < N; ++k) constant[k] += o.constant[k];
    fluct += o.fluct;
    return *this;
  }
  Modulated& operator-=(const Modulated& o) {
    for (int k = 0; k < N; ++k) constant[k] -= o.constant[k];
    fluct -= o.fluct;
    return *this;
  }
};

using ModulatedState = Modulated<8>;
using ModulatedVector = Modulated<3>;

// P applied to e^{i zeta.x}(c + F): e^{i zeta.x}(M(zeta)(c + F) + P F).
ModulatedState apply_P(const ModulatedState& y, const SpectralOps& ops);

// A(x) (c + F) = A_inf c + [(A - A_inf) c + A F]; A_inf is read at the box corner.
ModulatedState multiply(const BlockMatrixField& a, const ModulatedState& y);
// Scalar coefficient field times each component.
template <int N>
Modulated<N> multiply(const ScalarField& s, const Modulated<N>& y) {
  const cplx inf = s(0, 0);
  Modulated<N> out(y.zeta, {}, y.fluct);
  for (int k = 0; k < N; ++k) {
    out.constant[k] = inf * y.constant[k];
    auto o = out.fluct.comp(k);
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = s(0, i) * o[i] + (s(0, i) - inf) * y.constant[k];
  }
  return out;
}

// curl in the conjugated frame: e^{i zeta.x}(i zeta x (c + F) + curl F).
ModulatedVector curl(const ModulatedVector& u, const SpectralOps& ops);

ModulatedVector slot_u1(const ModulatedState& y);
ModulatedVector slot_u2(const ModulatedState& y);

}  // namespace maxcgo
