#include "maxcgo/modulated.hpp"

namespace maxcgo {

namespace {
const cplx I(0.0, 1.0);

Mat8 M_of(const CVec3& zeta) {
  Mat8 m = P_symbol(zeta);
  for (auto& row : m)
    for (auto& v : row) v *= I;
  return m;
}
}  // namespace

ModulatedState apply_P(const ModulatedState& y, const SpectralOps& ops) {
  const Grid3& g = y.grid();
  Mat8 m = M_of(y.zeta);
  ModulatedState out(y.zeta, m * y.constant, apply_P(y.fluct, ops));
  for (std::size_t i = 0; i < g.size(); ++i) {
    Vec8 f;
    for (int k = 0; k < 8; ++k) f[k] = y.fluct(k, i);
    Vec8 mf = m * f;
    for (int k = 0; k < 8; ++k) out.fluct(k, i) += mf[k];
  }
  return out;
}

ModulatedState multiply(const BlockMatrixField& a, const ModulatedState& y) {
  const Grid3& g = y.grid();
  Mat8 inf = a.at(0);
  ModulatedState out(y.zeta, inf * y.constant, a.apply(y.fluct));
  for (const auto& e : a.entries()) {
    cplx c = y.constant[e.col];
    if (c == 0.0) continue;
    cplx ainf = inf[e.row][e.col];
    auto o = out.fluct.comp(e.row);
    auto v = e.value.comp(0);
    for (std::size_t i = 0; i < g.size(); ++i) o[i] += (v[i] - ainf) * c;
  }
  return out;
}

ModulatedVector curl(const ModulatedVector& u, const SpectralOps& ops) {
  const Grid3& g = u.grid();
  const CVec3& z = u.zeta;
  auto cross = [&](const std::array<cplx, 3>& v) {
    return std::array<cplx, 3>{I * (z[1] * v[2] - z[2] * v[1]), I * (z[2] * v[0] - z[0] * v[2]),
                               I * (z[0] * v[1] - z[1] * v[0])};
  };
  ModulatedVector out(z, cross(u.constant), ops.curl(u.fluct));
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto c = cross({u.fluct(0, i), u.fluct(1, i), u.fluct(2, i)});
    for (int k = 0; k < 3; ++k) out.fluct(k, i) += c[k];
  }
  return out;
}

namespace {
ModulatedVector slot(const ModulatedState& y, int base) {
  ModulatedVector out(y.grid());
  out.zeta = y.zeta;
  for (int k = 0; k < 3; ++k) {
    out.constant[k] = y.constant[base + k];
    std::copy(y.fluct.comp(base + k).begin(), y.fluct.comp(base + k).end(), out.fluct.comp(k).begin());
  }
  return out;
}
}  // namespace

ModulatedVector slot_u1(const ModulatedState& y) { return slot(y, kU1); }
ModulatedVector slot_u2(const ModulatedState& y) { return slot(y, kU2); }

}  // namespace maxcgo
