#include "maxcgo/block_operators.hpp"

#include <cmath>

namespace maxcgo {

namespace {

const cplx I(0.0, 1.0);

template <class Fn>
ScalarField pointwise(const Grid3& g, Fn fn) {
  ScalarField f(g);
  for (std::size_t i = 0; i < g.size(); ++i) f(0, i) = fn(i);
  return f;
}

// Entries (j, k, axis, sign) of the matrix A x, i.e. (A x)_{jk} = sign * A_axis.
constexpr struct {
  int j, k, axis;
  double sign;
} kCross[6] = {{0, 1, 2, -1}, {0, 2, 1, 1}, {1, 0, 2, 1}, {1, 2, 0, -1}, {2, 0, 1, -1}, {2, 1, 0, 1}};

// D v = (1/i) grad v, component ax.
ScalarField D(const VectorField3& grad, int ax, bool conj = false) {
  return pointwise(grad.grid(), [&](std::size_t i) {
    cplx g = conj ? std::conj(grad(ax, i)) : grad(ax, i);
    return -I * g;
  });
}

// Dv.Dv = -grad v . grad v (bilinear).
ScalarField DdotD(const VectorField3& grad, bool conj = false) {
  return pointwise(grad.grid(), [&](std::size_t i) {
    cplx s = 0;
    for (int ax = 0; ax < 3; ++ax) {
      cplx g = conj ? std::conj(grad(ax, i)) : grad(ax, i);
      s += g * g;
    }
    return -s;
  });
}

// Adds sign * diag(lap, 2 hess - lap I3) to the 4x4 block starting at `base`.
void add_hessian_block(BlockMatrixField& m, int base, const ScalarField& lap, const std::array<ScalarField, 6>& hess,
                       double sign, bool conj) {
  const Grid3& g = m.grid();
  auto cj = [conj](cplx v) { return conj ? std::conj(v) : v; };
  m.add(base, base, pointwise(g, [&](std::size_t i) { return sign * cj(lap(0, i)); }));
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) {
      int slot = hessian_slot(j, k);
      m.add(base + 1 + j, base + 1 + k, pointwise(g, [&](std::size_t i) {
              cplx v = 2.0 * cj(hess[slot](0, i));
              if (j == k) v -= cj(lap(0, i));
              return sign * v;
            }));
    }
}

void add_diag_block(BlockMatrixField& m, int base, const ScalarField& v) {
  for (int c = 0; c < 4; ++c) m.add(base + c, base + c, v);
}

}  // namespace

Vec8 operator*(const Mat8& m, const Vec8& v) {
  Vec8 out{};
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c) out[r] += m[r][c] * v[c];
  return out;
}

BlockMatrixField::BlockMatrixField(const Grid3& g) : grid_(g) { slot_.fill(-1); }

const ScalarField& BlockMatrixField::get(int r, int c) const {
  int s = slot_[r * 8 + c];
  if (s < 0) throw ConfigError("BlockMatrixField: entry outside the sparsity pattern");
  return entries_[s].value;
}

void BlockMatrixField::add(int r, int c, const ScalarField& v, cplx scale) {
  if (!(v.grid() == grid_)) throw GridMismatch();
  int& s = slot_[r * 8 + c];
  if (s < 0) {
    s = static_cast<int>(entries_.size());
    entries_.push_back({r, c, ScalarField(grid_)});
  }
  auto dst = entries_[s].value.comp(0);
  auto src = v.comp(0);
  for (std::size_t i = 0; i < grid_.size(); ++i) dst[i] += scale * src[i];
}

StateY BlockMatrixField::apply(const StateY& y) const {
  if (!(y.grid() == grid_)) throw GridMismatch();
  StateY out(grid_);
  for (const auto& e : entries_) {
    auto dst = out.comp(e.row);
    auto src = y.comp(e.col);
    auto val = e.value.comp(0);
    for (std::size_t i = 0; i < grid_.size(); ++i) dst[i] += val[i] * src[i];
  }
  return out;
}

Mat8 BlockMatrixField::at(std::size_t node) const {
  Mat8 m{};
  for (const auto& e : entries_) m[e.row][e.col] = e.value(0, node);
  return m;
}

BlockMatrixField BlockMatrixField::transpose() const {
  BlockMatrixField t(grid_);
  for (const auto& e : entries_) t.add(e.col, e.row, e.value);
  return t;
}

BlockMatrixField BlockMatrixField::conjugate() const {
  BlockMatrixField t(grid_);
  for (const auto& e : entries_) {
    ScalarField v = e.value;
    for (auto& z : v.raw()) z = std::conj(z);
    t.add(e.row, e.col, v);
  }
  return t;
}

Mat8 P_symbol(const CVec3& A) {
  Mat8 m{};
  const cplx s = -I;  // 1/i
  for (int j = 0; j < 3; ++j) {
    m[kF1][kU2 + j] = s * A[j];
    m[kU1 + j][kF2] = s * A[j];
    m[kF2][kU1 + j] = s * A[j];
    m[kU2 + j][kF1] = s * A[j];
  }
  for (const auto& e : kCross) {
    m[kU1 + e.j][kU2 + e.k] = -s * e.sign * A[e.axis];
    m[kU2 + e.j][kU1 + e.k] = s * e.sign * A[e.axis];
  }
  return m;
}

StateY apply_P(const StateY& y, const SpectralOps& ops) {
  const Grid3& g = y.grid();
  if (!(g == ops.grid())) throw GridMismatch();
  std::array<std::vector<cplx>, 8> hat;
  for (int c = 0; c < 8; ++c) {
    hat[c].assign(y.comp(c).begin(), y.comp(c).end());
    ops.to_fourier(hat[c]);
  }
  StateY out(g);
  const int n = g.n();
  std::size_t idx = 0;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i, ++idx) {
        // D -> sigma in Fourier space
        const double s[3] = {ops.sigma(0, i), ops.sigma(1, j), ops.sigma(2, k)};
        cplx f1 = hat[kF1][idx], f2 = hat[kF2][idx];
        cplx u1[3] = {hat[1][idx], hat[2][idx], hat[3][idx]};
        cplx u2[3] = {hat[5][idx], hat[6][idx], hat[7][idx]};
        out(kF1, idx) = s[0] * u2[0] + s[1] * u2[1] + s[2] * u2[2];
        out(kF2, idx) = s[0] * u1[0] + s[1] * u1[1] + s[2] * u1[2];
        cplx c2[3] = {s[1] * u2[2] - s[2] * u2[1], s[2] * u2[0] - s[0] * u2[2], s[0] * u2[1] - s[1] * u2[0]};
        cplx c1[3] = {s[1] * u1[2] - s[2] * u1[1], s[2] * u1[0] - s[0] * u1[2], s[0] * u1[1] - s[1] * u1[0]};
        for (int a = 0; a < 3; ++a) {
          out(kU1 + a, idx) = s[a] * f2 - c2[a];
          out(kU2 + a, idx) = s[a] * f1 + c1[a];
        }
      }
  for (int c = 0; c < 8; ++c) ops.from_fourier(out.comp(c));
  return out;
}

BlockMatrixField assemble_W(const DerivedScalars& d) {
  const Grid3& g = d.kappa.grid();
  BlockMatrixField w(g);
  for (int c = 0; c < 8; ++c) w.add(c, c, d.kappa);
  for (int j = 0; j < 3; ++j) {
    ScalarField da = D(d.grad_alpha, j), db = D(d.grad_beta, j);
    w.add(kF1, kU2 + j, da, 0.5);
    w.add(kU1 + j, kF2, da, 0.5);
    w.add(kF2, kU1 + j, db, 0.5);
    w.add(kU2 + j, kF1, db, 0.5);
  }
  for (const auto& e : kCross) {
    w.add(kU1 + e.j, kU2 + e.k, D(d.grad_alpha, e.axis), 0.5 * e.sign);
    w.add(kU2 + e.j, kU1 + e.k, D(d.grad_beta, e.axis), -0.5 * e.sign);
  }
  return w;
}

BlockMatrixField assemble_Q(const DerivedScalars& d) {
  const Grid3& g = d.kappa.grid();
  BlockMatrixField q(g);
  add_hessian_block(q, 0, d.lap_alpha, d.hess_alpha, 0.5, false);
  add_hessian_block(q, 4, d.lap_beta, d.hess_beta, 0.5, false);
  ScalarField aa = DdotD(d.grad_alpha), bb = DdotD(d.grad_beta);
  add_diag_block(q, 0, pointwise(g, [&](std::size_t i) { return -(d.kappa(0, i) * d.kappa(0, i) + 0.25 * aa(0, i)); }));
  add_diag_block(q, 4, pointwise(g, [&](std::size_t i) { return -(d.kappa(0, i) * d.kappa(0, i) + 0.25 * bb(0, i)); }));
  for (int j = 0; j < 3; ++j) {
    ScalarField dk = D(d.grad_kappa, j);
    q.add(kF1, kU2 + j, dk, -2.0);
    q.add(kU1 + j, kF2, dk, -2.0);
    q.add(kF2, kU1 + j, dk, -2.0);
    q.add(kU2 + j, kF1, dk, -2.0);
  }
  return q;
}

BlockMatrixField assemble_Q_prime(const DerivedScalars& d) {
  const Grid3& g = d.kappa.grid();
  BlockMatrixField q(g);
  add_hessian_block(q, 0, d.lap_beta, d.hess_beta, -0.5, false);
  add_hessian_block(q, 4, d.lap_alpha, d.hess_alpha, -0.5, false);
  ScalarField aa = DdotD(d.grad_alpha), bb = DdotD(d.grad_beta);
  add_diag_block(q, 0, pointwise(g, [&](std::size_t i) { return -(d.kappa(0, i) * d.kappa(0, i) + 0.25 * bb(0, i)); }));
  add_diag_block(q, 4, pointwise(g, [&](std::size_t i) { return -(d.kappa(0, i) * d.kappa(0, i) + 0.25 * aa(0, i)); }));
  for (const auto& e : kCross) {
    ScalarField dk = D(d.grad_kappa, e.axis);
    q.add(kU1 + e.j, kU2 + e.k, dk, -2.0 * e.sign);
    q.add(kU2 + e.j, kU1 + e.k, dk, 2.0 * e.sign);
  }
  return q;
}

BlockMatrixField assemble_Q_hat(const DerivedScalars& d) {
  const Grid3& g = d.kappa.grid();
  BlockMatrixField q(g);
  add_hessian_block(q, 0, d.lap_beta, d.hess_beta, -0.5, true);
  add_hessian_block(q, 4, d.lap_alpha, d.hess_alpha, -0.5, true);
  ScalarField aa = DdotD(d.grad_alpha, true), bb = DdotD(d.grad_beta, true);
  auto kb2 = [&](std::size_t i) { return std::conj(d.kappa(0, i) * d.kappa(0, i)); };
  add_diag_block(q, 0, pointwise(g, [&](std::size_t i) { return -(kb2(i) + 0.25 * bb(0, i)); }));
  add_diag_block(q, 4, pointwise(g, [&](std::size_t i) { return -(kb2(i) + 0.25 * aa(0, i)); }));
  for (const auto& e : kCross) {
    ScalarField dk = D(d.grad_kappa, e.axis, true);
    q.add(kU1 + e.j, kU2 + e.k, dk, 2.0 * e.sign);
    q.add(kU2 + e.j, kU1 + e.k, dk, -2.0 * e.sign);
  }
  return q;
}

BlockMatrixField assemble_V(const CoefficientPair& c, const DerivedScalars& d) {
  const Grid3& g = c.grid();
  BlockMatrixField v(g);
  ScalarField wmu = pointwise(g, [&](std::size_t i) { return c.omega * c.mu(0, i); });
  ScalarField wgam = pointwise(g, [&](std::size_t i) { return c.omega * c.gamma(0, i); });
  add_diag_block(v, 0, wmu);
  add_diag_block(v, 4, wgam);
  for (int j = 0; j < 3; ++j) {
    ScalarField da = D(d.grad_alpha, j), db = D(d.grad_beta, j);
    v.add(kF1, kU2 + j, da);
    v.add(kU1 + j, kF2, da);
    v.add(kF2, kU1 + j, db);
    v.add(kU2 + j, kF1, db);
  }
  return v;
}

StateY apply_schrodinger(const BlockMatrixField& Q, const StateY& z, const SpectralOps& ops) {
  if (!(Q.grid() == z.grid())) throw GridMismatch();
  StateY out = Q.apply(z);
  for (int c = 0; c < 8; ++c) {
    ScalarField comp(z.grid());
    std::copy(z.comp(c).begin(), z.comp(c).end(), comp.comp(0).begin());
    ScalarField lap = ops.laplacian(comp);
    auto o = out.comp(c);
    for (std::size_t i = 0; i < z.grid().size(); ++i) o[i] -= lap(0, i);
  }
  return out;
}

RescaleMaps::RescaleMaps(const CoefficientPair& c)
    : mu_inv_sqrt(pointwise(c.grid(), [&](std::size_t i) { return 1.0 / std::sqrt(c.mu(0, i)); })),
      gamma_inv_sqrt(pointwise(c.grid(), [&](std::size_t i) { return 1.0 / std::sqrt(c.gamma(0, i)); })) {}

namespace {
StateY scale_blocks(const StateY& y, const ScalarField& top, const ScalarField& bottom, bool invert) {
  StateY out = y;
  for (int c = 0; c < 8; ++c) {
    const ScalarField& s = c < 4 ? top : bottom;
    auto o = out.comp(c);
    for (std::size_t i = 0; i < y.grid().size(); ++i) o[i] *= invert ? 1.0 / s(0, i) : s(0, i);
  }
  return out;
}
}  // namespace

StateY RescaleMaps::to_physical(const StateY& y) const { return scale_blocks(y, mu_inv_sqrt, gamma_inv_sqrt, false); }
StateY RescaleMaps::to_rescaled(const StateY& x) const { return scale_blocks(x, mu_inv_sqrt, gamma_inv_sqrt, true); }
StateY RescaleMaps::swapped(const StateY& y) const { return scale_blocks(y, gamma_inv_sqrt, mu_inv_sqrt, false); }

cplx boundary_pairing(const StateY& y, const StateY& z) {
  const Grid3& g = y.grid();
  if (!(g == z.grid())) throw GridMismatch();
  const int lo = g.omega_lo(), hi = g.omega_hi();
  const double h2 = g.h() * g.h();
  cplx total = 0;
  for (int d = 0; d < 3; ++d)
    for (int side : {-1, 1}) {
      CVec3 N{0, 0, 0};
      N[d] = side;
      Mat8 pn = P_symbol(N);
      int plane = side < 0 ? lo : hi;
      int t1 = (d + 1) % 3, t2 = (d + 2) % 3;
      for (int q = lo; q <= hi; ++q)
        for (int p = lo; p <= hi; ++p) {
          int c[3];
          c[d] = plane;
          c[t1] = p;
          c[t2] = q;
          std::size_t idx = g.index(c[0], c[1], c[2]);
          Vec8 yv, zv;
          for (int k = 0; k < 8; ++k) {
            yv[k] = y(k, idx);
            zv[k] = z(k, idx);
          }
          Vec8 py = pn * yv;
          cplx s = 0;
          for (int k = 0; k < 8; ++k) s += py[k] * std::conj(zv[k]);
          total += omega_axis_weight(g, p) * omega_axis_weight(g, q) * h2 * s;
        }
    }
  return total;
}

}  // namespace maxcgo
