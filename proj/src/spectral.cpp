#include "maxcgo/spectral.hpp"

#include <cmath>

namespace maxcgo {

SpectralOps::SpectralOps(const Grid3& g, Vec3 bloch) : grid_(g), bloch_(bloch), fft_(box_fft(g.n())) {
  const int n = g.n();
  for (int ax = 0; ax < 3; ++ax) {
    sigma_[ax].resize(n);
    for (int i = 0; i < n; ++i) {
      double k = g.wavenumber(i) + bloch[ax];
      if (bloch[ax] == 0.0 && i == n / 2) k = 0.0;
      sigma_[ax][i] = k;
    }
  }
  if (bloch[0] != 0.0 || bloch[1] != 0.0 || bloch[2] != 0.0) {
    phase_.resize(g.size());
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
      Vec3 x = g.point(idx);
      phase_[idx] = std::polar(1.0, bloch[0] * x[0] + bloch[1] * x[1] + bloch[2] * x[2]);
    }
  }
}

void SpectralOps::to_fourier(std::span<cplx> data) const {
  if (!phase_.empty())
    for (std::size_t i = 0; i < data.size(); ++i) data[i] *= std::conj(phase_[i]);
  fft_.forward(data.data());
}

void SpectralOps::from_fourier(std::span<cplx> data) const {
  fft_.backward(data.data());
  const double inv = 1.0 / static_cast<double>(data.size());
  if (phase_.empty()) {
    for (auto& v : data) v *= inv;
  } else {
    for (std::size_t i = 0; i < data.size(); ++i) data[i] *= inv * phase_[i];
  }
}

ScalarField SpectralOps::derivative(const ScalarField& f, int axis) const {
  ScalarField out = f;
  apply_symbol(out.comp(0), [axis](double sx, double sy, double sz) {
    double s = axis == 0 ? sx : (axis == 1 ? sy : sz);
    return cplx(0.0, s);
  });
  return out;
}

VectorField3 SpectralOps::grad(const ScalarField& f) const {
  VectorField3 out(grid_);
  std::vector<cplx> hat(f.comp(0).begin(), f.comp(0).end());
  to_fourier(hat);
  const int n = grid_.n();
  for (int ax = 0; ax < 3; ++ax) {
    auto o = out.comp(ax);
    std::size_t idx = 0;
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i, ++idx) {
          double s = ax == 0 ? sigma_[0][i] : (ax == 1 ? sigma_[1][j] : sigma_[2][k]);
          o[idx] = cplx(0.0, s) * hat[idx];
        }
    from_fourier(o);
  }
  return out;
}

ScalarField SpectralOps::div(const VectorField3& u) const {
  ScalarField out(grid_);
  auto o = out.comp(0);
  const int n = grid_.n();
  std::vector<cplx> hat(grid_.size());
  for (int ax = 0; ax < 3; ++ax) {
    std::copy(u.comp(ax).begin(), u.comp(ax).end(), hat.begin());
    to_fourier(hat);
    std::size_t idx = 0;
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i, ++idx) {
          double s = ax == 0 ? sigma_[0][i] : (ax == 1 ? sigma_[1][j] : sigma_[2][k]);
          o[idx] += cplx(0.0, s) * hat[idx];
        }
  }
  from_fourier(o);
  return out;
}

VectorField3 SpectralOps::curl(const VectorField3& u) const {
  std::array<std::vector<cplx>, 3> hat;
  for (int ax = 0; ax < 3; ++ax) {
    hat[ax].assign(u.comp(ax).begin(), u.comp(ax).end());
    to_fourier(hat[ax]);
  }
  VectorField3 out(grid_);
  const int n = grid_.n();
  std::size_t idx = 0;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i, ++idx) {
        cplx dx(0.0, sigma_[0][i]), dy(0.0, sigma_[1][j]), dz(0.0, sigma_[2][k]);
        out(0, idx) = dy * hat[2][idx] - dz * hat[1][idx];
        out(1, idx) = dz * hat[0][idx] - dx * hat[2][idx];
        out(2, idx) = dx * hat[1][idx] - dy * hat[0][idx];
      }
  for (int ax = 0; ax < 3; ++ax) from_fourier(out.comp(ax));
  return out;
}

ScalarField SpectralOps::laplacian(const ScalarField& f) const {
  ScalarField out = f;
  apply_symbol(out.comp(0), [](double sx, double sy, double sz) { return cplx(-(sx * sx + sy * sy + sz * sz), 0.0); });
  return out;
}

std::array<ScalarField, 6> SpectralOps::hessian(const ScalarField& f) const {
  std::vector<cplx> hat(f.comp(0).begin(), f.comp(0).end());
  to_fourier(hat);
  std::array<ScalarField, 6> out{ScalarField(grid_), ScalarField(grid_), ScalarField(grid_),
                                 ScalarField(grid_), ScalarField(grid_), ScalarField(grid_)};
  const int n = grid_.n();
  for (int p = 0; p < 6; ++p) {
    auto [a, b] = kHessianPairs[p];
    auto o = out[p].comp(0);
    std::size_t idx = 0;
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i, ++idx) {
          std::array<double, 3> s{sigma_[0][i], sigma_[1][j], sigma_[2][k]};
          o[idx] = -s[a] * s[b] * hat[idx];
        }
    from_fourier(o);
  }
  return out;
}

namespace stencil {

namespace {
std::size_t shifted(const Grid3& g, std::size_t idx, int axis, int d) {
  const int n = g.n();
  int c[3] = {static_cast<int>(idx % n), static_cast<int>((idx / n) % n), static_cast<int>(idx / (std::size_t(n) * n))};
  c[axis] = (c[axis] + d + n) % n;
  return g.index(c[0], c[1], c[2]);
}

void centered(std::span<const cplx> f, std::span<cplx> out, const Grid3& g, int axis, bool accumulate) {
  const double inv = 1.0 / (2.0 * g.h());
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    cplx d = (f[shifted(g, idx, axis, 1)] - f[shifted(g, idx, axis, -1)]) * inv;
    out[idx] = accumulate ? out[idx] + d : d;
  }
}
}  // namespace

ScalarField derivative(const ScalarField& f, int axis) {
  ScalarField out(f.grid());
  centered(f.comp(0), out.comp(0), f.grid(), axis, false);
  return out;
}

VectorField3 grad(const ScalarField& f) {
  VectorField3 out(f.grid());
  for (int ax = 0; ax < 3; ++ax) centered(f.comp(0), out.comp(ax), f.grid(), ax, false);
  return out;
}

ScalarField div(const VectorField3& u) {
  ScalarField out(u.grid());
  for (int ax = 0; ax < 3; ++ax) centered(u.comp(ax), out.comp(0), u.grid(), ax, true);
  return out;
}

VectorField3 curl(const VectorField3& u) {
  const Grid3& g = u.grid();
  VectorField3 out(g);
  std::vector<cplx> tmp(g.size());
  for (int ax = 0; ax < 3; ++ax) {
    int p = (ax + 1) % 3, q = (ax + 2) % 3;
    // (curl u)_ax = d_p u_q - d_q u_p
    centered(u.comp(q), out.comp(ax), g, p, false);
    centered(u.comp(p), tmp, g, q, false);
    auto o = out.comp(ax);
    for (std::size_t i = 0; i < g.size(); ++i) o[i] -= tmp[i];
  }
  return out;
}

ScalarField laplacian(const ScalarField& f) {
  const Grid3& g = f.grid();
  ScalarField out(g);
  const double inv = 1.0 / (g.h() * g.h());
  auto in = f.comp(0);
  auto o = out.comp(0);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    cplx s = -6.0 * in[idx];
    for (int ax = 0; ax < 3; ++ax) s += in[shifted(g, idx, ax, 1)] + in[shifted(g, idx, ax, -1)];
    o[idx] = s * inv;
  }
  return out;
}

}  // namespace stencil

}  // namespace maxcgo
