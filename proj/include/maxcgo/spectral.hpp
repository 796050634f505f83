#pragma once

#include <array>
#include <span>
#include <vector>

#include "maxcgo/fft.hpp"
#include "maxcgo/grid.hpp"

namespace maxcgo {

// Periodic spectral calculus. With a Bloch shift s the fields are taken to
// be e^{i s.x} times a periodic function; derivatives act on the full field.
class SpectralOps {
 public:
  explicit SpectralOps(const Grid3& g, Vec3 bloch = {0.0, 0.0, 0.0});

  const Grid3& grid() const { return grid_; }
  const Vec3& bloch() const { return bloch_; }

  // d/dx_axis acts on Fourier bin `bin` as multiplication by i*sigma.
  // The Nyquist bin is zeroed on unshifted axes.
  double sigma(int axis, int bin) const { return sigma_[axis][bin]; }

  void to_fourier(std::span<cplx> data) const;
  void from_fourier(std::span<cplx> data) const;

  // Multiply every Fourier mode by fn(sx, sy, sz).
  template <class Fn>
  void apply_symbol(std::span<cplx> data, Fn fn) const {
    to_fourier(data);
    const int n = grid_.n();
    std::size_t idx = 0;
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i, ++idx) data[idx] *= fn(sigma_[0][i], sigma_[1][j], sigma_[2][k]);
    from_fourier(data);
  }

  ScalarField derivative(const ScalarField& f, int axis) const;
  VectorField3 grad(const ScalarField& f) const;
  ScalarField div(const VectorField3& u) const;
  VectorField3 curl(const VectorField3& u) const;
  ScalarField laplacian(const ScalarField& f) const;
  // Order xx, yy, zz, xy, xz, yz.
  std::array<ScalarField, 6> hessian(const ScalarField& f) const;

 private:
  Grid3 grid_;
  Vec3 bloch_;
  std::array<std::vector<double>, 3> sigma_;
  std::vector<cplx> phase_;  // e^{i s.x}, empty when s = 0
  Fft fft_;
};

inline constexpr std::array<std::array<int, 2>, 6> kHessianPairs{{{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}}};
inline int hessian_slot(int j, int k) {
  if (j == k) return j;
  if (j > k) std::swap(j, k);
  return j == 0 ? (k == 1 ? 3 : 4) : 5;
}

// Centered second-order differences with periodic wrap; 7-point Laplacian.
namespace stencil {
ScalarField derivative(const ScalarField& f, int axis);
VectorField3 grad(const ScalarField& f);
ScalarField div(const VectorField3& u);
VectorField3 curl(const VectorField3& u);
ScalarField laplacian(const ScalarField& f);
}  // namespace stencil

}  // namespace maxcgo
