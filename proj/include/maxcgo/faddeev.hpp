#pragma once

#include <vector>

#include "maxcgo/grid.hpp"
#include "maxcgo/spectral.hpp"

namespace maxcgo {

struct FaddeevConfig {
  CVec3 zeta{};
  double delta = -0.5;
  double symbol_floor = 1e-6;  // relative to |zeta|^2
  bool lattice_shift = true;
};

double zeta_abs(const CVec3& z);
cplx bilinear(const CVec3& a, const CVec3& b);

// Half-lattice offset (pi / 2L) along Im zeta, or zero.
Vec3 faddeev_bloch_shift(const Grid3& g, const CVec3& zeta, bool enabled);

// G_zeta = (-Delta - 2i zeta.grad)^{-1} on the (shifted) periodic lattice.
class FaddeevOperator {
 public:
  // k0sq = omega^2 eps0 mu0, the required value of zeta.zeta.
  FaddeevOperator(const Grid3& g, const FaddeevConfig& cfg, double k0sq);

  const FaddeevConfig& config() const { return cfg_; }
  const SpectralOps& ops() const { return ops_; }
  std::size_t floored_modes() const { return floored_; }

  void apply_inplace(std::span<cplx> data) const;
  template <int N>
  Field<N> apply(const Field<N>& f) const {
    Field<N> out = f;
    for (int c = 0; c < N; ++c) apply_inplace(out.comp(c));
    return out;
  }

 private:
  FaddeevConfig cfg_;
  SpectralOps ops_;
  std::vector<cplx> inv_symbol_;
  std::size_t floored_ = 0;
};

// max_j ||d_j G f||_{L^2_delta} / ||f||_{L^2_{delta+1}}
double gzeta_derivative_bound(const FaddeevOperator& G, const ScalarField& f);

}  // namespace maxcgo
