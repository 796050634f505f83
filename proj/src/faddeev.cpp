#include "maxcgo/faddeev.hpp"

#include <cmath>
#include <string>

namespace maxcgo {

double zeta_abs(const CVec3& z) { return std::sqrt(std::norm(z[0]) + std::norm(z[1]) + std::norm(z[2])); }

cplx bilinear(const CVec3& a, const CVec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 faddeev_bloch_shift(const Grid3& g, const CVec3& zeta, bool enabled) {
  if (!enabled) return {0.0, 0.0, 0.0};
  Vec3 im{zeta[0].imag(), zeta[1].imag(), zeta[2].imag()};
  double n = std::sqrt(im[0] * im[0] + im[1] * im[1] + im[2] * im[2]);
  double s = M_PI / (2.0 * g.L()) / n;
  return {s * im[0], s * im[1], s * im[2]};
}

namespace {
const FaddeevConfig& validated(const FaddeevConfig& cfg, double k0sq) {
  double im = std::sqrt(std::pow(cfg.zeta[0].imag(), 2) + std::pow(cfg.zeta[1].imag(), 2) + std::pow(cfg.zeta[2].imag(), 2));
  if (!(im > 0)) throw ConfigError("faddeev: Im zeta must be nonzero");
  double za = zeta_abs(cfg.zeta);
  if (std::abs(bilinear(cfg.zeta, cfg.zeta) - k0sq) > 1e-12 * std::max(k0sq, za * za))
    throw ConfigError("faddeev: zeta.zeta differs from omega^2 eps0 mu0");
  if (!(cfg.delta > -1.0 && cfg.delta < 0.0)) throw ConfigError("faddeev: delta must lie in (-1, 0)");
  if (!(cfg.symbol_floor > 0)) throw ConfigError("faddeev: symbol floor must be positive");
  return cfg;
}
}  // namespace

FaddeevOperator::FaddeevOperator(const Grid3& g, const FaddeevConfig& cfg, double k0sq)
    : cfg_(validated(cfg, k0sq)), ops_(g, faddeev_bloch_shift(g, cfg.zeta, cfg.lattice_shift)) {
  const int n = g.n();
  const double za = zeta_abs(cfg.zeta);
  const double floor = cfg.symbol_floor * za * za;
  inv_symbol_.resize(g.size());
  std::size_t idx = 0;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i, ++idx) {
        double s[3] = {ops_.sigma(0, i), ops_.sigma(1, j), ops_.sigma(2, k)};
        cplx sym = s[0] * s[0] + s[1] * s[1] + s[2] * s[2] + 2.0 * (cfg.zeta[0] * s[0] + cfg.zeta[1] * s[1] + cfg.zeta[2] * s[2]);
        if (std::abs(sym) < floor) {
          inv_symbol_[idx] = 0.0;
          ++floored_;
        } else {
          inv_symbol_[idx] = 1.0 / sym;
        }
      }
  if (floored_ > g.size() / 100)
    throw NumericError(NumericFailure::SingularSymbol,
                       std::to_string(floored_) + " Faddeev symbol modes below the floor (more than 1%)");
}

void FaddeevOperator::apply_inplace(std::span<cplx> data) const {
  ops_.to_fourier(data);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] *= inv_symbol_[i];
  ops_.from_fourier(data);
}

double gzeta_derivative_bound(const FaddeevOperator& G, const ScalarField& f) {
  double denom = weighted_norm(f, G.config().delta + 1.0);
  if (denom == 0.0) return 0.0;
  ScalarField u = G.apply(f);
  double best = 0;
  for (int ax = 0; ax < 3; ++ax) best = std::max(best, weighted_norm(G.ops().derivative(u, ax), G.config().delta));
  return best / denom;
}

}  // namespace maxcgo
