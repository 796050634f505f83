#pragma once

#include <array>
#include <vector>

#include "maxcgo/coefficients.hpp"
#include "maxcgo/grid.hpp"
#include "maxcgo/spectral.hpp"

namespace maxcgo {

using Vec8 = std::array<cplx, 8>;
using Mat8 = std::array<std::array<cplx, 8>, 8>;

Vec8 operator*(const Mat8& m, const Vec8& v);

// 8x8 matrix of scalar fields with an explicit sparsity pattern.
class BlockMatrixField {
 public:
  struct Entry {
    int row;
    int col;
    ScalarField value;
  };

  explicit BlockMatrixField(const Grid3& g);

  const Grid3& grid() const { return grid_; }
  const std::vector<Entry>& entries() const { return entries_; }
  bool has(int r, int c) const { return slot_[r * 8 + c] >= 0; }
  const ScalarField& get(int r, int c) const;

  // Adds v to entry (r, c), creating it if needed.
  void add(int r, int c, const ScalarField& v, cplx scale = 1.0);

  StateY apply(const StateY& y) const;
  Mat8 at(std::size_t node) const;

  BlockMatrixField transpose() const;
  BlockMatrixField conjugate() const;
  BlockMatrixField adjoint() const { return transpose().conjugate(); }

 private:
  Grid3 grid_;
  std::vector<Entry> entries_;
  std::array<int, 64> slot_;
};

// (1/i) M(A): the principal symbol matrix with A in place of D.
Mat8 P_symbol(const CVec3& A);

// P with D = (1/i) grad evaluated spectrally by `ops`.
StateY apply_P(const StateY& y, const SpectralOps& ops);

// Matrices built from the derived scalars of one coefficient pair.
BlockMatrixField assemble_W(const DerivedScalars& d);
BlockMatrixField assemble_Q(const DerivedScalars& d);
BlockMatrixField assemble_Q_prime(const DerivedScalars& d);
BlockMatrixField assemble_Q_hat(const DerivedScalars& d);
// Augmented-system potential V (unscaled fields).
BlockMatrixField assemble_V(const CoefficientPair& c, const DerivedScalars& d);

// (-Delta I8 + Q) Z.
StateY apply_schrodinger(const BlockMatrixField& Q, const StateY& z, const SpectralOps& ops);

// Diagonal rescaling maps: Y -> diag(a I4, b I4) Y.
struct RescaleMaps {
  ScalarField mu_inv_sqrt;
  ScalarField gamma_inv_sqrt;
  explicit RescaleMaps(const CoefficientPair& c);
  // diag(mu^-1/2 I4, gamma^-1/2 I4) Y
  StateY to_physical(const StateY& y) const;
  // diag(mu^1/2 I4, gamma^1/2 I4) X
  StateY to_rescaled(const StateY& x) const;
  // diag(gamma^-1/2 I4, mu^-1/2 I4) Y
  StateY swapped(const StateY& y) const;
};

// <P_N Y, Z>_dOmega on the six faces of Omega (trapezoid rule on face nodes).
cplx boundary_pairing(const StateY& y, const StateY& z);

}  // namespace maxcgo
