#pragma once

#include <functional>
#include <vector>

#include "maxcgo/grid.hpp"
#include "maxcgo/spectral.hpp"

namespace maxcgo {

// Face f = 2 * axis + (side > 0). Tangent axes follow cyclically.
struct FaceInfo {
  int axis;
  int side;  // -1 or +1
  int t1, t2;
};
FaceInfo face_info(int face);

// Samples on the (m+1)^2 nodes of each of the six faces of closed Omega.
// Tangential fields keep two components along (t1, t2); scalar fields one.
class BoundaryField {
 public:
  BoundaryField(const Grid3& g, int components);

  const Grid3& grid() const { return grid_; }
  int components() const { return comps_; }
  int side_nodes() const { return grid_.omega_cells() + 1; }
  std::size_t face_size() const { return static_cast<std::size_t>(side_nodes()) * side_nodes(); }

  // (p, q) run along t1, t2.
  cplx& at(int face, int comp, int p, int q) { return data_[offset(face, comp) + p + side_nodes() * q]; }
  const cplx& at(int face, int comp, int p, int q) const { return data_[offset(face, comp) + p + side_nodes() * q]; }
  std::span<cplx> plane(int face, int comp) { return {data_.data() + offset(face, comp), face_size()}; }
  std::span<const cplx> plane(int face, int comp) const { return {data_.data() + offset(face, comp), face_size()}; }

  // Grid node (i, j, k) of face node (p, q).
  std::array<int, 3> node(int face, int p, int q) const;
  Vec3 point(int face, int p, int q) const;

  std::vector<cplx>& raw() { return data_; }
  const std::vector<cplx>& raw() const { return data_; }

  BoundaryField& operator+=(const BoundaryField& o);
  BoundaryField& operator-=(const BoundaryField& o);
  BoundaryField& operator*=(cplx s);

 private:
  std::size_t offset(int face, int comp) const { return (static_cast<std::size_t>(face) * comps_ + comp) * face_size(); }
  Grid3 grid_;
  int comps_;
  std::vector<cplx> data_;
};

// N x u sampled from a vector-valued function of the grid node.
BoundaryField tangential_trace(const Grid3& g, const std::function<CVec3(int, int, int)>& u);
BoundaryField tangential_trace(const VectorField3& u);
BoundaryField normal_trace(const Grid3& g, const std::function<CVec3(int, int, int)>& u);
BoundaryField normal_trace(const VectorField3& u);

// Ambient tangential vector u = w x N, so that N x u = w.
CVec3 untrace(const BoundaryField& w, int face, int p, int q);

// Intrinsic surface divergence (second order, one-sided at face edges).
BoundaryField surface_divergence(const BoundaryField& w);
// -N . curl u on the faces (spectral curl of a node field).
BoundaryField surface_divergence_from_curl(const VectorField3& u, const SpectralOps& ops);

// Trapezoid L^2 norm and inner product over the six faces.
cplx boundary_inner(const BoundaryField& a, const BoundaryField& b);
double boundary_l2(const BoundaryField& w);

// Per-face B^{-1/2} proxy: even reflection, weight (1 + |k|^2)^{-1/2}.
double bminus_half_norm(const BoundaryField& w);
// ||w||_{B^-1/2} + ||Div w||_{B^-1/2}.
double th_norm(const BoundaryField& w);
// Hilbert form (||w||^2 + ||Div w||^2)^{1/2} and its feature map:
// the inner product of two fields is the Euclidean product of their features.
double th_hilbert_norm(const BoundaryField& w);
std::vector<cplx> th_features(const BoundaryField& w);

}  // namespace maxcgo
