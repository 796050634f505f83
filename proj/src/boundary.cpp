#include "maxcgo/boundary.hpp"

#include <cmath>

#include "maxcgo/fft.hpp"

namespace maxcgo {

FaceInfo face_info(int face) {
  int d = face / 2;
  return {d, face % 2 ? 1 : -1, (d + 1) % 3, (d + 2) % 3};
}

BoundaryField::BoundaryField(const Grid3& g, int components)
    : grid_(g), comps_(components), data_(6 * static_cast<std::size_t>(components) * face_size()) {}

std::array<int, 3> BoundaryField::node(int face, int p, int q) const {
  FaceInfo f = face_info(face);
  std::array<int, 3> c{};
  c[f.axis] = f.side < 0 ? grid_.omega_lo() : grid_.omega_hi();
  c[f.t1] = grid_.omega_lo() + p;
  c[f.t2] = grid_.omega_lo() + q;
  return c;
}

Vec3 BoundaryField::point(int face, int p, int q) const {
  auto c = node(face, p, q);
  return {grid_.coord(c[0]), grid_.coord(c[1]), grid_.coord(c[2])};
}

BoundaryField& BoundaryField::operator+=(const BoundaryField& o) {
  if (!(grid_ == o.grid_) || comps_ != o.comps_) throw GridMismatch();
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

BoundaryField& BoundaryField::operator-=(const BoundaryField& o) {
  if (!(grid_ == o.grid_) || comps_ != o.comps_) throw GridMismatch();
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

BoundaryField& BoundaryField::operator*=(cplx s) {
  for (auto& v : data_) v *= s;
  return *this;
}

BoundaryField tangential_trace(const Grid3& g, const std::function<CVec3(int, int, int)>& u) {
  BoundaryField w(g, 2);
  const int s = w.side_nodes();
  for (int face = 0; face < 6; ++face) {
    FaceInfo f = face_info(face);
    for (int q = 0; q < s; ++q)
      for (int p = 0; p < s; ++p) {
        auto c = w.node(face, p, q);
        CVec3 v = u(c[0], c[1], c[2]);
        w.at(face, 0, p, q) = -double(f.side) * v[f.t2];
        w.at(face, 1, p, q) = double(f.side) * v[f.t1];
      }
  }
  return w;
}

BoundaryField tangential_trace(const VectorField3& u) {
  const Grid3& g = u.grid();
  return tangential_trace(g, [&](int i, int j, int k) {
    std::size_t idx = g.index(i, j, k);
    return CVec3{u(0, idx), u(1, idx), u(2, idx)};
  });
}

BoundaryField normal_trace(const Grid3& g, const std::function<CVec3(int, int, int)>& u) {
  BoundaryField w(g, 1);
  const int s = w.side_nodes();
  for (int face = 0; face < 6; ++face) {
    FaceInfo f = face_info(face);
    for (int q = 0; q < s; ++q)
      for (int p = 0; p < s; ++p) {
        auto c = w.node(face, p, q);
        w.at(face, 0, p, q) = double(f.side) * u(c[0], c[1], c[2])[f.axis];
      }
  }
  return w;
}

BoundaryField normal_trace(const VectorField3& u) {
  const Grid3& g = u.grid();
  return normal_trace(g, [&](int i, int j, int k) {
    std::size_t idx = g.index(i, j, k);
    return CVec3{u(0, idx), u(1, idx), u(2, idx)};
  });
}

CVec3 untrace(const BoundaryField& w, int face, int p, int q) {
  FaceInfo f = face_info(face);
  CVec3 u{};
  u[f.t1] = double(f.side) * w.at(face, 1, p, q);
  u[f.t2] = -double(f.side) * w.at(face, 0, p, q);
  return u;
}

namespace {

// Second-order first derivative along a line of s samples with spacing h.
cplx line_derivative(const std::function<cplx(int)>& v, int i, int s, double h) {
  if (i == 0) return (-3.0 * v(0) + 4.0 * v(1) - v(2)) / (2 * h);
  if (i == s - 1) return (3.0 * v(s - 1) - 4.0 * v(s - 2) + v(s - 3)) / (2 * h);
  return (v(i + 1) - v(i - 1)) / (2 * h);
}

double face_weight(int p, int s) { return (p == 0 || p == s - 1) ? 0.5 : 1.0; }

}  // namespace

BoundaryField surface_divergence(const BoundaryField& w) {
  if (w.components() != 2) throw ConfigError("surface divergence needs a tangential field");
  BoundaryField d(w.grid(), 1);
  const int s = w.side_nodes();
  const double h = w.grid().h();
  for (int face = 0; face < 6; ++face)
    for (int q = 0; q < s; ++q)
      for (int p = 0; p < s; ++p) {
        cplx dp = line_derivative([&](int i) { return w.at(face, 0, i, q); }, p, s, h);
        cplx dq = line_derivative([&](int i) { return w.at(face, 1, p, i); }, q, s, h);
        d.at(face, 0, p, q) = dp + dq;
      }
  return d;
}

BoundaryField surface_divergence_from_curl(const VectorField3& u, const SpectralOps& ops) {
  VectorField3 c = ops.curl(u);
  BoundaryField n = normal_trace(c);
  n *= -1.0;
  return n;
}

cplx boundary_inner(const BoundaryField& a, const BoundaryField& b) {
  if (!(a.grid() == b.grid()) || a.components() != b.components()) throw GridMismatch();
  const int s = a.side_nodes();
  const double h2 = a.grid().h() * a.grid().h();
  cplx total = 0;
  for (int face = 0; face < 6; ++face)
    for (int c = 0; c < a.components(); ++c)
      for (int q = 0; q < s; ++q)
        for (int p = 0; p < s; ++p)
          total += face_weight(p, s) * face_weight(q, s) * h2 * a.at(face, c, p, q) * std::conj(b.at(face, c, p, q));
  return total;
}

double boundary_l2(const BoundaryField& w) { return std::sqrt(boundary_inner(w, w).real()); }

namespace {

// Weighted spectrum of one face component, scaled so that squared magnitudes
// sum to the B^{-1/2} norm squared.
void append_face_features(std::span<const cplx> plane, int m, double h, std::vector<cplx>& out) {
  const int r = 2 * m;
  std::vector<cplx> buf(static_cast<std::size_t>(r) * r);
  auto refl = [&](int i) { return i <= m ? i : r - i; };
  for (int q = 0; q < r; ++q)
    for (int p = 0; p < r; ++p) buf[p + r * q] = plane[refl(p) + (m + 1) * refl(q)];
  Fft fft({r, r});
  fft.forward(buf.data());
  const double a2 = m * h;  // face width 2a
  const double norm = h / (2.0 * r);
  for (int q = 0; q < r; ++q)
    for (int p = 0; p < r; ++p) {
      int jp = p <= r / 2 ? p : p - r, jq = q <= r / 2 ? q : q - r;
      double kp = M_PI * jp / a2, kq = M_PI * jq / a2;
      double wgt = std::pow(1.0 + kp * kp + kq * kq, -0.25);
      out.push_back(buf[p + r * q] * (wgt * norm));
    }
}

std::vector<cplx> bminus_features(const BoundaryField& w) {
  std::vector<cplx> out;
  const int m = w.grid().omega_cells();
  for (int face = 0; face < 6; ++face)
    for (int c = 0; c < w.components(); ++c) append_face_features(w.plane(face, c), m, w.grid().h(), out);
  return out;
}

double sq_norm(const std::vector<cplx>& v) {
  double s = 0;
  for (const cplx& x : v) s += std::norm(x);
  return s;
}

}  // namespace

double bminus_half_norm(const BoundaryField& w) { return std::sqrt(sq_norm(bminus_features(w))); }

double th_norm(const BoundaryField& w) { return bminus_half_norm(w) + bminus_half_norm(surface_divergence(w)); }

double th_hilbert_norm(const BoundaryField& w) { return std::sqrt(sq_norm(th_features(w))); }

std::vector<cplx> th_features(const BoundaryField& w) {
  std::vector<cplx> out = bminus_features(w);
  std::vector<cplx> d = bminus_features(surface_divergence(w));
  out.insert(out.end(), d.begin(), d.end());
  return out;
}

}  // namespace maxcgo
