#include "maxcgo/forward.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <string>

namespace maxcgo {

namespace {

const cplx I(0.0, 1.0);

using SpMat = Eigen::SparseMatrix<cplx, Eigen::ColMajor, int>;
using CVec = Eigen::VectorXcd;

// Staggered index spaces of closed Omega with m cells per axis.
struct Staggered {
  int m;
  std::size_t per_dir_edges, per_dir_faces;

  explicit Staggered(int cells)
      : m(cells),
        per_dir_edges(static_cast<std::size_t>(cells) * (cells + 1) * (cells + 1)),
        per_dir_faces(static_cast<std::size_t>(cells + 1) * cells * cells) {}

  // Edges along d: c[d] in [0, m), others in [0, m].
  std::size_t edge(int d, const std::array<int, 3>& c) const {
    int s[3] = {m + 1, m + 1, m + 1};
    s[d] = m;
    return d * per_dir_edges + c[0] + static_cast<std::size_t>(s[0]) * (c[1] + static_cast<std::size_t>(s[1]) * c[2]);
  }
  // Faces normal to d: c[d] in [0, m], others in [0, m).
  std::size_t face(int d, const std::array<int, 3>& c) const {
    int s[3] = {m, m, m};
    s[d] = m + 1;
    return d * per_dir_faces + c[0] + static_cast<std::size_t>(s[0]) * (c[1] + static_cast<std::size_t>(s[1]) * c[2]);
  }
  std::size_t edges() const { return 3 * per_dir_edges; }
  std::size_t faces() const { return 3 * per_dir_faces; }

  template <class Fn>
  void for_edges(Fn fn) const {
    for (int d = 0; d < 3; ++d) {
      int s[3] = {m + 1, m + 1, m + 1};
      s[d] = m;
      for (int k = 0; k < s[2]; ++k)
        for (int j = 0; j < s[1]; ++j)
          for (int i = 0; i < s[0]; ++i) fn(d, std::array<int, 3>{i, j, k});
    }
  }
  template <class Fn>
  void for_faces(Fn fn) const {
    for (int d = 0; d < 3; ++d) {
      int s[3] = {m, m, m};
      s[d] = m + 1;
      for (int k = 0; k < s[2]; ++k)
        for (int j = 0; j < s[1]; ++j)
          for (int i = 0; i < s[0]; ++i) fn(d, std::array<int, 3>{i, j, k});
    }
  }
  bool boundary_edge(int d, const std::array<int, 3>& c) const {
    for (int a = 0; a < 3; ++a)
      if (a != d && (c[a] == 0 || c[a] == m)) return true;
    return false;
  }
};

std::array<int, 3> shifted(std::array<int, 3> c, int axis, int by = 1) {
  c[axis] += by;
  return c;
}

// Value at node position c of samples living at half-integer positions k + 1/2, k in [0, m).
template <class Fn>
cplx half_to_node(Fn v, int c, int m) {
  if (c == 0) return 1.5 * v(0) - 0.5 * v(1);
  if (c == m) return 1.5 * v(m - 1) - 0.5 * v(m - 2);
  return 0.5 * (v(c - 1) + v(c));
}

}  // namespace

struct ForwardSolver::Impl {
  Grid3 grid;
  double omega;
  Staggered st;
  std::vector<int> unknown;           // edge -> interior unknown or -1
  std::vector<std::size_t> interior;  // unknown -> edge
  std::vector<cplx> mu_face;          // mu averaged to faces
  SpMat A, B;                         // interior block and interior-boundary coupling
  std::vector<cplx> mass;             // gamma at interior edges
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;

  double residual_tol = 1e-8;

  Impl(const CoefficientPair& c) : grid(c.grid()), omega(c.omega), st(c.grid().omega_cells()) {}

  cplx node_value(const ScalarField& f, const std::array<int, 3>& c) const {
    const int lo = grid.omega_lo();
    return f(0, grid.index(lo + c[0], lo + c[1], lo + c[2]));
  }

  // Face circulation stencil: (edge, coefficient) pairs of (curl E)_d on face (d, c).
  std::array<std::pair<std::size_t, double>, 4> curl_stencil(int d, const std::array<int, 3>& c) const {
    const int t1 = (d + 1) % 3, t2 = (d + 2) % 3;
    const double ih = 1.0 / grid.h();
    return {{{st.edge(t2, shifted(c, t1)), ih},
             {st.edge(t2, c), -ih},
             {st.edge(t1, shifted(c, t2)), -ih},
             {st.edge(t1, c), ih}}};
  }

  std::vector<cplx> boundary_edges(const BoundaryField& T) const {
    std::vector<cplx> e(st.edges(), 0.0);
    const int m = st.m;
    st.for_edges([&](int d, const std::array<int, 3>& c) {
      if (!st.boundary_edge(d, c)) return;
      cplx sum = 0;
      int count = 0;
      for (int a = 0; a < 3; ++a) {
        if (a == d || (c[a] != 0 && c[a] != m)) continue;
        int face = 2 * a + (c[a] == m ? 1 : 0);
        FaceInfo f = face_info(face);
        auto end = shifted(c, d);
        CVec3 u0 = untrace(T, face, c[f.t1], c[f.t2]);
        CVec3 u1 = untrace(T, face, end[f.t1], end[f.t2]);
        sum += 0.5 * (u0[d] + u1[d]);
        ++count;
      }
      e[st.edge(d, c)] = sum / double(count);
    });
    return e;
  }

  ForwardSolution finish(const BoundaryField& T, const std::vector<cplx>& edges, double residual) const {
    ForwardSolution out{VectorField3(grid), VectorField3(grid), T, BoundaryField(grid, 2), residual};
    const int m = st.m, lo = grid.omega_lo();
    std::vector<cplx> h(st.faces());
    st.for_faces([&](int d, const std::array<int, 3>& c) {
      cplx curl = 0;
      for (auto [e, w] : curl_stencil(d, c)) curl += w * edges[e];
      std::size_t f = st.face(d, c);
      h[f] = curl / (I * omega * mu_face[f]);
    });
    for (int k = 0; k <= m; ++k)
      for (int j = 0; j <= m; ++j)
        for (int i = 0; i <= m; ++i) {
          std::array<int, 3> c{i, j, k};
          std::size_t idx = grid.index(lo + i, lo + j, lo + k);
          for (int d = 0; d < 3; ++d) {
            out.E(d, idx) = half_to_node(
                [&](int s) {
                  auto cc = c;
                  cc[d] = s;
                  return edges[st.edge(d, cc)];
                },
                c[d], m);
            const int t1 = (d + 1) % 3, t2 = (d + 2) % 3;
            out.H(d, idx) = half_to_node(
                [&](int s2) {
                  return half_to_node(
                      [&](int s1) {
                        auto cc = c;
                        cc[t1] = s1;
                        cc[t2] = s2;
                        return h[st.face(d, cc)];
                      },
                      c[t1], m);
                },
                c[t2], m);
          }
        }
    out.S = tangential_trace(out.H);
    return out;
  }
};

ForwardSolver::ForwardSolver(const CoefficientPair& c, const ForwardOptions& opts) : impl_(std::make_unique<Impl>(c)) {
  Impl& s = *impl_;
  const Staggered& st = s.st;
  s.residual_tol = opts.residual_tol;
  if (st.m < 3) throw ConfigError("forward solver needs at least 3 cells across Omega");
  s.unknown.assign(st.edges(), -1);
  st.for_edges([&](int d, const std::array<int, 3>& e) {
    if (st.boundary_edge(d, e)) return;
    std::size_t id = st.edge(d, e);
    s.unknown[id] = static_cast<int>(s.interior.size());
    s.interior.push_back(id);
  });
  s.mu_face.resize(st.faces());
  std::vector<Eigen::Triplet<cplx>> ta, tb;
  st.for_faces([&](int d, const std::array<int, 3>& f) {
    const int t1 = (d + 1) % 3, t2 = (d + 2) % 3;
    cplx mu = 0.25 * (s.node_value(c.mu, f) + s.node_value(c.mu, shifted(f, t1)) + s.node_value(c.mu, shifted(f, t2)) +
                      s.node_value(c.mu, shifted(shifted(f, t1), t2)));
    s.mu_face[st.face(d, f)] = mu;
    auto sten = s.curl_stencil(d, f);
    for (auto [e1, w1] : sten) {
      int r = s.unknown[e1];
      if (r < 0) continue;
      for (auto [e2, w2] : sten) {
        cplx v = w1 * w2 / mu;
        int col = s.unknown[e2];
        if (col >= 0) ta.emplace_back(r, col, v);
        else tb.emplace_back(r, static_cast<int>(e2), v);
      }
    }
  });
  const double w2 = c.omega * c.omega;
  st.for_edges([&](int d, const std::array<int, 3>& e) {
    int r = s.unknown[st.edge(d, e)];
    if (r < 0) return;
    cplx gam = 0.5 * (s.node_value(c.gamma, e) + s.node_value(c.gamma, shifted(e, d)));
    ta.emplace_back(r, r, -w2 * gam);
    s.mass.push_back(gam);
  });
  const int n = static_cast<int>(s.interior.size());
  s.A.resize(n, n);
  s.A.setFromTriplets(ta.begin(), ta.end());
  s.B.resize(n, static_cast<int>(st.edges()));
  s.B.setFromTriplets(tb.begin(), tb.end());
  s.A.makeCompressed();
  s.lu.compute(s.A);
  if (s.lu.info() != Eigen::Success)
    throw NumericError(NumericFailure::NearResonance, "forward system is singular at this frequency");

  if (opts.estimate_condition) {
    // Hager's estimate of ||A^-1||_1; A is complex symmetric, so A^-H y = conj(A^-1 conj y).
    double anorm = 0;
    for (int col = 0; col < n; ++col) {
      double sum = 0;
      for (SpMat::InnerIterator it(s.A, col); it; ++it) sum += std::abs(it.value());
      anorm = std::max(anorm, sum);
    }
    CVec x = CVec::Constant(n, cplx(1.0 / n));
    double est = 0;
    int last = -1;
    for (int it = 0; it < 5; ++it) {
      CVec y = s.lu.solve(x);
      est = y.lpNorm<1>();
      CVec xi(n);
      for (int i = 0; i < n; ++i) xi[i] = std::abs(y[i]) > 0 ? y[i] / std::abs(y[i]) : cplx(1.0);
      CVec z = s.lu.solve(CVec(xi.conjugate())).conjugate();
      int j = 0;
      z.cwiseAbs().maxCoeff(&j);
      if (std::abs(z[j]) <= (z.adjoint() * x)(0).real() || j == last) break;
      x.setZero();
      x[j] = 1.0;
      last = j;
    }
    condition_ = anorm * est;
    if (!std::isfinite(condition_) || condition_ > opts.resonance_threshold)
      throw NumericError(NumericFailure::NearResonance,
                         "condition estimate " + std::to_string(condition_) + " exceeds the resonance threshold");
  }
}

ForwardSolver::~ForwardSolver() = default;
ForwardSolver::ForwardSolver(ForwardSolver&&) noexcept = default;

std::size_t ForwardSolver::unknowns() const { return impl_->interior.size(); }

double ForwardSolver::nearest_resonance(int iterations) const {
  const Impl& s = *impl_;
  const int n = static_cast<int>(s.interior.size());
  Eigen::Map<const CVec> mass(s.mass.data(), n);
  // Shifted inverse iteration: (K - w^2 M)^-1 M v picks the eigenvalue of K v = l M v nearest w^2.
  CVec v = CVec::Ones(n);
  cplx lambda = s.omega * s.omega;
  for (int it = 0; it < iterations; ++it) {
    CVec w = s.lu.solve(CVec(mass.cwiseProduct(v)));
    v = w / w.norm();
    CVec av = s.A * v;
    cplx num = v.transpose() * av, den = v.transpose() * mass.cwiseProduct(v);
    lambda = num / den + s.omega * s.omega;
  }
  return std::sqrt(lambda).real();
}

std::vector<ForwardSolution> ForwardSolver::solve_many(const std::vector<BoundaryField>& Ts) const {
  const Impl& s = *impl_;
  const int n = static_cast<int>(s.interior.size());
  const int cols = static_cast<int>(Ts.size());
  std::vector<std::vector<cplx>> edges(cols);
  Eigen::MatrixXcd rhs(n, cols);
  for (int t = 0; t < cols; ++t) {
    if (!(Ts[t].grid() == s.grid) || Ts[t].components() != 2) throw GridMismatch();
    edges[t] = s.boundary_edges(Ts[t]);
    Eigen::Map<const CVec> eb(edges[t].data(), static_cast<int>(edges[t].size()));
    rhs.col(t) = -(s.B * eb);
  }
  Eigen::MatrixXcd x = s.lu.solve(rhs);
  std::vector<ForwardSolution> out;
  out.reserve(cols);
  for (int t = 0; t < cols; ++t) {
    double bn = rhs.col(t).norm();
    double res = bn > 0 ? (s.A * x.col(t) - rhs.col(t)).norm() / bn : 0.0;
    if (!(res < s.residual_tol))
      throw NumericError(NumericFailure::NoConvergence, "forward solve residual " + std::to_string(res));
    for (int i = 0; i < n; ++i) edges[t][s.interior[i]] = x(i, t);
    out.push_back(s.finish(Ts[t], edges[t], res));
  }
  return out;
}

ForwardSolution ForwardSolver::solve(const BoundaryField& T) const { return std::move(solve_many({T}).front()); }

BoundaryField admittance_apply(const ForwardSolver& solver, const BoundaryField& T) { return solver.solve(T).S; }

}  // namespace maxcgo
