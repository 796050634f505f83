#include <doctest.h>

#include "maxcgo/block_operators.hpp"
#include "support.hpp"

using namespace maxcgo;

namespace {

CoefficientSpec bump_spec(bool complex_gamma) {
  CoefficientSpec s;
  s.gamma_bumps = {{{0.05, 0.0, 0.0}, 0.6, {0.3, complex_gamma ? 0.15 : 0.0}}};
  s.mu_bumps = {{{-0.05, 0.05, 0.0}, 0.55, {0.2, 0.0}}};
  return s;
}

double l2(const StateY& y) {
  double s = 0;
  for (const cplx& v : y.raw()) s += std::norm(v);
  return std::sqrt(s);
}

StateY add(const StateY& a, const StateY& b, double sb) {
  StateY out = a;
  out += cplx(sb) * b;
  return out;
}

// Relative defect of the analytic potential against the operator composition.
enum class Which { Q, Qprime, Qhat };

double factorization_defect(int n, Which which, bool complex_gamma) {
  Grid3 g(n, 1.0, 0.5);
  auto c = synth_coefficients(g, bump_spec(complex_gamma));
  auto d = derive_scalars(c);
  SpectralOps ops(g);
  BlockMatrixField W = assemble_W(d);
  BlockMatrixField Wt = W.transpose();
  BlockMatrixField Wbar = W.conjugate();
  BlockMatrixField Wstar = W.adjoint();
  BlockMatrixField Q = which == Which::Q ? assemble_Q(d) : which == Which::Qprime ? assemble_Q_prime(d) : assemble_Q_hat(d);
  double worst = 0;
  for (int t = 0; t < 5; ++t) {
    auto z = support::random_smooth<8>(g, 100 + t, 2, 4);
    StateY lhs = apply_schrodinger(Q, z, ops);
    StateY rhs(g);
    if (which == Which::Q) {
      StateY inner = add(apply_P(z, ops), Wt.apply(z), -1);
      rhs = add(apply_P(inner, ops), W.apply(inner), 1);
    } else if (which == Which::Qprime) {
      StateY inner = add(apply_P(z, ops), W.apply(z), 1);
      rhs = add(apply_P(inner, ops), Wt.apply(inner), -1);
    } else {
      StateY inner = add(apply_P(z, ops), Wbar.apply(z), -1);
      rhs = add(apply_P(inner, ops), Wstar.apply(inner), 1);
    }
    worst = std::max(worst, l2(add(lhs, rhs, -1)) / l2(z));
  }
  return worst;
}

}  // namespace

TEST_CASE("constant background matrices") {
  Grid3 g(16, 1.0, 0.5);
  CoefficientSpec s;
  s.omega = 1.5;
  auto c = synth_coefficients(g, s);
  auto d = derive_scalars(c);
  auto W = assemble_W(d);
  for (std::size_t node : {std::size_t(0), g.size() / 2 + 3}) {
    Mat8 w = W.at(node), q = assemble_Q(d).at(node), qp = assemble_Q_prime(d).at(node), qh = assemble_Q_hat(d).at(node);
    for (int r = 0; r < 8; ++r)
      for (int k = 0; k < 8; ++k) {
        double id = r == k ? 1.0 : 0.0;
        CHECK(std::abs(w[r][k] - 1.5 * id) < 1e-15);
        CHECK(std::abs(q[r][k] + 2.25 * id) < 1e-14);
        CHECK(std::abs(qp[r][k] + 2.25 * id) < 1e-14);
        CHECK(std::abs(qh[r][k] + 2.25 * id) < 1e-14);
      }
  }
}

TEST_CASE("W pattern and transpose") {
  Grid3 g(16, 1.0, 0.5);
  CoefficientSpec s;
  s.gamma_bumps = {{{0.0, 0.0, 0.0}, 0.45, {0.3, 0.0}}};
  auto c = synth_coefficients(g, s);
  auto d = derive_scalars(c);
  auto W = assemble_W(d);
  auto Wt = W.transpose();
  std::size_t node = g.index(9, 8, 7);
  Mat8 w = W.at(node), wt = Wt.at(node);
  // mu constant: the D beta blocks (rows f2, u2 against f1, u1) vanish
  for (int r = 4; r < 8; ++r)
    for (int k = 0; k < 4; ++k) CHECK(w[r][k] == cplx(0.0));
  CHECK(std::abs(w[0][5]) > 0);
  for (int r = 0; r < 8; ++r)
    for (int k = 0; k < 8; ++k) CHECK(wt[r][k] == w[k][r]);
  CHECK(W.entries().size() <= 32);
}

TEST_CASE("P on lattice plane waves and P^2 = -Delta") {
  Grid3 g(16, 1.0, 0.5);
  SpectralOps ops(g);
  std::array<double, 3> k{M_PI, -2 * M_PI, 3 * M_PI};
  Vec8 c{1.0, cplx(0, 2), -1.0, 0.5, cplx(1, 1), 2.0, -0.5, cplx(0, -1)};
  StateY y(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    Vec3 x = g.point(i);
    cplx e = std::exp(cplx(0, k[0] * x[0] + k[1] * x[1] + k[2] * x[2]));
    for (int r = 0; r < 8; ++r) y(r, i) = e * c[r];
  }
  // P(e^{ik.x} c) = e^{ik.x} i P_k c
  Mat8 pk = P_symbol({k[0], k[1], k[2]});
  Vec8 expect = pk * c;
  StateY py = apply_P(y, ops);
  for (std::size_t i = 0; i < g.size(); i += 29) {
    Vec3 x = g.point(i);
    cplx e = std::exp(cplx(0, k[0] * x[0] + k[1] * x[1] + k[2] * x[2]));
    for (int r = 0; r < 8; ++r) CHECK(std::abs(py(r, i) - cplx(0, 1) * e * expect[r]) < 1e-11);
  }

  auto z = support::random_smooth<8>(g, 9);
  StateY ppz = apply_P(apply_P(z, ops), ops);
  BlockMatrixField zero(g);
  StateY lap = apply_schrodinger(zero, z, ops);
  CHECK(l2(add(ppz, lap, -1)) < 1e-11 * l2(lap));

  StateY constant_f1(g);
  for (auto& v : constant_f1.comp(0)) v = 2.0;
  CHECK(l2(apply_P(constant_f1, ops)) < 1e-13);
}

TEST_CASE("factorization identities converge under refinement") {
  for (bool complex_gamma : {false, true}) {
    double q24 = factorization_defect(24, Which::Q, complex_gamma), q48 = factorization_defect(48, Which::Q, complex_gamma);
    double p24 = factorization_defect(24, Which::Qprime, complex_gamma),
           p48 = factorization_defect(48, Which::Qprime, complex_gamma);
    double h24 = factorization_defect(24, Which::Qhat, complex_gamma),
           h48 = factorization_defect(48, Which::Qhat, complex_gamma);
    INFO("complex gamma " << complex_gamma << ": Q " << q24 << " -> " << q48 << ", Q' " << p24 << " -> " << p48
                          << ", Qhat " << h24 << " -> " << h48);
    CHECK(q48 < q24 / 3);
    CHECK(p48 < p24 / 3);
    CHECK(h48 < h24 / 3);
    CHECK(q48 < 5e-2);
    CHECK(p48 < 5e-2);
    CHECK(h48 < 5e-2);
  }
}

TEST_CASE("Q hat spot entries for real coefficients") {
  Grid3 g(24, 1.0, 0.5);
  auto c = synth_coefficients(g, bump_spec(false));
  auto d = derive_scalars(c);
  Mat8 qh = assemble_Q_hat(d).at(g.index(13, 12, 11));
  std::size_t i = g.index(13, 12, 11);
  auto k2 = d.kappa(0, i) * d.kappa(0, i);
  cplx gb = 0, ga = 0;
  for (int ax = 0; ax < 3; ++ax) {
    gb += d.grad_beta(ax, i) * d.grad_beta(ax, i);
    ga += d.grad_alpha(ax, i) * d.grad_alpha(ax, i);
  }
  CHECK(std::abs(qh[0][0] - (-0.5 * d.lap_beta(0, i) - k2 + 0.25 * gb)) < 1e-12);
  CHECK(std::abs(qh[4][4] - (-0.5 * d.lap_alpha(0, i) - k2 + 0.25 * ga)) < 1e-12);
  CHECK(std::abs(qh[1][2] - (-d.hess_beta[3](0, i))) < 1e-12);
  CHECK(std::abs(qh[5][7] - (-d.hess_alpha[4](0, i))) < 1e-12);
  // -2 D kappa x in the (u1, u2) block: entry (0,1) of A x is -A_3
  cplx dk3 = cplx(0, -1) * d.grad_kappa(2, i), dk1 = cplx(0, -1) * d.grad_kappa(0, i);
  CHECK(std::abs(qh[1][6] - (-2.0 * dk3)) < 1e-12);
  CHECK(std::abs(qh[6][1] - (-2.0 * dk3)) < 1e-12);
  CHECK(std::abs(qh[2][7] - (-2.0 * dk1)) < 1e-12);
  CHECK(qh[0][5] == cplx(0.0));
}

TEST_CASE("rescaling relates P + V and P + W") {
  std::vector<double> defect;
  for (int n : {24, 48}) {
    Grid3 g(n, 1.0, 0.5);
    auto c = synth_coefficients(g, bump_spec(true));
    auto d = derive_scalars(c);
    SpectralOps ops(g);
    RescaleMaps maps(c);
    auto V = assemble_V(c, d);
    auto W = assemble_W(d);
    double worst = 0;
    for (int t = 0; t < 3; ++t) {
      auto y = support::random_smooth<8>(g, 40 + t, 2, 4);
      StateY x = maps.to_physical(y);
      StateY lhs = add(apply_P(x, ops), V.apply(x), 1);
      StateY rhs = maps.swapped(add(apply_P(y, ops), W.apply(y), 1));
      worst = std::max(worst, l2(add(lhs, rhs, -1)) / l2(rhs));
      CHECK(l2(add(maps.to_rescaled(x), y, -1)) < 1e-14 * l2(y));
    }
    defect.push_back(worst);
  }
  INFO("defect " << defect[0] << " -> " << defect[1]);
  CHECK(defect[1] < defect[0] / 4);
  CHECK(defect[1] < 1e-4);
}

TEST_CASE("boundary pairing and the Green identity") {
  SUBCASE("trivial cases") {
    Grid3 g(16, 1.0, 0.5);
    auto inside = support::random_bumps<8>(g, 1, {0, 0, 0}, 0.3);
    auto z = support::random_smooth<8>(g, 2);
    CHECK(boundary_pairing(inside, z) == cplx(0.0));
    StateY k(g);
    for (int r = 0; r < 8; ++r)
      for (auto& v : k.comp(r)) v = cplx(r + 1, 1 - r);
    CHECK(std::abs(boundary_pairing(k, k)) < 1e-13);
  }
  SUBCASE("defect shrinks under refinement") {
    std::vector<double> defect;
    for (int n : {16, 32}) {
      Grid3 g(n, 1.0, 0.5);
      SpectralOps ops(g);
      auto y = support::random_smooth<8>(g, 21), z = support::random_smooth<8>(g, 22);
      cplx d = inner_omega(apply_P(y, ops), z) - boundary_pairing(y, z) - inner_omega(y, apply_P(z, ops));
      defect.push_back(std::abs(d) / std::sqrt(inner_omega(y, y).real() * inner_omega(z, z).real()));
    }
    CHECK(defect[1] < defect[0] / 2);
    CHECK(defect[1] < 1e-2);
  }
}
