#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "maxcgo/block_operators.hpp"
#include "maxcgo/field_io.hpp"
#include "maxcgo/spectral.hpp"
#include "support.hpp"

using namespace maxcgo;

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(Grid3(7, 1.0, 0.5), ConfigError);
  CHECK_THROWS_AS(Grid3(16, 1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(Grid3(18, 1.0, 0.5), ConfigError);  // faces off the node planes
  Grid3 g(24, 1.0, 0.5);
  CHECK(g.omega_cells() == 12);
  CHECK(g.coord(g.omega_lo()) == doctest::Approx(-0.5));
  CHECK(g.coord(g.omega_hi()) == doctest::Approx(0.5));
}

TEST_CASE("curl grad and div curl vanish") {
  Grid3 g(16, 1.0, 0.5);
  auto f = support::random_smooth<1>(g, 1);
  auto u = support::random_smooth<3>(g, 2);
  double scale_f = support::max_abs(f), scale_u = support::max_abs(u);

  SUBCASE("stencil path is exact") {
    CHECK(support::max_abs(stencil::curl(stencil::grad(f))) < 1e-12 * scale_f / (g.h() * g.h()));
    CHECK(support::max_abs(stencil::div(stencil::curl(u))) < 1e-12 * scale_u / (g.h() * g.h()));
  }
  SUBCASE("spectral path to rounding") {
    SpectralOps ops(g);
    CHECK(support::max_abs(ops.curl(ops.grad(f))) < 1e-11 * scale_f);
    CHECK(support::max_abs(ops.div(ops.curl(u))) < 1e-11 * scale_u);
  }
}

TEST_CASE("laplacian of sin(pi x / L)") {
  std::vector<double> err;
  for (int n : {16, 32}) {
    Grid3 g(n, 1.0, 0.5);
    auto f = sample(g, [&](const Vec3& x) { return std::sin(M_PI * x[0] / g.L()); });
    const double lam = -std::pow(M_PI / g.L(), 2);
    SpectralOps ops(g);
    CHECK(support::max_diff(ops.laplacian(f), lam * f) < 1e-11);
    err.push_back(support::max_diff(stencil::laplacian(f), lam * f));
  }
  // 7-point stencil is second order
  CHECK(err[0] / err[1] == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("plane-wave symbols on both paths") {
  Grid3 g(16, 1.0, 0.5);
  SpectralOps ops(g);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> m(-7, 7);
  for (int t = 0; t < 3; ++t) {
    double k[3] = {M_PI * m(rng), M_PI * m(rng), M_PI * m(rng)};
    auto f = sample(g, [&](const Vec3& x) { return std::exp(cplx(0, k[0] * x[0] + k[1] * x[1] + k[2] * x[2])); });
    auto gs = ops.grad(f);
    auto gf = stencil::grad(f);
    auto ls = stencil::laplacian(f);
    double lap_sym = 0;
    for (int ax = 0; ax < 3; ++ax) {
      cplx s_spec(0, k[ax]);
      cplx s_fd(0, std::sin(k[ax] * g.h()) / g.h());
      lap_sym += (2 * std::cos(k[ax] * g.h()) - 2) / (g.h() * g.h());
      for (std::size_t i = 0; i < g.size(); i += 37) {
        CHECK(std::abs(gs(ax, i) - s_spec * f(0, i)) < 1e-11);
        CHECK(std::abs(gf(ax, i) - s_fd * f(0, i)) < 1e-11);
      }
    }
    for (std::size_t i = 0; i < g.size(); i += 37) CHECK(std::abs(ls(0, i) - lap_sym * f(0, i)) < 1e-9);
  }
}

TEST_CASE("inner_omega") {
  Grid3 g(24, 1.0, 0.5);
  SUBCASE("constant integrand gives the volume") {
    StateY y(g);
    for (auto& v : y.comp(0)) v = 1.0;
    CHECK(inner_omega(y, y).real() == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("disjoint supports") {
    StateY y(g), z(g);
    y(0, g.index(g.omega_lo() + 1, g.omega_lo() + 1, g.omega_lo() + 1)) = 1.0;
    z(0, g.index(g.omega_lo() + 2, g.omega_lo() + 1, g.omega_lo() + 1)) = 1.0;
    CHECK(inner_omega(y, z) == cplx(0.0));
  }
  SUBCASE("conjugate symmetry is exact") {
    auto y = support::random_smooth<8>(g, 3), z = support::random_smooth<8>(g, 4);
    cplx a = inner_omega(y, z), b = inner_omega(z, y);
    CHECK(a.real() == b.real());
    CHECK(a.imag() == -b.imag());
    CHECK(inner_omega(y, z) == a);
  }
  SUBCASE("grid mismatch") {
    StateY y(g), z(Grid3(32, 1.0, 0.5));
    CHECK_THROWS_AS(inner_omega(y, z), GridMismatch);
  }
}

TEST_CASE("P is symmetric for fields supported inside Omega") {
  std::vector<double> defect;
  for (int n : {16, 32}) {
    Grid3 g(n, 1.0, 0.5);
    SpectralOps ops(g);
    auto y = support::random_bumps<8>(g, 5, {0.05, 0.0, -0.05}, 0.4);
    auto z = support::random_bumps<8>(g, 6, {-0.05, 0.05, 0.0}, 0.4);
    cplx d = inner_omega(apply_P(y, ops), z) - inner_omega(y, apply_P(z, ops));
    double scale = std::sqrt(inner_omega(y, y).real() * inner_omega(z, z).real());
    defect.push_back(std::abs(d) / scale);
  }
  // The spectral path makes this exact up to rounding on both grids.
  CHECK(defect[0] < 1e-12);
  CHECK(defect[1] < 1e-12);
}

TEST_CASE("weighted_norm") {
  Grid3 g(32, 1.0, 0.5);
  StateY ones(g);
  for (auto& v : ones.comp(0)) v = 1.0;
  CHECK_THROWS_AS(weighted_norm(ones, 0.0), ConfigError);
  CHECK_THROWS_AS(weighted_norm(ones, 1.0), ConfigError);

  const double s = 0.2;
  auto gauss = sample(g, [&](const Vec3& x) { return std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (s * s)); });
  double plain = std::sqrt(integrate_omega(gauss.comp(0), gauss.comp(0), g).real());
  double w = weighted_norm(gauss, -0.5);
  CHECK(w < plain);

  double oracle = std::sqrt(support::adaptive_simpson(
      [&](double r) { return 4 * M_PI * r * r * std::pow(1 + r * r, -0.5) * std::exp(-2 * r * r / (s * s)); }, 0.0, 1.0,
      1e-14));
  CHECK(w == doctest::Approx(oracle).epsilon(0.01));
}

TEST_CASE("field files round-trip bit-exactly") {
  Grid3 g(16, 1.0, 0.5);
  auto y = support::random_smooth<8>(g, 11);
  auto path = (std::filesystem::temp_directory_path() / "maxcgo_roundtrip.fld").string();
  write_field(path, y);
  StateY back = read_field<8>(path);
  CHECK(back.grid() == g);
  CHECK(std::memcmp(back.raw().data(), y.raw().data(), y.raw().size() * sizeof(cplx)) == 0);
  CHECK_THROWS_AS(read_field<1>(path), IoError);
  {
    std::ofstream os(path, std::ios::binary);
    os << "garbage";
  }
  CHECK_THROWS_AS(read_field<8>(path), IoError);
  std::filesystem::remove(path);
}
