#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "maxcgo/cauchy.hpp"
#include "support.hpp"

using namespace maxcgo;

namespace {

CoefficientSpec perturbed(double eps) {
  CoefficientSpec s;
  s.gamma_bumps = {{{0.1, 0.0, -0.05}, 0.35, {eps, 0.2 * eps}}};
  s.mu_bumps = {{{-0.1, 0.1, 0.0}, 0.3, {0.5 * eps, 0.0}}};
  return s;
}

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j)
      if (v[j] < v[i]) r[i] += 1;
  return r;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  auto ra = ranks(a), rb = ranks(b);
  double n = double(a.size()), d2 = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d2 += (ra[i] - rb[i]) * (ra[i] - rb[i]);
  return 1 - 6 * d2 / (n * (n * n - 1));
}

}  // namespace

TEST_CASE("probe fan") {
  auto probes = plane_wave_probes(48);
  REQUIRE(probes.size() == 48);
  for (const auto& p : probes) {
    double dn = 0;
    cplx dp = 0, pp = 0;
    for (int i = 0; i < 3; ++i) {
      dn += p.direction[i] * p.direction[i];
      dp += p.direction[i] * p.polarization[i];
      pp += p.polarization[i] * std::conj(p.polarization[i]);
    }
    CHECK(std::abs(dn - 1) < 1e-14);
    CHECK(std::abs(dp) < 1e-14);
    CHECK(std::abs(pp - 1.0) < 1e-14);
  }
  CHECK_THROWS_AS(plane_wave_probes(7), ConfigError);
}

TEST_CASE("distance properties and file round trip") {
  Grid3 g(24, 1.0, 0.5);
  auto probes = plane_wave_probes(24);
  auto c0 = synth_coefficients(g, CoefficientSpec{});
  auto c1 = synth_coefficients(g, perturbed(0.05));
  CauchySet s0 = make_cauchy_set(c0, probes, spec_hash(CoefficientSpec{}));
  CauchySet s1 = make_cauchy_set(c1, probes, spec_hash(perturbed(0.05)));

  CHECK(delta_c(s0, s0).delta < 1e-10);
  CauchySet scaled = s0;
  for (auto& d : scaled.data) {
    d.T *= 2.0;
    d.S *= 2.0;
  }
  CHECK(delta_c(s0, scaled).delta < 1e-10);
  auto r01 = delta_c(s0, s1), r10 = delta_c(s1, s0);
  CHECK(r01.delta == r10.delta);
  CHECK(r01.d12 == r10.d21);
  CHECK(r01.delta > 1e-4);
  CHECK(admittance_difference(s0, s0) < 1e-12);

  auto path = (std::filesystem::temp_directory_path() / "maxcgo_cs_test.bin").string();
  write_cauchy_set(path, s1);
  CauchySet back = read_cauchy_set(path);
  CHECK(back.grid == s1.grid);
  CHECK(back.omega == s1.omega);
  CHECK(back.spec_hash == s1.spec_hash);
  CHECK(back.probes == s1.probes);
  REQUIRE(back.data.size() == s1.data.size());
  bool same = true;
  for (std::size_t i = 0; i < back.data.size(); ++i)
    same = same && back.data[i].T.raw() == s1.data[i].T.raw() && back.data[i].S.raw() == s1.data[i].S.raw();
  CHECK(same);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_cauchy_set(path), IoError);
  CHECK(spec_hash(perturbed(0.05)) != spec_hash(perturbed(0.06)));
}

TEST_CASE("distance grows with the perturbation amplitude") {
  Grid3 g(24, 1.0, 0.5);
  auto probes = plane_wave_probes(48);
  CauchySet base = make_cauchy_set(synth_coefficients(g, CoefficientSpec{}), probes);
  std::vector<double> amp, dist, adm;
  for (int i = 0; i < 8; ++i) {
    double eps = std::pow(10.0, -2.5 + 1.5 * i / 7.0);
    CauchySet s = make_cauchy_set(synth_coefficients(g, perturbed(eps)), probes);
    amp.push_back(eps);
    dist.push_back(delta_c(base, s).delta);
    adm.push_back(admittance_difference(base, s));
  }
  double rho = spearman(amp, dist);
  INFO("delta_c " << dist.front() << " .. " << dist.back() << ", admittance " << adm.front() << " .. " << adm.back());
  CHECK(rho > 0.9);
  for (std::size_t i = 0; i < dist.size(); ++i) {
    double ratio = adm[i] / dist[i];
    CHECK(ratio > 1e-2);
    CHECK(ratio < 1e2);
  }
}
