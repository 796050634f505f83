// Acceptance run: one PASS/FAIL line per criterion. Exit status 1 if any fails.
// Usage: acceptance [output-dir]

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "maxcgo/carleman.hpp"
#include "maxcgo/cauchy.hpp"
#include "maxcgo/cgo.hpp"
#include "maxcgo/cli.hpp"
#include "maxcgo/field_io.hpp"
#include "maxcgo/recovery.hpp"
#include "maxcgo/svg.hpp"
#include "support.hpp"

using namespace maxcgo;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double l2(const StateY& y) {
  double s = 0;
  for (const cplx& v : y.raw()) s += std::norm(v);
  return std::sqrt(s);
}

double vec8_norm(const Vec8& v) {
  double s = 0;
  for (const cplx& x : v) s += std::norm(x);
  return std::sqrt(s);
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = 0; j < v.size(); ++j)
        if (v[j] < v[i]) r[i] += 1;
    return r;
  };
  auto ra = ranks(a), rb = ranks(b);
  const double n = double(a.size());
  double d2 = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d2 += (ra[i] - rb[i]) * (ra[i] - rb[i]);
  return 1 - 6 * d2 / (n * (n * n - 1));
}

// Seeded smooth bumps near the origin.
CoefficientSpec random_bump_spec(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  CoefficientSpec s;
  auto bump = [&](bool complex_amp) {
    Bump b;
    b.radius = 0.5 + 0.1 * u(rng);
    for (double& c : b.center) c = 0.1 * (2 * u(rng) - 1);
    b.amplitude = cplx(0.1 + 0.2 * u(rng), complex_amp ? 0.1 * u(rng) : 0.0);
    return b;
  };
  s.gamma_bumps = {bump(true)};
  s.mu_bumps = {bump(false)};
  return s;
}

CoefficientSpec gentle_bumps() {
  CoefficientSpec s;
  s.gamma_bumps = {{{0.05, 0.0, 0.0}, 0.5, {0.15, 0.05}}};
  s.mu_bumps = {{{-0.05, 0.05, 0.0}, 0.45, {0.1, 0.0}}};
  return s;
}

CoefficientSpec perturbed(double eps) {
  CoefficientSpec s;
  s.gamma_bumps = {{{0.1, 0.0, -0.05}, 0.35, {eps, 0.2 * eps}}};
  s.mu_bumps = {{{-0.1, 0.1, 0.0}, 0.3, {0.5 * eps, 0.0}}};
  return s;
}

std::vector<double> sweep_amplitudes() {
  std::vector<double> a;
  for (int i = 0; i < 8; ++i) a.push_back(std::pow(10.0, -2.5 + 1.5 * i / 7.0));
  return a;
}

FaddeevConfig zeta_config(double za, double k0sq, Vec3 e_re = {0, 0, 1}, Vec3 e_im = {1, 0, 0}) {
  FaddeevConfig cfg;
  cfg.zeta = support::test_zeta(za, k0sq, e_re, e_im);
  return cfg;
}

// 1. Factorization defect of Q against (P + W)(P - W^t) shrinks like h^2.
Outcome factorization() {
  auto defect = [](int n) {
    Grid3 g(n, 1.0, 0.5);
    auto c = synth_coefficients(g, random_bump_spec(2024));
    auto d = derive_scalars(c);
    SpectralOps ops(g);
    BlockMatrixField W = assemble_W(d), Wt = W.transpose(), Q = assemble_Q(d);
    double worst = 0;
    for (int t = 0; t < 5; ++t) {
      StateY z = support::random_smooth<8>(g, 300 + t, 2, 4);
      StateY inner = apply_P(z, ops);
      inner -= Wt.apply(z);
      StateY rhs = apply_P(inner, ops);
      rhs += W.apply(inner);
      StateY diff = apply_schrodinger(Q, z, ops);
      diff -= rhs;
      worst = std::max(worst, l2(diff) / l2(z));
    }
    return worst;
  };
  const double d24 = defect(24), d48 = defect(48);
  const double f = d24 / d48;
  return {f >= 3.0, fmt("defect %.3e (n=24) -> %.3e (n=48), factor %.2f (need >= 3)", d24, d48, f)};
}

// 2. Constant background: exact plane waves.
Outcome constant_background() {
  Grid3 g(24, 1.0, 0.5);
  CoefficientSpec s;
  s.omega = 1.3;
  s.eps0 = 1.2;
  s.mu0 = 0.9;
  auto c = synth_coefficients(g, s);
  CgoOperators ops(c);
  auto cfg = zeta_config(8, c.k0sq(), {0.6, 0.8, 0}, {0, 0, 1});
  auto sol = build_maxwell_cgo(ops, cfg, {cplx(1, 0.5), cplx(-0.3), cplx(0.2, 1)}, {0.0, cplx(0, 1), 0.4});
  const double r = support::max_abs(sol.Z.fluct) / vec8_norm(sol.principal);
  const double worst = std::max({r, sol.diag.residual_norm, sol.diag.maxwell_residual, sol.diag.eh_sup_norm});
  return {worst < 1e-10, fmt("max|R|/|L| %.1e, schrodinger %.1e, maxwell %.1e, e/h slots %.1e (need < 1e-10)", r,
                                         sol.diag.residual_norm, sol.diag.maxwell_residual, sol.diag.eh_sup_norm)};
}

// 3. Remainder and adjoint correction decay like |zeta|^-1.
Outcome remainder_decay() {
  Grid3 g(32, 1.0, 0.5);
  auto c = synth_coefficients(g, gentle_bumps());
  CgoOperators ops(c);
  CgoOptions opts;
  opts.diagnostics = false;
  std::vector<double> lz, lr, ls;
  for (double za : {8.0, 16.0, 32.0, 64.0}) {
    auto cfg = zeta_config(za, c.k0sq());
    auto m = build_maxwell_cgo(ops, cfg, {cplx(0, 1), 1.0, 0}, {0, 0, 1.0}, opts);
    auto adj = build_adjoint_cgo(ops, cfg, {1.0, 0, 0}, {0, cplx(0, 1), 1.0}, opts);
    lz.push_back(std::log(za));
    lr.push_back(std::log(m.diag.remainder_weighted_norm / vec8_norm(m.principal)));
    ls.push_back(std::log(adj.diag.correction_norm));
  }
  const double sr = support::fit_slope(lz, lr), ss = support::fit_slope(lz, ls);
  auto in = [](double v) { return v >= -1.3 && v <= -0.7; };
  return {in(sr) && in(ss), fmt("slope R %.3f, slope S %.3f (need in [-1.3, -0.7])", sr, ss)};
}

// 4. Scalar slots of the physical solution vanish under refinement.
Outcome scalar_slots() {
  std::vector<double> eh;
  for (int n : {16, 32, 64}) {
    Grid3 g(n, 1.0, 0.5);
    auto c = synth_coefficients(g, gentle_bumps());
    CgoOperators ops(c);
    auto cfg = zeta_config(8, c.k0sq(), {0, 0.6, 0.8}, {1, 0, 0});
    eh.push_back(build_maxwell_cgo(ops, cfg, {1.0, cplx(0, 1), 0}, {0, 0, 0.5}).diag.eh_sup_norm);
  }
  const double f1 = eh[0] / eh[1], f2 = eh[1] / eh[2];
  return {f1 >= 1.8 && f2 >= 1.8,
          fmt("sup|e|+|h| %.2e, %.2e, %.2e at n=16,32,64; factors %.2f, %.2f (need >= 1.8)", eh[0], eh[1], eh[2], f1, f2)};
}

// 5. Green identity defect.
Outcome green_identity() {
  std::vector<double> defect;
  for (int n : {24, 48}) {
    Grid3 g(n, 1.0, 0.5);
    SpectralOps ops(g);
    auto y = support::random_smooth<8>(g, 21), z = support::random_smooth<8>(g, 22);
    cplx d = inner_omega(apply_P(y, ops), z) - boundary_pairing(y, z) - inner_omega(y, apply_P(z, ops));
    defect.push_back(std::abs(d) / std::sqrt(inner_omega(y, y).real() * inner_omega(z, z).real()));
  }
  return {defect[1] < 1e-2 && defect[1] < defect[0],
          fmt("relative defect %.2e (n=24) -> %.2e (n=48) (need < 1e-2 and decreasing)", defect[0], defect[1])};
}

// 6. delta_C: self distance, span invariance, monotone amplitude sweep.
Outcome delta_c_properties() {
  Grid3 g(24, 1.0, 0.5);
  auto probes = plane_wave_probes(48);
  CauchySet base = make_cauchy_set(synth_coefficients(g, CoefficientSpec{}), probes);
  const double self = delta_c(base, base).delta;
  CauchySet scaled = base;
  for (auto& d : scaled.data) {
    d.T *= 2.0;
    d.S *= 2.0;
  }
  const double span = delta_c(base, scaled).delta;
  std::vector<double> amp = sweep_amplitudes(), dist;
  for (double e : amp) dist.push_back(delta_c(base, make_cauchy_set(synth_coefficients(g, perturbed(e)), probes)).delta);
  const double rho = spearman(amp, dist);
  return {self < 1e-10 && span < 1e-10 && rho > 0.9,
          fmt("self %.1e, rescaled %.1e, Spearman %.3f over delta_C %.2e..%.2e", self, span, rho, dist.front(), dist.back())};
}

// 7. Pairing against quadrature of the known f, g: error halves per tau doubling.
Outcome pairing_oracle() {
  Grid3 g(32, 1.0, 0.5);
  CoefficientSpec s1;
  s1.gamma_bumps = {{{0.1, 0.05, -0.05}, 0.35, {0.3, 0.0}}, {{-0.15, -0.1, 0.05}, 0.3, {0.2, 0.1}}};
  s1.mu_bumps = {{{0.0, 0.1, 0.1}, 0.35, {0.25, 0.0}}};
  CgoOperators o1(synth_coefficients(g, s1)), o2(synth_coefficients(g, CoefficientSpec{}));
  auto modes = lattice_modes(g, M_PI * 1.01);
  modes.resize(5);
  const FourierSamples orc = oracle_fg_hat(exact_fg(o1, o2), modes);
  const std::vector<double> taus{4, 8, 16};
  std::vector<std::vector<double>> ef(modes.size()), eg(modes.size());
  for (double tau : taus) {
    RecoveryConfig cfg;
    cfg.tau = tau;
    for (std::size_t i = 0; i < modes.size(); ++i) {
      ZetaPair zp = zeta_pair_for_mode(g, modes[i], tau, o1.coeffs.k0sq());
      ef[i].push_back(std::abs(pairing_q_diff(o1, o2, zp, PolarizationMode::Alpha, cfg) - orc.f_hat[i]));
      eg[i].push_back(std::abs(pairing_q_diff(o1, o2, zp, PolarizationMode::Beta, cfg) - orc.g_hat[i]));
    }
  }
  bool ok = true;
  std::ostringstream os;
  os << "per-doubling factors f:";
  auto factor = [](const std::vector<double>& e) { return std::sqrt(e.front() / e.back()); };
  for (const auto& e : ef) {
    os << ' ' << fmt("%.2f", factor(e));
    ok = ok && factor(e) >= 1.4 && factor(e) <= 2.6;
  }
  os << "; g:";
  for (const auto& e : eg) {
    os << ' ' << fmt("%.2f", factor(e));
    ok = ok && factor(e) >= 1.4 && factor(e) <= 2.6;
  }
  os << " (need in [1.4, 2.6])";
  return {ok, os.str()};
}

// 8. Elliptic recovery from exact f, g.
Outcome elliptic_recovery() {
  Grid3 g(48, 1.0, 0.5);
  CoefficientSpec a, b;
  a.gamma_bumps = {{{-0.03, 0.03, 0.0}, 0.8, {0.2, 0.05}}};
  b.gamma_bumps = {{{0.04, 0.0, -0.03}, 0.8, {0.3, 0.1}}};
  b.mu_bumps = {{{-0.03, 0.04, 0.03}, 0.78, {0.25, 0.0}}};
  auto t0 = std::chrono::steady_clock::now();
  auto c1 = synth_coefficients(g, a), c2 = synth_coefficients(g, b);
  FgFields fg = analytic_fg(g, a, b);
  RecoveryReport r = invert_and_solve(fg.f, fg.g, c1, c2);
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {r.phi_h1_relative < 0.01 && dt < 120,
          fmt("relative H1 error of (phi1, phi2) %.3e at n=48 in %.1f s (need < 1e-2, < 120 s)", r.phi_h1_relative, dt)};
}

// 9. Carleman ratio over random compactly supported functions.
Outcome carleman() {
  Grid3 g(48, 1.0, 0.5);
  CarlemanConfig cfg;
  std::vector<double> ratios;
  for (int s = 0; s < 100; ++s)
    for (const auto& t : carleman_sweep(random_test_function(g, 1000 + s), cfg)) ratios.push_back(t.ratio);
  std::vector<double> sorted = ratios;
  std::sort(sorted.begin(), sorted.end());
  const double med = sorted[sorted.size() / 2], mx = sorted.back();
  return {med > 0 && mx / med < 20,
          fmt("C = max ratio %.3e, median %.3e, max/median %.2f over %zu (function, h) pairs (need < 20)", mx, med,
              mx / med, ratios.size())};
}

// 10 and 11 share the curve's extractions.
StabilityCurve g_curve;

Outcome stability(const fs::path& out) {
  Grid3 g(32, 1.0, 0.5);
  auto amps = sweep_amplitudes();
  std::vector<CoefficientSpec> specs;
  for (double e : amps) specs.push_back(perturbed(e));
  CurveOptions opts;
  opts.probes = 48;
  auto t0 = std::chrono::steady_clock::now();
  g_curve = stability_curve(g, CoefficientSpec{}, specs, amps, opts);
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::ofstream(out / "curve.csv") << g_curve.to_csv();
  std::ofstream(out / "curve.json") << g_curve.to_json().dump(2) << '\n';
  PlotSeries pts{"measured", {}, {}, false, "#1f77b4"}, fit{"fit", {}, {}, true, "#d62728"};
  for (const auto& p : g_curve.points) {
    const double u = 1.0 / std::abs(std::log(p.delta_c));
    pts.x.push_back(u);
    pts.y.push_back(p.h1_error);
    fit.x.push_back(u);
    fit.y.push_back(std::exp(g_curve.log_C) * std::pow(u, g_curve.lambda));
  }
  std::ofstream(out / "curve.svg") << render_svg({"stability curve, n = 32", "1 / |log delta_C|", "H1 error", true, true},
                                                 {pts, fit});
  const bool emitted = fs::file_size(out / "curve.csv") > 0 && fs::file_size(out / "curve.svg") > 0;
  return {g_curve.lambda > 0 && g_curve.monotone && emitted && dt < 900,
          fmt("lambda %.3f, monotone %s, delta_C %.2e..%.2e, error %.2e..%.2e, %.0f s (need lambda > 0, < 900 s)",
              g_curve.lambda, g_curve.monotone ? "yes" : "no", g_curve.points.front().delta_c,
              g_curve.points.back().delta_c, g_curve.points.front().h1_error, g_curve.points.back().h1_error, dt)};
}

// 11. ||f||_L2 <= C ||f||_{H^s1}^theta ||f||_{H^s2}^(1-theta) with one C over 20 extracted fields.
Outcome interpolation() {
  std::vector<InterpolationCheck> checks = g_curve.interpolation;
  Grid3 g(24, 1.0, 0.5);
  CgoOperators o0(synth_coefficients(g, CoefficientSpec{}));
  for (double eps : {0.01, 0.03, 0.1, 0.3}) {
    CgoOperators o2(synth_coefficients(g, perturbed(eps)));
    for (double tau : {4.0, 8.0, 16.0}) {
      RecoveryConfig cfg;
      cfg.tau = tau;
      FourierSamples s = extract_fg_hat(o0, o2, cfg);
      checks.push_back(interpolation_check(invert_fourier(g, s.modes, s.f_hat), cfg.s1, cfg.s2));
    }
  }
  double mx = 0, mn = 1e300;
  for (const auto& c : checks) {
    mx = std::max(mx, c.ratio());
    mn = std::min(mn, c.ratio());
  }
  return {checks.size() >= 20 && mx <= 1.0 + 1e-12 && mn > 0,
          fmt("%zu fields, ratio in [%.3f, %.3f]; C = 1 holds for all (need max <= 1)", checks.size(), mn, mx)};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// 12. Bit-exact round trips and reruns.
Outcome determinism(const fs::path& out) {
  Grid3 g(16, 1.0, 0.5);
  const fs::path fp = out / "roundtrip.field", cp = out / "roundtrip_cauchy.bin";
  StateY y = support::random_smooth<8>(g, 5);
  write_field(fp.string(), y);
  StateY yb = read_field<8>(fp.string());
  const bool field_ok = std::memcmp(yb.raw().data(), y.raw().data(), y.raw().size() * sizeof(cplx)) == 0;

  CauchySet cs = make_cauchy_set(synth_coefficients(g, perturbed(0.05)), plane_wave_probes(12), "roundtrip");
  write_cauchy_set(cp.string(), cs);
  CauchySet cb = read_cauchy_set(cp.string());
  bool cs_ok = cb.data.size() == cs.data.size() && cb.omega == cs.omega && cb.grid == cs.grid;
  for (std::size_t i = 0; cs_ok && i < cs.data.size(); ++i)
    cs_ok = cb.data[i].T.raw() == cs.data[i].T.raw() && cb.data[i].S.raw() == cs.data[i].S.raw();

  setenv("CGO_MAXWELL_LOG", "quiet", 1);
  bool rerun_ok = true;
  for (const char* run : {"run1", "run2"}) {
    const std::string d = (out / run).string();
    fs::remove_all(d);
    rerun_ok = rerun_ok && run_cli({"maxcgo", "--grid-n", "16", "--seed", "9", "--out", d + "/syn", "synth", "--random-bumps", "2"}) == 0;
    rerun_ok = rerun_ok && run_cli({"maxcgo", "--grid-n", "16", "--out", d + "/cs.bin", "forward", "--coeff", d + "/syn/spec.json",
                                    "--probes", "8"}) == 0;
    rerun_ok = rerun_ok && run_cli({"maxcgo", "--grid-n", "16", "--seed", "9", "--out", d + "/carl", "carleman"}) == 0;
  }
  for (const char* f : {"syn/gamma.field", "syn/mu.field", "syn/spec.json", "cs.bin", "carl/carleman.csv"})
    rerun_ok = rerun_ok && slurp(out / "run1" / f) == slurp(out / "run2" / f) && !slurp(out / "run1" / f).empty();
  return {field_ok && cs_ok && rerun_ok, fmt("field round trip %s, Cauchy set round trip %s, seeded reruns %s",
                                            field_ok ? "bit-exact" : "differs", cs_ok ? "bit-exact" : "differs",
                                            rerun_ok ? "bit-identical" : "differ")};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path out = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_out");
  fs::create_directories(out);
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"factorization identity", factorization},
      {"constant-background CGO exactness", constant_background},
      {"CGO remainder decay", remainder_decay},
      {"scalar-slot vanishing", scalar_slots},
      {"Green identity", green_identity},
      {"delta_C properties", delta_c_properties},
      {"pairing oracle", pairing_oracle},
      {"elliptic recovery with exact data", elliptic_recovery},
      {"Carleman inequality", carleman},
      {"end-to-end stability curve", [&] { return stability(out); }},
      {"interpolation inequality", interpolation},
      {"I/O determinism", [&] { return determinism(out); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::printf("criterion %2zu: %s  %s: %s [%.1f s]\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first,
                o.detail.c_str(), dt);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria pass\n", int(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
