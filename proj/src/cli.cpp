#include "maxcgo/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "maxcgo/carleman.hpp"
#include "maxcgo/cauchy.hpp"
#include "maxcgo/cgo.hpp"
#include "maxcgo/field_io.hpp"
#include "maxcgo/parallel.hpp"
#include "maxcgo/recovery.hpp"
#include "maxcgo/svg.hpp"

namespace maxcgo {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kToolVersion = "0.1.0";

// CGO_MAXWELL_LOG: 0/quiet, 1/info (default), 2/debug.
int log_level() {
  const char* v = std::getenv("CGO_MAXWELL_LOG");
  if (!v || !*v) return 1;
  std::string s(v);
  if (s == "quiet" || s == "0" || s == "error") return 0;
  if (s == "debug" || s == "2") return 2;
  return 1;
}

void log(int level, const std::string& msg) {
  if (level <= log_level()) std::cerr << "[maxcgo] " << msg << '\n';
}

std::string fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct Globals {
  int n = 32;
  double L = 1.0;
  double a = 0.5;
  int threads = 1;
  std::uint64_t seed = 0;
  std::string out;
  Grid3 grid() const { return Grid3(n, L, a); }
};

// --out is a directory, or a file path whose parent becomes the directory.
struct OutTarget {
  fs::path dir;
  fs::path file;
};

OutTarget resolve_out(const std::string& out, const std::string& default_name) {
  if (out.empty()) throw ConfigError("--out is required");
  fs::path p(out);
  OutTarget t;
  if (p.has_extension() && !fs::is_directory(p)) {
    t.dir = p.has_parent_path() ? p.parent_path() : fs::path(".");
    t.file = p;
  } else {
    t.dir = p;
    t.file = p / default_name;
  }
  std::error_code ec;
  fs::create_directories(t.dir, ec);
  if (ec) throw IoError("cannot create " + t.dir.string() + ": " + ec.message());
  return t;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw IoError("cannot open " + p.string() + " for writing");
  os << text;
  if (!os) throw IoError("write failed: " + p.string());
}

// One manifest per directory. A rerun replaces the earlier entry that wrote the same files.
class Manifest {
 public:
  Manifest(std::string command, const Globals& g, json config)
      : command_(std::move(command)), globals_(g), config_(std::move(config)), start_(std::chrono::steady_clock::now()) {}
  void input(const std::string& p) { inputs_.push_back(p); }
  void output(const fs::path& p) { outputs_.push_back(p.filename().string()); }

  void write(const fs::path& dir) const {
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    json cfg = {{"grid", {{"n", globals_.n}, {"L", globals_.L}, {"a", globals_.a}}}, {"options", config_}};
    json run = {{"command", command_},
                {"config", cfg},
                {"config_hash", fnv1a(cfg.dump())},
                {"inputs", inputs_},
                {"outputs", outputs_},
                {"seed", globals_.seed},
                {"threads", globals_.threads},
                {"tool_version", kToolVersion},
                {"wall_time_s", wall}};
    const fs::path path = dir / "manifest.json";
    json runs = json::array();
    if (fs::exists(path)) {
      std::ifstream is(path);
      json old;
      try {
        is >> old;
      } catch (const json::exception&) {
        old = json::object();
      }
      for (const auto& r : old.value("runs", json::array())) {
        bool clash = false;
        for (const auto& o : r.value("outputs", json::array()))
          for (const auto& mine : outputs_) clash = clash || o == mine;
        if (!clash) runs.push_back(r);
      }
    }
    runs.push_back(run);
    write_text(path, json{{"runs", runs}}.dump(2) + "\n");
  }

 private:
  std::string command_;
  Globals globals_;
  json config_;
  std::vector<std::string> inputs_, outputs_;
  std::chrono::steady_clock::time_point start_;
};

CoefficientSpec random_spec(std::uint64_t seed, int count, double rho) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  CoefficientSpec s;
  s.M = 25.0;
  auto bump = [&](bool complex_amp) {
    Bump b;
    b.radius = 0.5 * rho + 0.2 * rho * unit(rng);
    const double room = 0.9 * (rho - b.radius) / std::sqrt(3.0);
    for (int d = 0; d < 3; ++d) b.center[d] = room * (2 * unit(rng) - 1);
    b.amplitude = cplx(0.2 * unit(rng) - 0.1, complex_amp ? 0.05 * unit(rng) : 0.0);
    return b;
  };
  for (int i = 0; i < count; ++i) {
    s.gamma_bumps.push_back(bump(true));
    s.mu_bumps.push_back(bump(false));
  }
  return s;
}

std::array<int, 3> parse_mode(const std::vector<int>& v) {
  if (v.size() != 3) throw ConfigError("a lattice mode needs three integers");
  return {v[0], v[1], v[2]};
}

PolarizationMode parse_polarization(const std::string& s) {
  if (s == "alpha") return PolarizationMode::Alpha;
  if (s == "beta") return PolarizationMode::Beta;
  throw ConfigError("mode must be alpha or beta");
}

double parse_rcut(const std::string& s) {
  if (s == "auto") return 0.0;
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos == s.size() && v > 0) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("--rcut must be auto or a positive number");
}

// ---- commands ----

void cmd_synth(const Globals& G, const std::string& spec_path, int random_bumps) {
  const Grid3 g = G.grid();
  CoefficientSpec spec = spec_path.empty() ? random_spec(G.seed, random_bumps, g.rho()) : load_spec(spec_path);
  const CoefficientPair c = synth_coefficients(g, spec);
  const AdmissibilityReport adm = check_admissible(c);
  if (!adm.ellipticity) throw ConfigError("coefficients violate ellipticity");

  OutTarget t = resolve_out(G.out, "spec.json");
  Manifest m("synth", G, {{"spec", spec_path}, {"random_bumps", random_bumps}});
  if (!spec_path.empty()) m.input(spec_path);
  const std::string hash = spec_hash(spec);
  const fs::path spec_out = t.dir / "spec.json", gam = t.dir / "gamma.field", mu = t.dir / "mu.field",
                 adm_out = t.dir / "admissibility.json";
  write_text(spec_out, spec_to_json(spec).dump(2) + "\n");
  write_field(gam.string(), c.gamma, {{"spec_hash", hash}, {"name", "gamma"}});
  write_field(mu.string(), c.mu, {{"spec_hash", hash}, {"name", "mu"}});
  write_text(adm_out, adm.to_json().dump(2) + "\n");
  for (const auto& p : {spec_out, gam, mu, adm_out}) m.output(p);
  m.write(t.dir);
  log(1, "synth: spec " + hash + (adm.all() ? ", admissible" : ", not all admissibility checks pass"));
}

void cmd_forward(const Globals& G, const std::string& coeff, int probes) {
  const Grid3 g = G.grid();
  const CoefficientSpec spec = load_spec(coeff);
  const CoefficientPair c = synth_coefficients(g, spec);
  if (probes < 2) throw ConfigError("need at least two probes");
  OutTarget t = resolve_out(G.out, "cauchy.bin");
  Manifest m("forward", G, {{"coeff", coeff}, {"probes", probes}});
  m.input(coeff);
  log(1, "forward: " + std::to_string(probes) + " probes on n = " + std::to_string(g.n()));
  const CauchySet cs = make_cauchy_set(c, plane_wave_probes(probes), spec_hash(spec));
  write_cauchy_set(t.file.string(), cs);
  m.output(t.file);
  m.write(t.dir);
}

void cmd_distance(const Globals& G, const std::string& c1, const std::string& c2, bool admittance) {
  const CauchySet s1 = read_cauchy_set(c1), s2 = read_cauchy_set(c2);
  const DistanceReport r = delta_c(s1, s2);
  std::printf("delta_c %.6e\n", r.delta);
  json j = r.to_json();
  if (admittance) {
    const double a = admittance_difference(s1, s2);
    std::printf("admittance_difference %.6e\n", a);
    j["admittance_difference"] = a;
  }
  if (!G.out.empty()) {
    OutTarget t = resolve_out(G.out, "distance.json");
    Manifest m("distance", G, {{"c1", c1}, {"c2", c2}, {"admittance", admittance}});
    m.input(c1);
    m.input(c2);
    write_text(t.file, j.dump(2) + "\n");
    m.output(t.file);
    m.write(t.dir);
  }
}

void cmd_cgo(const Globals& G, const std::string& coeff, double tau, const std::vector<int>& mode_v,
             const std::string& pol) {
  const Grid3 g = G.grid();
  const CoefficientSpec spec = load_spec(coeff);
  const CgoOperators ops(synth_coefficients(g, spec));
  const ZetaPair zp = zeta_pair_for_mode(g, parse_mode(mode_v), tau, ops.coeffs.k0sq());
  const PairPolarization p = pairing_polarization(zp, parse_polarization(pol));
  FaddeevConfig f1, f2;
  f1.zeta = zp.zeta1;
  f2.zeta = zp.zeta2;
  const CgoSolution z = build_maxwell_cgo(ops, f1, p.a1, p.b1);
  const CgoSolution y = build_adjoint_cgo(ops, f2, p.a2_hat, p.b2_hat);

  OutTarget t = resolve_out(G.out, "cgo.json");
  Manifest m("cgo", G, {{"coeff", coeff}, {"tau", tau}, {"mode", mode_v}, {"polarization", pol}});
  m.input(coeff);
  auto zjson = [](const CVec3& z) {
    json a = json::array();
    for (const cplx& v : z) a.push_back({v.real(), v.imag()});
    return a;
  };
  const fs::path zf = t.dir / "cgo_Z.field", yf = t.dir / "cgo_Y_adjoint.field";
  write_field(zf.string(), z.Z.values(), {{"zeta", zjson(zp.zeta1)}, {"kind", "schrodinger"}});
  write_field(yf.string(), y.Y.values(), {{"zeta", zjson(zp.zeta2)}, {"kind", "adjoint"}});
  json diag = {{"zeta1", zjson(zp.zeta1)},
               {"zeta2", zjson(zp.zeta2)},
               {"tau", tau},
               {"schrodinger", z.diag.to_json()},
               {"adjoint", y.diag.to_json()}};
  write_text(t.file, diag.dump(2) + "\n");
  for (const auto& f : {zf, yf, t.file}) m.output(f);
  m.write(t.dir);
  log(1, "cgo: remainder fixed point took " + std::to_string(z.diag.fixed_point.iterations) + " iterations");
}

void cmd_recover(const Globals& G, const std::string& coeff1, const std::string& coeff2, double tau,
                 const std::string& rcut) {
  const Grid3 g = G.grid();
  const CoefficientSpec s1 = load_spec(coeff1), s2 = load_spec(coeff2);
  RecoveryConfig cfg;
  cfg.tau = tau;
  cfg.r_cut = parse_rcut(rcut);
  cfg.threads = G.threads;
  cfg.validate();
  const CgoOperators o1(synth_coefficients(g, s1)), o2(synth_coefficients(g, s2));
  log(1, "recover: extracting f, g at tau = " + std::to_string(tau));
  const FourierSamples fsm = extract_fg_hat(o1, o2, cfg);
  const ScalarField f = invert_fourier(g, fsm.modes, fsm.f_hat);
  const ScalarField gg = invert_fourier(g, fsm.modes, fsm.g_hat);
  const RecoveryReport rep = invert_and_solve(f, gg, o1.coeffs, o2.coeffs);

  OutTarget t = resolve_out(G.out, "report.json");
  Manifest m("recover", G, {{"coeff1", coeff1}, {"coeff2", coeff2}, {"tau", tau}, {"rcut", rcut}});
  m.input(coeff1);
  m.input(coeff2);
  json j = rep.to_json();
  j["tau"] = fsm.tau;
  j["r_cut"] = fsm.r_cut;
  j["modes"] = fsm.modes.size();
  j["failed_modes"] = fsm.failures();
  const fs::path ff = t.dir / "f.field", gf = t.dir / "g.field", g2 = t.dir / "gamma2.field", m2 = t.dir / "mu2.field";
  write_field(ff.string(), rep.f);
  write_field(gf.string(), rep.g);
  write_field(g2.string(), rep.gamma2);
  write_field(m2.string(), rep.mu2);
  write_text(t.file, j.dump(2) + "\n");
  for (const auto& p : {ff, gf, g2, m2, t.file}) m.output(p);
  m.write(t.dir);
}

CoefficientSpec scaled_sum(const CoefficientSpec& base, const CoefficientSpec& pert, double amp) {
  CoefficientSpec s = base;
  for (Bump b : pert.gamma_bumps) {
    b.amplitude *= amp;
    s.gamma_bumps.push_back(b);
  }
  for (Bump b : pert.mu_bumps) {
    b.amplitude *= amp;
    s.mu_bumps.push_back(b);
  }
  return s;
}

std::string curve_svg(const std::vector<double>& u, const std::vector<double>& err, double lambda, double log_C,
                      const std::string& title) {
  PlotSeries pts{"measured", {}, {}, false, "#1f77b4"};
  for (std::size_t i = 0; i < u.size(); ++i) {
    pts.x.push_back(u[i]);
    pts.y.push_back(err[i]);
  }
  PlotSeries fit{"C |log d|^-lambda", {}, {}, true, "#d62728"};
  double lo = 1e300, hi = 0;
  for (double v : u)
    if (v > 0 && std::isfinite(v)) lo = std::min(lo, v), hi = std::max(hi, v);
  if (hi > 0)
    for (int k = 0; k <= 40; ++k) {
      const double x = lo * std::pow(hi / lo, k / 40.0);
      fit.x.push_back(x);
      fit.y.push_back(std::exp(log_C) * std::pow(x, lambda));
    }
  PlotSpec spec{title, "1 / |log delta_C|", "H1 error", true, true};
  return render_svg(spec, {pts, fit});
}

void cmd_curve(const Globals& G, const std::string& base_path, const std::string& pert_path,
               const std::vector<double>& amplitudes, int probes, double tau_max) {
  const Grid3 g = G.grid();
  const CoefficientSpec base = load_spec(base_path), pert = load_spec(pert_path);
  if (amplitudes.empty()) throw ConfigError("no amplitudes");
  std::vector<CoefficientSpec> specs;
  for (double a : amplitudes) specs.push_back(scaled_sum(base, pert, a));
  CurveOptions opts;
  opts.probes = probes;
  opts.tau_max = tau_max;
  opts.recovery.threads = G.threads;
  log(1, "curve: " + std::to_string(amplitudes.size()) + " amplitudes");
  const StabilityCurve c = stability_curve(g, base, specs, amplitudes, opts);

  OutTarget t = resolve_out(G.out, "curve.csv");
  Manifest m("curve", G, {{"base", base_path}, {"perturbation", pert_path}, {"amplitudes", amplitudes}, {"probes", probes},
                          {"tau_max", tau_max}});
  m.input(base_path);
  m.input(pert_path);
  std::vector<double> u, e;
  for (const auto& p : c.points) {
    u.push_back(1.0 / std::abs(std::log(p.delta_c)));
    e.push_back(p.h1_error);
  }
  const fs::path js = t.dir / "curve.json", svg = t.dir / "curve.svg";
  write_text(t.file, c.to_csv());
  write_text(js, c.to_json().dump(2) + "\n");
  write_text(svg, curve_svg(u, e, c.lambda, c.log_C, "stability curve"));
  for (const auto& p : {t.file, js, svg}) m.output(p);
  m.write(t.dir);
  std::printf("lambda %.6e monotone %s\n", c.lambda, c.monotone ? "yes" : "no");
}

void cmd_carleman(const Globals& G, const std::string& field, const std::vector<double>& hs, const std::vector<double>& x0) {
  const Grid3 g = G.grid();
  ScalarField u = field.empty() ? random_test_function(g, G.seed) : read_field<1>(field);
  CarlemanConfig cfg;
  if (!hs.empty()) cfg.h_values = hs;
  if (!x0.empty()) {
    if (x0.size() != 3) throw ConfigError("--x0 needs three coordinates");
    cfg.x0 = {x0[0], x0[1], x0[2]};
    cfg.x0_set = true;
  }
  const auto rows = carleman_sweep(u, cfg, G.threads);
  OutTarget t = resolve_out(G.out, "carleman.csv");
  Manifest m("carleman", G, {{"field", field}, {"h", cfg.h_values}, {"x0", x0}});
  if (!field.empty()) m.input(field);
  write_text(t.file, carleman_csv(rows));
  m.output(t.file);
  m.write(t.dir);
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  int column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  }
};

CsvTable read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  CsvTable t;
  std::string line;
  if (!std::getline(is, line)) throw ConfigError(path + ": empty CSV");
  std::stringstream hs(line);
  for (std::string cell; std::getline(hs, cell, ',');) t.header.push_back(cell);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ConfigError(path + ": bad number '" + cell + "'");
      }
    }
    if (row.size() != t.header.size()) throw ConfigError(path + ": ragged row");
    t.rows.push_back(std::move(row));
  }
  return t;
}

void cmd_report(const Globals& G, const std::vector<std::string>& csvs) {
  if (csvs.empty()) throw ConfigError("report needs at least one curve CSV");
  OutTarget t = resolve_out(G.out, "report.svg");
  Manifest m("report", G, {{"inputs", csvs}});
  const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b", "#e377c2"};
  std::vector<PlotSeries> series;
  std::ostringstream md;
  md << "| curve | points | lambda_fit | min delta_c | max delta_c | min h1_error | max h1_error |\n";
  md << "|---|---|---|---|---|---|---|\n";
  std::vector<double> all_u, all_e;
  for (std::size_t k = 0; k < csvs.size(); ++k) {
    m.input(csvs[k]);
    const CsvTable tab = read_csv(csvs[k]);
    const int cd = tab.column("delta_c"), ce = tab.column("h1_error"), cl = tab.column("lambda_fit");
    if (cd < 0 || ce < 0 || cl < 0) throw ConfigError(csvs[k] + ": missing curve columns");
    PlotSeries s{fs::path(csvs[k]).stem().string(), {}, {}, false, colors[k % 6]};
    double dmin = 1e300, dmax = 0, emin = 1e300, emax = 0, lam = 0;
    for (const auto& r : tab.rows) {
      const double u = 1.0 / std::abs(std::log(r[cd]));
      s.x.push_back(u);
      s.y.push_back(r[ce]);
      if (r[cd] > 0 && r[cd] < 1 && r[ce] > 0) {
        all_u.push_back(u);
        all_e.push_back(r[ce]);
      }
      dmin = std::min(dmin, r[cd]);
      dmax = std::max(dmax, r[cd]);
      emin = std::min(emin, r[ce]);
      emax = std::max(emax, r[ce]);
      lam = r[cl];
    }
    md << "| " << s.name << " | " << tab.rows.size() << " | " << lam << " | " << dmin << " | " << dmax << " | " << emin
       << " | " << emax << " |\n";
    series.push_back(std::move(s));
  }
  // Pooled least-squares fit log e = log C + lambda log u.
  if (all_u.size() >= 2) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < all_u.size(); ++i) mx += std::log(all_u[i]), my += std::log(all_e[i]);
    mx /= all_u.size();
    my /= all_u.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < all_u.size(); ++i) {
      sxy += (std::log(all_u[i]) - mx) * (std::log(all_e[i]) - my);
      sxx += std::pow(std::log(all_u[i]) - mx, 2);
    }
    if (sxx > 0) {
      const double lam = sxy / sxx, logC = my - lam * mx;
      PlotSeries fit{"pooled fit", {}, {}, true, "#d62728"};
      const double lo = *std::min_element(all_u.begin(), all_u.end()), hi = *std::max_element(all_u.begin(), all_u.end());
      for (int k = 0; k <= 40; ++k) {
        const double x = lo * std::pow(hi / lo, k / 40.0);
        fit.x.push_back(x);
        fit.y.push_back(std::exp(logC) * std::pow(x, lam));
      }
      series.push_back(fit);
      md << "\npooled lambda: " << lam << "\n";
    }
  }
  const fs::path summary = t.dir / "summary.md";
  write_text(t.file, render_svg({"stability curves", "1 / |log delta_C|", "H1 error", true, true}, series));
  write_text(summary, md.str());
  std::cout << md.str();
  m.output(t.file);
  m.output(summary);
  m.write(t.dir);
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Maxwell CGO stability toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals G;
  app.add_option("--grid-n", G.n, "nodes per axis of the periodic box")->capture_default_str();
  app.add_option("--box-L", G.L, "box half width")->capture_default_str();
  app.add_option("--omega-a", G.a, "half width of the cube Omega")->capture_default_str();
  app.add_option("--threads", G.threads, "worker threads")->capture_default_str();
  app.add_option("--seed", G.seed, "random seed")->capture_default_str();
  app.add_option("--out", G.out, "output directory or file");

  std::string spec, coeff, coeff1, coeff2, c1, c2, base, pert, field, pol = "alpha", rcut = "auto";
  int random_bumps = 0, probes = 48;
  double tau = 16.0, tau_max = 16.0;
  bool admittance = false;
  std::vector<int> mode{1, 0, 0};
  std::vector<double> amplitudes, hs, x0;
  std::vector<std::string> csvs;

  auto* synth = app.add_subcommand("synth", "write coefficient fields from a spec or random bumps");
  synth->add_option("--spec", spec, "coefficient spec JSON");
  synth->add_option("--random-bumps", random_bumps, "random bumps per coefficient when no spec is given");

  auto* forward = app.add_subcommand("forward", "forward solves and Cauchy data set");
  forward->add_option("--coeff", coeff)->required();
  forward->add_option("--probes", probes)->capture_default_str();

  auto* distance = app.add_subcommand("distance", "pseudo-distance between two Cauchy data sets");
  distance->add_option("--c1", c1)->required();
  distance->add_option("--c2", c2)->required();
  distance->add_flag("--admittance", admittance, "also report the admittance-map difference");

  auto* cgo = app.add_subcommand("cgo", "CGO and adjoint CGO solutions for one lattice mode");
  cgo->add_option("--coeff", coeff)->required();
  cgo->add_option("--tau", tau)->capture_default_str();
  cgo->add_option("--mode", mode, "lattice mode m, xi = pi m / L")->delimiter(',')->expected(3);
  cgo->add_option("--polarization", pol, "alpha or beta")->capture_default_str();

  auto* recover = app.add_subcommand("recover", "extract f, g and solve for the coefficient differences");
  recover->add_option("--coeff1", coeff1)->required();
  recover->add_option("--coeff2", coeff2)->required();
  recover->add_option("--tau", tau)->capture_default_str();
  recover->add_option("--rcut", rcut, "auto or a radius")->capture_default_str();

  auto* curve = app.add_subcommand("curve", "stability curve over an amplitude sweep");
  curve->add_option("--base", base)->required();
  curve->add_option("--perturbation", pert, "bumps added with each amplitude")->required();
  curve->add_option("--amplitudes", amplitudes)->delimiter(',')->required();
  curve->add_option("--probes", probes)->capture_default_str();
  curve->add_option("--tau-max", tau_max)->capture_default_str();

  auto* carleman = app.add_subcommand("carleman", "weighted inequality ratios for one field");
  carleman->add_option("--field", field, "scalar field file (default: random test function from --seed)");
  carleman->add_option("--h-values", hs)->delimiter(',');
  carleman->add_option("--x0", x0)->delimiter(',')->expected(3);

  auto* report = app.add_subcommand("report", "plot and tabulate curve CSVs");
  report->add_option("csv", csvs, "curve CSV files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (G.threads < 1) throw ConfigError("--threads must be positive");
    set_default_threads(G.threads);
    if (*synth) cmd_synth(G, spec, random_bumps);
    else if (*forward) cmd_forward(G, coeff, probes);
    else if (*distance) cmd_distance(G, c1, c2, admittance);
    else if (*cgo) cmd_cgo(G, coeff, tau, mode, pol);
    else if (*recover) cmd_recover(G, coeff1, coeff2, tau, rcut);
    else if (*curve) cmd_curve(G, base, pert, amplitudes, probes, tau_max);
    else if (*carleman) cmd_carleman(G, field, hs, x0);
    else if (*report) cmd_report(G, csvs);
  } catch (const ConfigError& e) {
    log(0, std::string("config error: ") + e.what());
    return 2;
  } catch (const NumericError& e) {
    log(0, std::string("numeric failure: ") + e.what());
    return 3;
  } catch (const IoError& e) {
    log(0, std::string("I/O error: ") + e.what());
    return 4;
  } catch (const nlohmann::json::exception& e) {
    log(0, std::string("config error: ") + e.what());
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    log(0, std::string("I/O error: ") + e.what());
    return 4;
  }
  return 0;
}

}  // namespace maxcgo
