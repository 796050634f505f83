#include "maxcgo/cauchy.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "maxcgo/field_io.hpp"

namespace maxcgo {

namespace {

constexpr char kMagic[8] = {'M', 'X', 'C', 'G', 'O', 'C', 'S', '1'};

using Mat = Eigen::MatrixXcd;

Vec3 normalized(Vec3 v) {
  double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  return {v[0] / n, v[1] / n, v[2] / n};
}

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

// Columns are feature vectors; returns the orthonormal basis of the kept pivots.
struct Basis {
  Mat q;          // features x rank
  Mat r_inv;      // rank x rank, for the admittance map
  std::vector<int> cols;
  std::size_t dropped = 0;
};

Basis pivoted_basis(const Mat& m, double tol) {
  Eigen::ColPivHouseholderQR<Mat> qr(m);
  const Mat& r = qr.matrixR();
  const int k = static_cast<int>(std::min(m.rows(), m.cols()));
  double top = k > 0 ? std::abs(r(0, 0)) : 0.0;
  int rank = 0;
  while (rank < k && std::abs(r(rank, rank)) > tol * top) ++rank;
  Basis b;
  b.dropped = static_cast<std::size_t>(m.cols() - rank);
  Mat q = qr.householderQ() * Mat::Identity(m.rows(), rank);
  b.q = std::move(q);
  Mat rr = r.topLeftCorner(rank, rank).triangularView<Eigen::Upper>();
  b.r_inv = rr.triangularView<Eigen::Upper>().solve(Mat::Identity(rank, rank));
  for (int i = 0; i < rank; ++i) b.cols.push_back(qr.colsPermutation().indices()[i]);
  return b;
}

Eigen::VectorXcd to_vec(const std::vector<cplx>& v) {
  return Eigen::Map<const Eigen::VectorXcd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::VectorXcd datum_features(const CauchyDatum& d) {
  std::vector<cplx> f = th_features(d.T);
  std::vector<cplx> s = th_features(d.S);
  f.insert(f.end(), s.begin(), s.end());
  return to_vec(f);
}

Mat feature_matrix(const CauchySet& c) {
  Mat m;
  for (std::size_t j = 0; j < c.data.size(); ++j) {
    Eigen::VectorXcd v = datum_features(c.data[j]);
    if (j == 0) m.resize(v.size(), static_cast<Eigen::Index>(c.data.size()));
    m.col(static_cast<Eigen::Index>(j)) = v;
  }
  return m;
}

// sup over the samples of `from`, normalized to unit T norm, of the distance to span(to).
double directed(const CauchySet& from, const Basis& to) {
  double worst = 0;
  for (const auto& d : from.data) {
    double tn = th_hilbert_norm(d.T);
    if (tn == 0) continue;
    Eigen::VectorXcd v = datum_features(d) / tn;
    Eigen::VectorXcd res = v - to.q * (to.q.adjoint() * v);
    worst = std::max(worst, res.norm());
  }
  return worst;
}

void check_compatible(const CauchySet& a, const CauchySet& b) {
  if (!(a.grid == b.grid)) throw GridMismatch();
  if (a.omega != b.omega) throw ConfigError("Cauchy sets sampled at different frequencies");
  if (a.data.empty() || b.data.empty()) throw ConfigError("empty Cauchy set");
}

}  // namespace

std::string spec_hash(const CoefficientSpec& spec) {
  std::string s = spec_to_json(spec).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<Probe> plane_wave_probes(int count) {
  if (count < 2 || count % 2) throw ConfigError("probe count must be a positive even number");
  const int dirs = count / 2;
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  std::vector<Probe> out;
  for (int i = 0; i < dirs; ++i) {
    double z = 1.0 - (2.0 * i + 1.0) / dirs;
    double r = std::sqrt(1.0 - z * z);
    Vec3 d{r * std::cos(golden * i), r * std::sin(golden * i), z};
    int m = 0;
    for (int a = 1; a < 3; ++a)
      if (std::abs(d[a]) < std::abs(d[m])) m = a;
    Vec3 e{};
    e[m] = 1.0;
    Vec3 p1 = normalized(cross(d, e)), p2 = cross(d, p1);
    out.push_back({d, {p1[0], p1[1], p1[2]}});
    out.push_back({d, {p2[0], p2[1], p2[2]}});
  }
  return out;
}

BoundaryField probe_trace(const Grid3& g, const Probe& p, double k0) {
  return tangential_trace(g, [&](int i, int j, int k) {
    double phase = k0 * (p.direction[0] * g.coord(i) + p.direction[1] * g.coord(j) + p.direction[2] * g.coord(k));
    cplx e = std::exp(cplx(0, phase));
    return CVec3{p.polarization[0] * e, p.polarization[1] * e, p.polarization[2] * e};
  });
}

CauchySet make_cauchy_set(const CoefficientPair& c, const std::vector<Probe>& probes, const std::string& hash,
                          const ForwardOptions& opts) {
  CauchySet cs{c.grid(), c.omega, hash, {}, nlohmann::json::array()};
  ForwardSolver solver(c, opts);
  std::vector<BoundaryField> Ts;
  for (const Probe& p : probes) {
    Ts.push_back(probe_trace(c.grid(), p, c.kappa0()));
    nlohmann::json pol = nlohmann::json::array();
    for (const cplx& v : p.polarization) pol.push_back({v.real(), v.imag()});
    cs.probes.push_back({{"direction", p.direction}, {"polarization", pol}});
  }
  auto sols = solver.solve_many(Ts);
  for (auto& s : sols) cs.data.push_back({std::move(s.T), std::move(s.S)});
  return cs;
}

void write_cauchy_set(const std::string& path, const CauchySet& cs) {
  const Grid3& g = cs.grid;
  nlohmann::json header = {
      {"grid", {{"n", g.n()}, {"L", g.L()}, {"a", g.a()}}},
      {"kind", "cauchy_set"},
      {"omega", cs.omega},
      {"spec_hash", cs.spec_hash},
      {"count", cs.data.size()},
      {"face_nodes", g.omega_cells() + 1},
      {"dtype", "complex64-pair-of-float64"},
      {"layout", "per datum: T then S; per field: face-major, component, q, p fastest"},
      {"probes", cs.probes},
  };
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  std::string h = header.dump();
  os.write(kMagic, sizeof kMagic);
  write_le_u64(os, h.size());
  os.write(h.data(), static_cast<std::streamsize>(h.size()));
  for (const auto& d : cs.data) {
    write_le_samples(os, d.T.raw());
    write_le_samples(os, d.S.raw());
  }
  if (!os) throw IoError("write failed: " + path);
}

CauchySet read_cauchy_set(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  char magic[8];
  is.read(magic, sizeof magic);
  if (!is || std::string(magic, 8) != std::string(kMagic, 8)) throw IoError(path + ": not a Cauchy set file");
  std::uint64_t len = read_le_u64(is);
  if (len > (1u << 26)) throw IoError(path + ": implausible header length");
  std::string h(len, '\0');
  is.read(h.data(), static_cast<std::streamsize>(len));
  if (!is) throw IoError(path + ": truncated header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(h);
    Grid3 g(header.at("grid").at("n").get<int>(), header.at("grid").at("L").get<double>(),
            header.at("grid").at("a").get<double>());
    CauchySet cs{g, header.at("omega").get<double>(), header.at("spec_hash").get<std::string>(), {},
                 header.value("probes", nlohmann::json::array())};
    const std::size_t count = header.at("count").get<std::size_t>();
    for (std::size_t i = 0; i < count; ++i) {
      CauchyDatum d{BoundaryField(g, 2), BoundaryField(g, 2)};
      d.T.raw() = read_le_samples(is, d.T.raw().size());
      d.S.raw() = read_le_samples(is, d.S.raw().size());
      cs.data.push_back(std::move(d));
    }
    return cs;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": bad header: " + e.what());
  } catch (const ConfigError& e) {
    throw IoError(path + ": bad grid: " + e.what());
  }
}

nlohmann::json DistanceReport::to_json() const {
  return {{"delta_c", delta}, {"d12", d12}, {"d21", d21}, {"dropped1", dropped1}, {"dropped2", dropped2}};
}

DistanceReport delta_c(const CauchySet& c1, const CauchySet& c2, double pivot_tol) {
  check_compatible(c1, c2);
  Basis b1 = pivoted_basis(feature_matrix(c1), pivot_tol);
  Basis b2 = pivoted_basis(feature_matrix(c2), pivot_tol);
  DistanceReport r;
  r.d12 = directed(c1, b2);
  r.d21 = directed(c2, b1);
  r.delta = std::max(r.d12, r.d21);
  r.dropped1 = b1.dropped;
  r.dropped2 = b2.dropped;
  return r;
}

double admittance_difference(const CauchySet& c1, const CauchySet& c2, double pivot_tol) {
  check_compatible(c1, c2);
  if (c1.data.size() != c2.data.size()) throw ConfigError("admittance difference needs the same probes");
  const auto n = static_cast<Eigen::Index>(c1.data.size());
  Mat ft, fd;
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& d1 = c1.data[j];
    const auto& d2 = c2.data[j];
    if (d1.T.raw() != d2.T.raw()) throw ConfigError("admittance difference needs identical probe traces");
    Eigen::VectorXcd t = to_vec(th_features(d1.T));
    BoundaryField ds = d1.S;
    ds -= d2.S;
    Eigen::VectorXcd s = to_vec(th_features(ds));
    if (j == 0) {
      ft.resize(t.size(), n);
      fd.resize(s.size(), n);
    }
    ft.col(j) = t;
    fd.col(j) = s;
  }
  Basis b = pivoted_basis(ft, pivot_tol);
  Mat kept(fd.rows(), static_cast<Eigen::Index>(b.cols.size()));
  for (std::size_t i = 0; i < b.cols.size(); ++i) kept.col(static_cast<Eigen::Index>(i)) = fd.col(b.cols[i]);
  Mat m = kept * b.r_inv;
  Eigen::SelfAdjointEigenSolver<Mat> eig(m.adjoint() * m);
  return std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
}

}  // namespace maxcgo
