#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "maxcgo/boundary.hpp"
#include "maxcgo/coefficients.hpp"
#include "maxcgo/forward.hpp"

namespace maxcgo {

struct CauchyDatum {
  BoundaryField T, S;  // N x E, N x H
};

struct CauchySet {
  Grid3 grid;
  double omega = 1.0;
  std::string spec_hash;
  std::vector<CauchyDatum> data;
  nlohmann::json probes = nlohmann::json::array();
};

// FNV-1a of the canonical JSON dump, as 16 hex digits.
std::string spec_hash(const CoefficientSpec& spec);

struct Probe {
  Vec3 direction;
  CVec3 polarization;
};
// count / 2 Fibonacci-sphere directions, two polarizations each.
std::vector<Probe> plane_wave_probes(int count);
BoundaryField probe_trace(const Grid3& g, const Probe& p, double k0);

CauchySet make_cauchy_set(const CoefficientPair& c, const std::vector<Probe>& probes, const std::string& hash = "",
                          const ForwardOptions& opts = {});

void write_cauchy_set(const std::string& path, const CauchySet& cs);
CauchySet read_cauchy_set(const std::string& path);

struct DistanceReport {
  double delta = 0.0;
  double d12 = 0.0;  // sup over C1 of the distance to span C2
  double d21 = 0.0;
  std::size_t dropped1 = 0, dropped2 = 0;  // columns removed by the pivot threshold
  nlohmann::json to_json() const;
};

// Pseudo-distance between the sampled Cauchy data sets in the TH product norm.
DistanceReport delta_c(const CauchySet& c1, const CauchySet& c2, double pivot_tol = 1e-12);

// ||Lambda_1 - Lambda_2|| restricted to the span of the shared probe traces.
double admittance_difference(const CauchySet& c1, const CauchySet& c2, double pivot_tol = 1e-12);

}  // namespace maxcgo
