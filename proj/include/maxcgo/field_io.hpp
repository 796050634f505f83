#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "maxcgo/grid.hpp"

namespace maxcgo {

// Container: 8-byte magic, uint64 little-endian header length, JSON header,
// then little-endian float64 (re, im) pairs, component-major, x fastest.
struct RawField {
  Grid3 grid;
  std::string kind;  // scalar | vector | state8
  int components;
  std::vector<cplx> values;
  nlohmann::json extra;
};

void write_field_file(const std::string& path, const Grid3& g, const std::string& kind, int components,
                      const std::vector<cplx>& values, const nlohmann::json& extra = nlohmann::json::object());
RawField read_field_file(const std::string& path);

template <int N>
const char* field_kind() {
  if constexpr (N == 1) return "scalar";
  else if constexpr (N == 3) return "vector";
  else return "state8";
}

template <int N>
void write_field(const std::string& path, const Field<N>& f, const nlohmann::json& extra = nlohmann::json::object()) {
  write_field_file(path, f.grid(), field_kind<N>(), N, f.raw(), extra);
}

template <int N>
Field<N> read_field(const std::string& path) {
  RawField r = read_field_file(path);
  if (r.components != N) throw IoError(path + ": expected a " + field_kind<N>() + " field, found " + r.kind);
  Field<N> f(r.grid);
  f.raw() = std::move(r.values);
  return f;
}

// Little-endian helpers shared by the other binary containers.
void write_le_u64(std::ostream& os, std::uint64_t v);
std::uint64_t read_le_u64(std::istream& is);
void write_le_samples(std::ostream& os, const std::vector<cplx>& v);
std::vector<cplx> read_le_samples(std::istream& is, std::size_t count);

}  // namespace maxcgo
