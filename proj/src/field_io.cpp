#include "maxcgo/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace maxcgo {

namespace {
constexpr char kMagic[8] = {'M', 'X', 'C', 'G', 'O', 'F', 'L', '1'};

std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  else {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
    return r;
  }
}
}  // namespace

void write_le_u64(std::ostream& os, std::uint64_t v) {
  v = to_le(v);
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint64_t read_le_u64(std::istream& is) {
  std::uint64_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!is) throw IoError("truncated container");
  return to_le(v);
}

void write_le_samples(std::ostream& os, const std::vector<cplx>& v) {
  if constexpr (std::endian::native == std::endian::little) {
    os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(cplx)));
  } else {
    for (const cplx& z : v) {
      write_le_u64(os, std::bit_cast<std::uint64_t>(z.real()));
      write_le_u64(os, std::bit_cast<std::uint64_t>(z.imag()));
    }
  }
}

std::vector<cplx> read_le_samples(std::istream& is, std::size_t count) {
  std::vector<cplx> v(count);
  if constexpr (std::endian::native == std::endian::little) {
    is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(count * sizeof(cplx)));
    if (!is) throw IoError("truncated sample block");
  } else {
    for (auto& z : v) {
      double re = std::bit_cast<double>(read_le_u64(is));
      double im = std::bit_cast<double>(read_le_u64(is));
      z = {re, im};
    }
  }
  return v;
}

void write_field_file(const std::string& path, const Grid3& g, const std::string& kind, int components,
                      const std::vector<cplx>& values, const nlohmann::json& extra) {
  nlohmann::json header = {
      {"grid", {{"n", g.n()}, {"L", g.L()}, {"a", g.a()}}},
      {"kind", kind},
      {"components", components},
      {"dtype", "complex64-pair-of-float64"},
      {"layout", "row-major x-fastest"},
  };
  if (!extra.empty()) header["extra"] = extra;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  std::string h = header.dump();
  os.write(kMagic, sizeof kMagic);
  write_le_u64(os, h.size());
  os.write(h.data(), static_cast<std::streamsize>(h.size()));
  write_le_samples(os, values);
  if (!os) throw IoError("write failed: " + path);
}

RawField read_field_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  char magic[8];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kMagic, sizeof magic) != 0) throw IoError(path + ": not a field file");
  std::uint64_t len = read_le_u64(is);
  if (len > (1u << 24)) throw IoError(path + ": implausible header length");
  std::string h(len, '\0');
  is.read(h.data(), static_cast<std::streamsize>(len));
  if (!is) throw IoError(path + ": truncated header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(h);
    Grid3 g(header.at("grid").at("n").get<int>(), header.at("grid").at("L").get<double>(),
            header.at("grid").at("a").get<double>());
    int comps = header.at("components").get<int>();
    if (header.at("dtype") != "complex64-pair-of-float64") throw IoError(path + ": unsupported dtype");
    auto values = read_le_samples(is, static_cast<std::size_t>(comps) * g.size());
    return RawField{g, header.at("kind").get<std::string>(), comps, std::move(values),
                    header.value("extra", nlohmann::json::object())};
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": bad header: " + e.what());
  } catch (const ConfigError& e) {
    throw IoError(path + ": bad grid: " + e.what());
  }
}

}  // namespace maxcgo
