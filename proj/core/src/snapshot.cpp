#include "mfda/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace mfda {

namespace {

static_assert(std::endian::native == std::endian::little, "snapshot IO assumes a little-endian host");

std::vector<double> vector_physical(const VectorField& w) {
  auto a = w.u.to_physical();
  auto b = w.v.to_physical();
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

Snapshot make_snapshot(const VectorField& w, const std::string& kind, double time,
                       const DissipationSymbol& d) {
  return Snapshot{w.grid().n(), kind, time, d.nu, d.gamma, d.p, 2, 0.0, vector_physical(w)};
}

Snapshot make_snapshot(const SpectralField& f, const std::string& kind, double time,
                       const DissipationSymbol& d) {
  return Snapshot{f.grid().n(), kind, time, d.nu, d.gamma, d.p, 1, 0.0, f.to_physical()};
}

VectorField snapshot_vector(const Snapshot& s) {
  if (s.components != 2) throw std::invalid_argument("snapshot is not a vector field");
  Grid g(s.n);
  const std::size_t m = g.size();
  std::span<const double> all(s.data);
  return VectorField(SpectralField::from_physical(g, all.subspan(0, m)),
                     SpectralField::from_physical(g, all.subspan(m, m)));
}

SpectralField snapshot_scalar(const Snapshot& s) {
  if (s.components != 1) throw std::invalid_argument("snapshot is not a scalar field");
  return SpectralField::from_physical(Grid(s.n), s.data);
}

void write_snapshot(std::ostream& os, const Snapshot& s) {
  const std::size_t expect = static_cast<std::size_t>(s.n) * s.n * s.components;
  if (s.data.size() != expect) throw std::invalid_argument("snapshot data size mismatch");
  nlohmann::json h = {{"n", s.n},     {"kind", s.kind},   {"time", s.time},
                      {"nu", s.nu},   {"gamma", s.gamma}, {"p", s.p},
                      {"components", s.components}};
  if (s.step != 0.0) h["step"] = s.step;
  os << h.dump() << '\n';
  os.write(reinterpret_cast<const char*>(s.data.data()),
           static_cast<std::streamsize>(s.data.size() * sizeof(double)));
  if (!os) throw std::runtime_error("snapshot write failed");
}

bool read_snapshot(std::istream& is, Snapshot& s) {
  std::string line;
  if (!std::getline(is, line)) return false;
  if (line.empty()) return false;
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(line);
    s.n = h.at("n").get<int>();
    s.kind = h.at("kind").get<std::string>();
    s.time = h.at("time").get<double>();
    s.nu = h.at("nu").get<double>();
    s.gamma = h.at("gamma").get<double>();
    s.p = h.at("p").get<double>();
    s.components = h.value("components", 1);
    s.step = h.value("step", 0.0);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed snapshot header: ") + e.what());
  }
  if (s.n < 4 || s.components < 1) throw std::runtime_error("malformed snapshot header values");
  s.data.resize(static_cast<std::size_t>(s.n) * s.n * s.components);
  is.read(reinterpret_cast<char*>(s.data.data()),
          static_cast<std::streamsize>(s.data.size() * sizeof(double)));
  if (!is) throw std::runtime_error("truncated snapshot payload");
  return true;
}

void save_snapshot(const std::string& path, const Snapshot& s) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_snapshot(os, s);
}

Snapshot load_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  Snapshot s;
  if (!read_snapshot(is, s)) throw std::runtime_error("empty snapshot file " + path);
  return s;
}

}  // namespace mfda
