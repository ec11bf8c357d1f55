#include "mfda/cover.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "mfda/source.hpp"

namespace mfda {

namespace {

constexpr double kMeasureTol = 1e-12;

bool full(double side) { return side >= kTwoPi - 1e-14; }

// Bin indices touched by the closed interval [lo, lo + len].
std::vector<int> bin_range(double lo, double len, int bins) {
  std::vector<int> out;
  if (full(len)) {
    for (int i = 0; i < bins; ++i) out.push_back(i);
    return out;
  }
  const double bs = kTwoPi / bins;
  const int a = static_cast<int>(std::floor(lo / bs - 1e-12));
  const int b = static_cast<int>(std::floor((lo + len) / bs + 1e-12));
  for (int i = a; i <= b && static_cast<int>(out.size()) < bins; ++i) out.push_back(((i % bins) + bins) % bins);
  return out;
}

double integral_over(const FieldSource& phi, const Rect& r) {
  SampleRequest req{{AxisFunctional::average(r.x0, r.x0 + r.sx)}, {AxisFunctional::average(r.y0, r.y0 + r.sy)}};
  return phi.sample(req)(0, 0).real() * r.area();
}

}  // namespace

double wrap_angle(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r -= kTwoPi;
  return r;
}

double periodic_offset(double x, double c) {
  double d = x - c;
  d -= kTwoPi * std::floor((d + kPi) / kTwoPi);
  return d;
}

bool Rect::contains(double x, double y, double tol) const {
  const bool inx = full(sx) || std::abs(periodic_offset(x, cx())) <= 0.5 * sx + tol;
  const bool iny = full(sy) || std::abs(periodic_offset(y, cy())) <= 0.5 * sy + tol;
  return inx && iny;
}

double periodic_overlap(double a0, double la, double b0, double lb) {
  if (full(la)) return std::min(lb, kTwoPi);
  if (full(lb)) return std::min(la, kTwoPi);
  a0 = wrap_angle(a0);
  b0 = wrap_angle(b0);
  double s = 0.0;
  for (int m = -1; m <= 1; ++m) {
    const double lo = std::max(a0, b0 + m * kTwoPi);
    const double hi = std::min(a0 + la, b0 + lb + m * kTwoPi);
    s += std::max(0.0, hi - lo);
  }
  return s;
}

Rect Subdomain::collared() const {
  return {x0 - collar, y0 - collar, std::min(sx + 2.0 * collar, kTwoPi), std::min(sy + 2.0 * collar, kTwoPi)};
}

Rect Subdomain::tile() const {
  const double c = 0.5 * collar;
  return {x0 - c, y0 - c, std::min(sx + 2.0 * c, kTwoPi), std::min(sy + 2.0 * c, kTwoPi)};
}

double Subdomain::diameter() const {
  const Rect r = collared();
  return std::hypot(r.sx, r.sy);
}

Cover::Cover(std::vector<Subdomain> cells) : cells_(std::move(cells)) {
  if (cells_.empty()) throw std::invalid_argument("cover needs at least one cell");
  double min_side = kTwoPi;
  for (const auto& c : cells_) {
    if (!(c.sx > 0.0 && c.sy > 0.0) || c.sx > kTwoPi + 1e-12 || c.sy > kTwoPi + 1e-12)
      throw std::invalid_argument("subdomain sides must lie in (0, 2pi]");
    if (!(c.collar > 0.0 && c.collar < kTwoPi)) throw std::invalid_argument("collar must lie in (0, 2pi)");
    const Rect r = c.collared();
    min_side = std::min({min_side, r.sx, r.sy});
  }
  bins_ = std::clamp(static_cast<int>(std::floor(kTwoPi / min_side)), 1, 256);
  bin_cells_.assign(static_cast<std::size_t>(bins_) * bins_, {});
  for (std::size_t q = 0; q < cells_.size(); ++q) {
    const Rect r = cells_[q].collared();
    for (int by : bin_range(r.y0 - 0.0, r.sy, bins_))
      for (int bx : bin_range(r.x0, r.sx, bins_))
        bin_cells_[static_cast<std::size_t>(by) * bins_ + bx].push_back(static_cast<int>(q));
  }
  neighbors_.resize(cells_.size());
  for (std::size_t q = 0; q < cells_.size(); ++q) {
    const Rect r = cells_[q].collared();
    std::set<int> cand;
    for (int by : bin_range(r.y0, r.sy, bins_))
      for (int bx : bin_range(r.x0, r.sx, bins_))
        for (int c : bin_cells_[static_cast<std::size_t>(by) * bins_ + bx]) cand.insert(c);
    for (int c : cand) {
      const Rect o = cells_[c].collared();
      if (periodic_overlap(r.x0, r.sx, o.x0, o.sx) > kMeasureTol && periodic_overlap(r.y0, r.sy, o.y0, o.sy) > kMeasureTol)
        neighbors_[q].push_back(c);
    }
    pi0_ = std::max(pi0_, static_cast<int>(neighbors_[q].size()));
  }
  adicity_ = 1.0;
  for (std::size_t q = 0; q < cells_.size(); ++q)
    for (int c : neighbors_[q])
      adicity_ = std::max(adicity_, cells_[c].diameter() / cells_[q].diameter());
  const double hmin = min_diameter(), hmax = max_diameter();
  if (hmax - hmin <= 1e-12 * hmax) uniform_scale_ = hmax;
}

double Cover::max_diameter() const {
  double h = 0.0;
  for (const auto& c : cells_) h = std::max(h, c.diameter());
  return h;
}

double Cover::min_diameter() const {
  double h = kTwoPi * 2.0;
  for (const auto& c : cells_) h = std::min(h, c.diameter());
  return h;
}

std::vector<int> Cover::cells_at(double x, double y) const {
  const double bs = kTwoPi / bins_;
  const int bx = std::min(static_cast<int>(wrap_angle(x) / bs), bins_ - 1);
  const int by = std::min(static_cast<int>(wrap_angle(y) / bs), bins_ - 1);
  std::vector<int> out;
  for (int c : bin_cells_[static_cast<std::size_t>(by) * bins_ + bx])
    if (cells_[c].collared().contains(x, y, 1e-13)) out.push_back(c);
  return out;
}

bool Cover::check_delta_adic(double delta) const { return adicity_ <= delta * (1.0 + 1e-12); }

Cover uniform_cover(int cells_per_axis, double collar_fraction) {
  if (cells_per_axis < 1) throw std::invalid_argument("cells_per_axis must be >= 1");
  if (!(collar_fraction > 0.0 && collar_fraction < 0.5))
    throw std::invalid_argument("collar_fraction must lie in (0, 1/2); wider collars push the overlap count past 9");
  const double s = kTwoPi / cells_per_axis;
  const double w = collar_fraction * s;
  std::vector<Subdomain> cells;
  if (cells_per_axis == 1) {
    cells.push_back({0.0, 0.0, kTwoPi, kTwoPi, 2.0 * w});
  } else {
    for (int iy = 0; iy < cells_per_axis; ++iy)
      for (int ix = 0; ix < cells_per_axis; ++ix)
        cells.push_back({ix * s + w, iy * s + w, s - 2.0 * w, s - 2.0 * w, 2.0 * w});
  }
  return Cover(std::move(cells));
}

Cover dyadic_cover(int levels, double collar_fraction) {
  if (levels < 1) throw std::invalid_argument("levels must be >= 1");
  if (levels == 1) return uniform_cover(1, collar_fraction);
  if (!(collar_fraction > 0.0 && collar_fraction < 0.5))
    throw std::invalid_argument("collar_fraction must lie in (0, 1/2)");
  struct Tile {
    double x0, y0, s;
  };
  std::vector<Tile> tiles;
  const double base = kTwoPi / 4.0;
  for (int iy = 0; iy < 4; ++iy)
    for (int ix = 0; ix < 4; ++ix) tiles.push_back({ix * base, iy * base, base});
  double smin = base;
  for (int l = 1; l < levels; ++l) {
    std::vector<Tile> next;
    for (const auto& t : tiles) {
      const bool touches = t.x0 <= kPi + 1e-12 && t.x0 + t.s >= kPi - 1e-12 && t.y0 <= kPi + 1e-12 &&
                           t.y0 + t.s >= kPi - 1e-12 && t.s >= smin - 1e-12;
      if (!touches) {
        next.push_back(t);
        continue;
      }
      const double h = 0.5 * t.s;
      for (int j = 0; j < 2; ++j)
        for (int i = 0; i < 2; ++i) next.push_back({t.x0 + i * h, t.y0 + j * h, h});
    }
    smin *= 0.5;
    tiles = std::move(next);
  }
  const double w = collar_fraction * smin;
  std::vector<Subdomain> cells;
  for (const auto& t : tiles) cells.push_back({t.x0 + w, t.y0 + w, t.s - 2.0 * w, t.s - 2.0 * w, 2.0 * w});
  return Cover(std::move(cells));
}

int overlap_count(const Cover& cover) { return cover.overlap_bound(); }

MultiplicityReport partition_multiplicity(const Cover& cover, const FieldSource* phi) {
  MultiplicityReport rep;
  const std::size_t n = cover.size();
  std::vector<int> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const Rect ra = cover[a].tile(), rb = cover[b].tile();
    if (ra.y0 != rb.y0) return ra.y0 < rb.y0;
    return ra.x0 < rb.x0;
  });
  auto disjoint = [&](int a, int b) {
    const Rect ra = cover[a].tile(), rb = cover[b].tile();
    return periodic_overlap(ra.x0, ra.sx, rb.x0, rb.sx) <= kMeasureTol ||
           periodic_overlap(ra.y0, ra.sy, rb.y0, rb.sy) <= kMeasureTol;
  };
  for (int q : order) {
    bool placed = false;
    for (auto& cls : rep.classes) {
      if (std::all_of(cls.begin(), cls.end(), [&](int o) { return disjoint(q, o); })) {
        cls.push_back(q);
        placed = true;
        break;
      }
    }
    if (!placed) rep.classes.push_back({q});
  }
  rep.multiplicity = static_cast<int>(rep.classes.size());
  rep.determined = true;
  for (const auto& cls : rep.classes) {
    double area = 0.0;
    for (int q : cls) area += cover[q].tile().area();
    if (std::abs(area - kTwoPi * kTwoPi) > 1e-9 * kTwoPi * kTwoPi) rep.determined = false;
  }
  const AnalyticSource one = constant_source(1.0);
  const FieldSource& f = phi ? *phi : static_cast<const FieldSource&>(one);
  const Rect torus{0.0, 0.0, kTwoPi, kTwoPi};
  rep.integral = integral_over(f, torus);
  double total = 0.0;
  rep.upper = std::numeric_limits<double>::infinity();
  for (const auto& cls : rep.classes) {
    double s = 0.0;
    for (int q : cls) s += integral_over(f, cover[q].tile());
    total += s;
    rep.upper = std::min(rep.upper, s);
  }
  rep.lower = total / rep.multiplicity;
  const double tol = 1e-10 * std::max(1.0, std::abs(rep.integral));
  rep.sandwich_holds = rep.determined && rep.lower <= rep.integral + tol && rep.integral <= rep.upper + tol;
  return rep;
}

OverlapIntegralReport check_overlap_integral(const Cover& cover, const FieldSource& phi) {
  OverlapIntegralReport rep;
  rep.integral = integral_over(phi, Rect{0.0, 0.0, kTwoPi, kTwoPi});
  double s = 0.0;
  for (const auto& c : cover.cells()) s += integral_over(phi, c.collared());
  rep.upper = s;
  rep.lower = s / cover.overlap_bound();
  const double tol = 1e-10 * std::max(1.0, std::abs(rep.integral));
  rep.holds = rep.lower <= rep.integral + tol && rep.integral <= rep.upper + tol;
  return rep;
}

std::string cover_to_json(const Cover& cover) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : cover.cells())
    arr.push_back({{"anchor", {c.x0, c.y0}}, {"sides", {c.sx, c.sy}}, {"collar", c.collar}});
  return arr.dump(2);
}

Cover cover_from_json(const std::string& text) {
  std::vector<Subdomain> cells;
  try {
    const auto arr = nlohmann::json::parse(text);
    if (!arr.is_array()) throw std::runtime_error("cover file must hold a JSON list");
    for (const auto& e : arr) {
      Subdomain s;
      s.x0 = e.at("anchor").at(0).get<double>();
      s.y0 = e.at("anchor").at(1).get<double>();
      s.sx = e.at("sides").at(0).get<double>();
      s.sy = e.at("sides").at(1).get<double>();
      s.collar = e.at("collar").get<double>();
      cells.push_back(s);
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed cover description: ") + e.what());
  }
  return Cover(std::move(cells));
}

Cover load_cover(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open cover file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return cover_from_json(ss.str());
}

void save_cover(const std::string& path, const Cover& cover) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write cover file " + path);
  os << cover_to_json(cover) << '\n';
}

}  // namespace mfda
