#include "mfda/pou.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mfda {

namespace {

Jet1 exp_inverse_jet(double t, int order) {
  Jet1 g(order);
  if (t <= 0.0) return g;
  const double inv = 1.0 / t;
  double p = -inv;
  for (int j = 0; j <= order; ++j) {
    g.c[j] = p;
    p *= -inv;
  }
  return exp(g);
}

bool spans_torus(double side) { return side >= kTwoPi - 1e-14; }

}  // namespace

Jet1 smoothstep_jet(double t, int order) {
  if (t <= 0.0) return Jet1(order, 0.0);
  if (t >= 1.0) return Jet1(order, 1.0);
  Jet1 a = exp_inverse_jet(t, order);
  Jet1 b = exp_inverse_jet(1.0 - t, order);
  for (int j = 1; j <= order; j += 2) b.c[j] = -b.c[j];
  return a / (a + b);
}

double smoothstep(double t) { return smoothstep_jet(t, 0).c[0]; }

PartitionOfUnity::PartitionOfUnity(const Cover& cover, int smoothness)
    : cover_(cover), smoothness_(smoothness) {
  if (smoothness < 0 || smoothness > kMaxJetOrder) throw std::invalid_argument("smoothness out of range");
  for (const auto& c : cover_.cells()) {
    const bool okx = spans_torus(c.sx) || c.sx + 2.0 * c.collar <= kTwoPi + 1e-12;
    const bool oky = spans_torus(c.sy) || c.sy + 2.0 * c.collar <= kTwoPi + 1e-12;
    if (!okx || !oky) throw PouConstructionError("collar wraps around the torus; bump would not be smooth");
  }
  // Probe the bump sum on a lattice fine enough to resolve every transition band.
  double min_collar = kTwoPi;
  for (const auto& c : cover_.cells()) min_collar = std::min(min_collar, c.collar);
  const int m = std::clamp(static_cast<int>(std::ceil(4.0 * kTwoPi / min_collar)), 128, 1024);
  double dev = 0.0;
  for (int iy = 0; iy < m; ++iy) {
    const double y = kTwoPi * (iy + 0.37) / m;
    for (int ix = 0; ix < m; ++ix) {
      const double x = kTwoPi * (ix + 0.61) / m;
      double w = 0.0;
      for (int q : cover_.cells_at(x, y)) w += bump(q, x, y);
      if (!(w > 0.0)) {
        std::ostringstream os;
        os << "partition undefined: cover leaves a gap near (" << x << ", " << y << ")";
        throw PouConstructionError(os.str());
      }
      dev = std::max(dev, std::abs(w - 1.0));
    }
  }
  normalized_ = dev > 1e-13;
}

Jet1 PartitionOfUnity::profile_jet(double offset, double half_core, double collar, int order) const {
  Jet1 up = smoothstep_jet((offset + half_core + collar) / collar, order);
  Jet1 down = smoothstep_jet((offset - half_core) / collar, order);
  Jet1 r = up * (Jet1(order, 1.0) - down);
  double scale = 1.0;
  for (int j = 1; j <= order; ++j) {
    scale /= collar;
    r.c[j] *= scale;
  }
  return r;
}

double PartitionOfUnity::bump(int q, double x, double y) const {
  return bump_jet(q, x, y, 0).c[0][0];
}

Jet2 PartitionOfUnity::bump_jet(int q, double x, double y, int order) const {
  const Subdomain& c = cover_[q];
  const Jet1 px = spans_torus(c.sx) ? Jet1(order, 1.0)
                                     : profile_jet(periodic_offset(x, c.cx()), 0.5 * c.sx, c.collar, order);
  const Jet1 py = spans_torus(c.sy) ? Jet1(order, 1.0)
                                     : profile_jet(periodic_offset(y, c.cy()), 0.5 * c.sy, c.collar, order);
  return Jet2::tensor(px, py, order);
}

double PartitionOfUnity::value(int q, double x, double y) const { return jet(q, x, y, 0).c[0][0]; }

Jet2 PartitionOfUnity::jet(int q, double x, double y, int order) const {
  Jet2 w = bump_jet(q, x, y, order);
  if (!normalized_ || w.c[0][0] == 0.0) return w;
  Jet2 total(order);
  for (int o : cover_.neighbors(q)) total += bump_jet(o, x, y, order);
  return w / total;
}

double PartitionOfUnity::sum(double x, double y) const {
  double s = 0.0;
  for (int q : cover_.cells_at(x, y)) s += value(q, x, y);
  return s;
}

PartitionOfUnity build_pou(const Cover& cover, int smoothness) { return PartitionOfUnity(cover, smoothness); }

PouReport check_pou(const PartitionOfUnity& pou, int n, int samples_per_cell) {
  PouReport rep;
  const Cover& cover = pou.cover();
  const double dx = kTwoPi / n;
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const double x = ix * dx, y = iy * dx;
      rep.sum_max_deviation = std::max(rep.sum_max_deviation, std::abs(pou.sum(x, y) - 1.0));
      std::vector<int> cand;
      for (int q : cover.cells_at(x, y))
        for (int o : cover.neighbors(q)) cand.push_back(o);
      std::sort(cand.begin(), cand.end());
      cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
      for (int q : cand) {
        const Subdomain& c = cover[q];
        if (c.core().contains(x, y)) {
          if (pou.value(q, x, y) != 1.0) rep.plateau_exact = false;
        } else if (!c.collared().contains(x, y)) {
          if (pou.value(q, x, y) != 0.0) rep.support_exact = false;
        }
      }
    }
  rep.c_min.fill(std::numeric_limits<double>::infinity());
  rep.c_max.fill(0.0);
  const int order = std::min(4, pou.smoothness());
  for (std::size_t q = 0; q < cover.size(); ++q) {
    const Subdomain& c = cover[q];
    const Rect r = c.collared();
    const double h = c.diameter();
    std::array<double, 5> sup{};
    for (int j = 0; j < samples_per_cell; ++j)
      for (int i = 0; i < samples_per_cell; ++i) {
        const double x = r.x0 + r.sx * (i + 0.5) / samples_per_cell;
        const double y = r.y0 + r.sy * (j + 0.5) / samples_per_cell;
        const Jet2 jt = pou.jet(static_cast<int>(q), x, y, order);
        for (int l = 1; l <= order; ++l)
          for (int a = 0; a <= l; ++a) sup[l] = std::max(sup[l], std::abs(jt.derivative(a, l - a)));
      }
    for (int l = 1; l <= order; ++l) {
      const double cl = sup[l] * std::pow(h, l);
      rep.c_min[l] = std::min(rep.c_min[l], cl);
      rep.c_max[l] = std::max(rep.c_max[l], cl);
    }
  }
  rep.c_min[0] = rep.c_max[0] = 1.0;
  return rep;
}

}  // namespace mfda
