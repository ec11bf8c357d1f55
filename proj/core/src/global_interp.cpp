#include "mfda/global_interp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>
#include <sstream>
#include <stdexcept>

#include "mfda/quadrature.hpp"

namespace mfda {

namespace {

// Lattice indices whose coordinate lies in the periodic interval [a, a + len].
std::vector<std::size_t> indices_in(const std::vector<double>& pts, double a, double len) {
  std::vector<std::size_t> out;
  if (len >= kTwoPi - 1e-12) {
    for (std::size_t i = 0; i < pts.size(); ++i) out.push_back(i);
    return out;
  }
  const double start = wrap_angle(a);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double d = pts[i] - start;
    if (d < 0.0) d += kTwoPi;
    if (d <= len + 1e-12) out.push_back(i);
  }
  return out;
}

std::vector<double> interval_breaks(const Cover& cover, bool along_x) {
  std::vector<double> br{0.0};
  for (const auto& c : cover.cells()) {
    const Rect q = c.core(), t = c.collared();
    const double q0 = along_x ? q.x0 : q.y0, ql = along_x ? q.sx : q.sy;
    const double t0 = along_x ? t.x0 : t.y0, tl = along_x ? t.sx : t.sy;
    br.push_back(wrap_angle(q0));
    br.push_back(wrap_angle(q0 + ql));
    if (tl < kTwoPi - 1e-12) {
      br.push_back(wrap_angle(t0));
      br.push_back(wrap_angle(t0 + tl));
    }
  }
  std::sort(br.begin(), br.end());
  std::vector<double> out;
  for (double b : br)
    if (out.empty() || b - out.back() > 1e-12) out.push_back(b);
  if (kTwoPi - out.back() <= 1e-12) out.pop_back();
  out.push_back(kTwoPi);
  return out;
}

}  // namespace

std::string to_string(FamilyCategory c) {
  switch (c) {
    case FamilyCategory::RepeatedUniform:
      return "repeated-uniform";
    case FamilyCategory::RepeatedNonUniform:
      return "repeated-nonuniform";
    case FamilyCategory::HybridUniform:
      return "hybrid-uniform";
    case FamilyCategory::HybridNonUniform:
      return "hybrid-nonuniform";
  }
  return "unknown";
}

GlobalInterpolant::GlobalInterpolant(PartitionOfUnity pou, std::vector<LocalInterpolant> locals)
    : pou_(std::move(pou)), locals_(std::move(locals)) {
  const Cover& cov = pou_.cover();
  if (locals_.size() != cov.size()) throw std::invalid_argument("cell/operator count mismatch");
  if (locals_.empty()) throw std::invalid_argument("empty family");
  cells_.reserve(locals_.size());
  // Congruent cells with the same operator share one prototype.
  std::map<std::tuple<std::string, double, double, double, double, int>, std::size_t> proto;
  for (std::size_t q = 0; q < locals_.size(); ++q) {
    const LocalInterpolant& op = locals_[q];
    const Subdomain& c = cov[q];
    const auto key = std::make_tuple(op.name(), c.sx, c.sy, c.collar, op.mollifier_fraction, op.quadrature_points);
    const auto it = proto.find(key);
    if (it == proto.end()) {
      proto.emplace(key, q);
      cells_.emplace_back(op, c);
    } else {
      cells_.emplace_back(cells_[it->second], c);
    }
  }
  order_ = locals_.front().order;
  level_ = locals_.front().level;
  bool repeated = true;
  const std::string first = locals_.front().name();
  for (const auto& op : locals_) {
    order_ = std::min(order_, op.order);
    level_ = std::max(level_, op.level);
    if (op.order != locals_.front().order || op.level != locals_.front().level) generic_ = false;
    if (!op.optimal) optimal_ = false;
    if (op.name() != first) repeated = false;
  }
  // Uniform: every cell carries the same (m, k).
  const bool uniform = generic_;
  if (repeated)
    category_ = uniform ? FamilyCategory::RepeatedUniform : FamilyCategory::RepeatedNonUniform;
  else
    category_ = uniform ? FamilyCategory::HybridUniform : FamilyCategory::HybridNonUniform;
}

GlobalInterpolant GlobalInterpolant::uniform(const Cover& cover, const LocalInterpolant& op, int smoothness) {
  return GlobalInterpolant(PartitionOfUnity(cover, smoothness), std::vector<LocalInterpolant>(cover.size(), op));
}

std::size_t GlobalInterpolant::rank() const {
  std::size_t r = 0;
  for (const auto& c : cells_) r += c.rank();
  return r;
}

std::vector<LocalFit> GlobalInterpolant::fits(const FieldSource& phi) const {
  constexpr std::size_t kBatch = 256;
  std::vector<LocalFit> out;
  out.reserve(cells_.size());
  for (std::size_t q0 = 0; q0 < cells_.size(); q0 += kBatch) {
    const std::size_t q1 = std::min(cells_.size(), q0 + kBatch);
    std::vector<SampleRequest> reqs;
    for (std::size_t q = q0; q < q1; ++q) reqs.push_back(cells_[q].request());
    const auto samples = phi.sample(reqs);
    for (std::size_t q = q0; q < q1; ++q) out.push_back(cells_[q].fit(samples[q - q0]));
  }
  return out;
}

Jet2 GlobalInterpolant::jet(const std::vector<LocalFit>& fits, double x, double y, int order) const {
  if (fits.size() != cells_.size()) throw std::invalid_argument("fit count does not match the family");
  Jet2 acc(order);
  for (int q : cover().cells_at(x, y)) {
    const Subdomain& c = cover()[q];
    const Jet2 psi = pou_.jet(q, x, y, order);
    const Jet2 f = fits[q].jet(periodic_offset(x, c.cx()), periodic_offset(y, c.cy()), order);
    acc += psi * f;
  }
  return acc;
}

GridApplicator::GridApplicator(const GlobalInterpolant& interp, const Grid& grid, int band)
    : interp_(interp),
      grid_(grid),
      sampler_(
          [&] {
            std::vector<SampleRequest> reqs;
            for (std::size_t q = 0; q < interp.size(); ++q) reqs.push_back(interp.cell_operator(static_cast<int>(q)).request());
            return reqs;
          }(),
          band < 0 ? grid.n() / 2 - 1 : std::min(band, grid.n() / 2 - 1)) {
  const int n = grid.n();
  std::vector<double> coords(n);
  for (int i = 0; i < n; ++i) coords[i] = grid.coord(i);
  const Cover& cov = interp.cover();
  for (std::size_t q = 0; q < interp.size(); ++q) {
    const Subdomain& c = cov[q];
    const CellOperator& op = interp.cell_operator(static_cast<int>(q));
    const Rect t = c.collared();
    CellWeights cw;
    std::vector<double> psi;
    for (std::size_t iy : indices_in(coords, t.y0, t.sy))
      for (std::size_t ix : indices_in(coords, t.x0, t.sx)) {
        const double v = interp.pou().value(static_cast<int>(q), coords[ix], coords[iy]);
        if (v > 0.0) {
          cw.points.push_back(iy * n + ix);
          psi.push_back(v);
        }
      }
    const auto np = static_cast<Eigen::Index>(cw.points.size());
    if (op.polynomial()) {
      // psi times the monomials of the cell frame, flattened like the coefficient map.
      const TensorPolynomial& f = op.frame();
      const auto rows = f.c.rows(), cols = f.c.cols();
      cw.monomials.resize(np, rows * cols);
      for (Eigen::Index p = 0; p < np; ++p) {
        const std::size_t idx = cw.points[p];
        const double u = (periodic_offset(coords[idx % n], c.cx()) - f.ox) / f.lx;
        const double v = (periodic_offset(coords[idx / n], c.cy()) - f.oy) / f.ly;
        for (Eigen::Index sy = 0; sy < cols; ++sy)
          for (Eigen::Index sx = 0; sx < rows; ++sx)
            cw.monomials(p, sx + sy * rows) = psi[p] * std::pow(u, static_cast<double>(sx)) * std::pow(v, static_cast<double>(sy));
      }
    } else {
      cw.weights.resize(np, static_cast<Eigen::Index>(op.rank()));
      for (Eigen::Index p = 0; p < np; ++p) {
        const std::size_t idx = cw.points[p];
        const double X = periodic_offset(coords[idx % n], c.cx()), Y = periodic_offset(coords[idx / n], c.cy());
        for (std::size_t e = 0; e < op.rank(); ++e) cw.weights(p, static_cast<Eigen::Index>(e)) = psi[p] * op.cardinal(e, X, Y);
      }
    }
    cells_.push_back(std::move(cw));
  }
}

std::vector<double> GridApplicator::apply(const SpectralField& phi) const {
  if (!(phi.grid() == grid_)) throw std::invalid_argument("field grid does not match the applicator");
  const auto samples = sampler_.run(phi);
  std::vector<double> out(grid_.size(), 0.0);
  for (std::size_t q = 0; q < cells_.size(); ++q) {
    const CellWeights& cw = cells_[q];
    const CellOperator& op = interp_.cell_operator(static_cast<int>(q));
    const auto& en = op.entries();
    Eigen::VectorXd v;
    if (op.polynomial()) {
      Eigen::VectorXd s(static_cast<Eigen::Index>(en.size()));
      for (std::size_t e = 0; e < en.size(); ++e) s[static_cast<Eigen::Index>(e)] = samples[q](en[e].i, en[e].j).real();
      v = cw.monomials * (op.coefficient_map().transpose() * s);
    } else {
      Eigen::VectorXcd s(static_cast<Eigen::Index>(en.size()));
      for (std::size_t e = 0; e < en.size(); ++e) s[static_cast<Eigen::Index>(e)] = samples[q](en[e].i, en[e].j);
      v = (cw.weights * s).real();
    }
    for (std::size_t p = 0; p < cw.points.size(); ++p) out[cw.points[p]] += v[static_cast<Eigen::Index>(p)];
  }
  return out;
}

SpectralField GridApplicator::apply_mean_free(const SpectralField& phi) const {
  return SpectralField::from_physical(grid_, apply(phi));
}

VectorField GridApplicator::apply_mean_free(const VectorField& w) const {
  return VectorField(apply_mean_free(w.u), apply_mean_free(w.v));
}

std::vector<double> apply_global(const GlobalInterpolant& interp, const FieldSource& phi, const Grid& grid) {
  const auto fits = interp.fits(phi);
  const int n = grid.n();
  std::vector<double> coords(n);
  for (int i = 0; i < n; ++i) coords[i] = grid.coord(i);
  std::vector<double> out(grid.size(), 0.0);
  const Cover& cov = interp.cover();
  for (std::size_t q = 0; q < cov.size(); ++q) {
    const Subdomain& c = cov[q];
    const Rect t = c.collared();
    const auto iys = indices_in(coords, t.y0, t.sy), ixs = indices_in(coords, t.x0, t.sx);
    for (std::size_t iy : iys)
      for (std::size_t ix : ixs) {
        const double psi = interp.pou().value(static_cast<int>(q), coords[ix], coords[iy]);
        if (psi <= 0.0) continue;
        out[iy * n + ix] +=
            psi * fits[q].eval(periodic_offset(coords[ix], c.cx()), periodic_offset(coords[iy], c.cy()));
      }
  }
  return out;
}

SpectralField mean_free(const GlobalInterpolant& interp, const FieldSource& phi, const Grid& grid) {
  return SpectralField::from_physical(grid, apply_global(interp, phi, grid));
}

GlobalLattice build_lattice(const Cover& cover, int points_per_interval) {
  if (points_per_interval < 1) throw std::invalid_argument("need at least one point per interval");
  GlobalLattice lat;
  const QuadratureRule qx = composite_gauss(interval_breaks(cover, true), points_per_interval);
  const QuadratureRule qy = composite_gauss(interval_breaks(cover, false), points_per_interval);
  lat.x = qx.nodes;
  lat.wx = qx.weights;
  lat.y = qy.nodes;
  lat.wy = qy.weights;
  return lat;
}

GlobalNorms global_norms(const GlobalInterpolant& interp, const FieldSource& phi, int lmax, int points_per_interval) {
  if (lmax < 0 || lmax > kMaxJetOrder) throw std::invalid_argument("norm level out of range");
  const GlobalLattice lat = build_lattice(interp.cover(), points_per_interval);
  const std::size_t nx = lat.x.size(), ny = lat.y.size();
  const int L = lmax;
  // Taylor coefficients of I phi on the lattice, one array per (a, b) with a + b <= L.
  std::vector<std::vector<double>> g;
  std::vector<std::pair<int, int>> alpha;
  for (int a = 0; a <= L; ++a)
    for (int b = 0; a + b <= L; ++b) alpha.emplace_back(a, b);
  auto slot = [&](int a, int b) {
    return static_cast<std::size_t>(std::find(alpha.begin(), alpha.end(), std::make_pair(a, b)) - alpha.begin());
  };
  g.assign(alpha.size(), std::vector<double>(nx * ny, 0.0));

  const auto fits = interp.fits(phi);
  const Cover& cov = interp.cover();
  const PartitionOfUnity& pou = interp.pou();
  for (std::size_t q = 0; q < cov.size(); ++q) {
    const Subdomain& c = cov[q];
    const Rect t = c.collared();
    const auto ixs = indices_in(lat.x, t.x0, t.sx), iys = indices_in(lat.y, t.y0, t.sy);
    if (ixs.empty() || iys.empty()) continue;
    std::vector<double> fx, fy;
    for (std::size_t i : ixs) fx.push_back(periodic_offset(lat.x[i], c.cx()));
    for (std::size_t j : iys) fy.push_back(periodic_offset(lat.y[j], c.cy()));
    std::vector<Eigen::MatrixXd> fb(alpha.size());
    for (std::size_t s = 0; s < alpha.size(); ++s) {
      const auto [a, b] = alpha[s];
      fb[s] = fit_on_lattice(fits[q], fx, fy, a, b) / (factorial(a) * factorial(b));
    }
    const int qi = static_cast<int>(q);
    std::vector<Jet1> px, py;
    if (!pou.normalized()) {
      for (std::size_t i : ixs) {
        const Jet2 j = pou.bump_jet(qi, lat.x[i], c.cy(), L);
        Jet1 r(L);
        for (int a = 0; a <= L; ++a) r.c[a] = j.c[a][0];
        px.push_back(r);
      }
      for (std::size_t jj : iys) {
        const Jet2 j = pou.bump_jet(qi, c.cx(), lat.y[jj], L);
        Jet1 r(L);
        for (int b = 0; b <= L; ++b) r.c[b] = j.c[0][b];
        py.push_back(r);
      }
    }
    for (std::size_t jj = 0; jj < iys.size(); ++jj)
      for (std::size_t ii = 0; ii < ixs.size(); ++ii) {
        Jet2 psi;
        if (pou.normalized())
          psi = pou.jet(qi, lat.x[ixs[ii]], lat.y[iys[jj]], L);
        else
          psi = Jet2::tensor(px[ii], py[jj], L);
        if (psi.c[0][0] == 0.0) {
          bool zero = true;
          for (const auto& [a, b] : alpha) zero = zero && psi.c[a][b] == 0.0;
          if (zero) continue;
        }
        const std::size_t idx = iys[jj] * nx + ixs[ii];
        for (std::size_t s = 0; s < alpha.size(); ++s) {
          const auto [a, b] = alpha[s];
          double acc = 0.0;
          for (int i = 0; i <= a; ++i)
            for (int j = 0; j <= b; ++j) {
              const double pc = psi.c[i][j];
              if (pc != 0.0)
                acc += pc * fb[slot(a - i, b - j)](static_cast<Eigen::Index>(ii), static_cast<Eigen::Index>(jj));
            }
          g[s][idx] += acc;
        }
      }
  }

  GlobalNorms out;
  out.error.assign(L + 1, 0.0);
  out.interpolant.assign(L + 1, 0.0);
  out.field.assign(L + 1, 0.0);
  // phi derivatives in horizontal strips.
  constexpr std::size_t kStrip = 64;
  for (std::size_t y0 = 0; y0 < ny; y0 += kStrip) {
    const std::size_t y1 = std::min(ny, y0 + kStrip);
    SampleRequest req;
    for (int a = 0; a <= L; ++a)
      for (double x : lat.x) req.xs.push_back(AxisFunctional::point(x, a));
    for (int b = 0; b <= L; ++b)
      for (std::size_t j = y0; j < y1; ++j) req.ys.push_back(AxisFunctional::point(lat.y[j], b));
    const Eigen::MatrixXcd s = phi.sample(req);
    const std::size_t sy = y1 - y0;
    for (std::size_t k = 0; k < alpha.size(); ++k) {
      const auto [a, b] = alpha[k];
      const double scale = factorial(a) * factorial(b);
      const int l = a + b;
      double e2 = 0.0, i2 = 0.0, f2 = 0.0;
      for (std::size_t j = y0; j < y1; ++j)
        for (std::size_t i = 0; i < nx; ++i) {
          const double w = lat.wx[i] * lat.wy[j];
          const double pv =
              s(static_cast<Eigen::Index>(a * nx + i), static_cast<Eigen::Index>(b * sy + (j - y0))).real();
          const double iv = g[k][j * nx + i] * scale;
          e2 += w * (pv - iv) * (pv - iv);
          i2 += w * iv * iv;
          f2 += w * pv * pv;
        }
      out.error[l] += e2;
      out.interpolant[l] += i2;
      out.field[l] += f2;
    }
  }
  for (int l = 0; l <= L; ++l) {
    out.error[l] = std::sqrt(out.error[l]);
    out.interpolant[l] = std::sqrt(out.interpolant[l]);
    out.field[l] = std::sqrt(out.field[l]);
  }
  return out;
}

std::string GlobalErrorReport::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "form,l,j,h,lhs,rhs,ratio\n";
  for (const auto& r : rows) os << "general," << r.l << ',' << r.j << ',' << r.h << ',' << r.lhs << ',' << r.rhs << ',' << r.ratio << '\n';
  for (const auto& r : optimal_rows)
    os << "optimal," << r.l << ',' << r.j << ',' << r.h << ',' << r.lhs << ',' << r.rhs << ',' << r.ratio << '\n';
  os << "general-total," << l << ",," << ',' << lhs << ',' << rhs_general << ',' << ratio_general << '\n';
  return os.str();
}

GlobalErrorReport verify_global_error(const GlobalInterpolant& interp, const SpectralField& phi, int l,
                                      const std::vector<AssociatedConstants>& constants) {
  if (constants.empty()) throw std::invalid_argument("missing local constants");
  if (constants.size() != 1 && constants.size() != interp.size())
    throw std::invalid_argument("need one set of constants per cell, or a single shared set");
  if (l < 0 || l > interp.order()) throw std::invalid_argument("seminorm level exceeds the family order");
  const int k = interp.level();
  const SpectralSource src(phi);
  const GlobalNorms norms = global_norms(interp, src, l);
  GlobalErrorReport rep;
  rep.l = l;
  rep.lhs = norms.error[l] * norms.error[l];
  const Cover& cov = interp.cover();
  // local_sq[q][j] = ||phi||^2_{H^j(Q~_q)}
  std::vector<std::vector<double>> local_sq(cov.size(), std::vector<double>(k + 1, 0.0));
  for (std::size_t q = 0; q < cov.size(); ++q)
    for (int j = 1; j <= k; ++j) local_sq[q][j] = local_seminorm_sq(src, nullptr, 0.0, 0.0, cov[q].collared(), j);
  auto cst = [&](std::size_t q) -> const AssociatedConstants& { return constants.size() == 1 ? constants[0] : constants[q]; };
  for (int j = 1; j <= k; ++j) {
    GlobalErrorRow row{l, j, cov.max_diameter(), rep.lhs, 0.0, 0.0};
    for (std::size_t q = 0; q < cov.size(); ++q) {
      const double h = cov[q].diameter();
      row.rhs += std::pow(cst(q).general(j), 2) * std::pow(h, 2.0 * (j - l)) * local_sq[q][j];
    }
    row.ratio = row.rhs > 0.0 ? row.lhs / row.rhs : 0.0;
    rep.rhs_general += row.rhs;
    rep.rows.push_back(row);
  }
  rep.ratio_general = rep.rhs_general > 0.0 ? rep.lhs / rep.rhs_general : 0.0;
  for (int kp = l + 1; kp <= k; ++kp) {
    GlobalErrorRow row{l, kp, cov.max_diameter(), rep.lhs, 0.0, 0.0};
    for (std::size_t q = 0; q < cov.size(); ++q) {
      const double h = cov[q].diameter();
      row.rhs += std::pow(cst(q).optimal(l, kp), 2) * std::pow(h, 2.0 * (kp - l)) * local_sq[q][kp];
    }
    row.ratio = row.rhs > 0.0 ? row.lhs / row.rhs : 0.0;
    rep.optimal_rows.push_back(row);
  }
  return rep;
}

BoundednessReport verify_boundedness(const GlobalInterpolant& interp, const EnsembleSpec& ens) {
  BoundednessReport rep;
  const Grid grid(ens.grid_n);
  const int k = interp.level();
  for (int s = 0; s < ens.size; ++s) {
    const SpectralField f = random_field(grid, ens.band, ens.seed + 104729ULL * s, ens.decay);
    const double fk = sobolev_norm_full(f, k);
    if (fk <= 0.0) continue;
    const GlobalNorms norms = global_norms(interp, SpectralSource(f), 1);
    rep.ratio_l0 = std::max(rep.ratio_l0, norms.interpolant[0] / fk);
    rep.ratio_l1 = std::max(rep.ratio_l1, std::hypot(norms.interpolant[0], norms.interpolant[1]) / fk);
    ++rep.samples;
  }
  return rep;
}

}  // namespace mfda
