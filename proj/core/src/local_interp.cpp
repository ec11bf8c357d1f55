#include "mfda/local_interp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mfda/dual_basis.hpp"
#include "mfda/fit.hpp"
#include "mfda/quadrature.hpp"

namespace mfda {

namespace {

constexpr int kPanelPoints = 12;
constexpr double kPanelWidth = 0.8;

double binomial(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

// Lagrange cardinal polynomial for node i among nodes, increasing-degree coefficients.
std::vector<double> lagrange_cardinal(const std::vector<double>& nodes, std::size_t i) {
  std::vector<double> roots;
  double denom = 1.0;
  for (std::size_t j = 0; j < nodes.size(); ++j)
    if (j != i) {
      roots.push_back(nodes[j]);
      denom *= nodes[i] - nodes[j];
    }
  std::vector<double> p = poly_from_roots(roots);
  for (double& c : p) c /= denom;
  return p;
}

Eigen::MatrixXd outer(const std::vector<double>& a, const std::vector<double>& b) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a[i] * b[j];
  return m;
}

QuadratureRule panel_rule(double a, double len) {
  const int panels = std::max(1, static_cast<int>(std::ceil(len / kPanelWidth)));
  std::vector<double> br(panels + 1);
  for (int i = 0; i <= panels; ++i) br[i] = a + len * i / panels;
  return composite_gauss(br, kPanelPoints);
}

}  // namespace

LocalInterpolant LocalInterpolant::spectral(double n_modes, int order, int level) {
  if (!(n_modes >= 0.0)) throw std::invalid_argument("spectral radius must be non-negative");
  if (level < order + 1) throw std::invalid_argument("level must be at least order + 1");
  LocalInterpolant op;
  op.kind = InterpKind::SpectralLocal;
  op.modes = n_modes;
  op.order = order;
  op.level = level;
  op.optimal = true;
  return op;
}

LocalInterpolant LocalInterpolant::nodal0() {
  LocalInterpolant op;
  op.kind = InterpKind::Nodal0;
  op.order = 0;
  op.level = 2;
  return op;
}

LocalInterpolant LocalInterpolant::volume_average() {
  LocalInterpolant op;
  op.kind = InterpKind::VolAvg0;
  op.order = 0;
  op.level = 1;
  op.optimal = true;
  return op;
}

LocalInterpolant LocalInterpolant::taylor1() {
  LocalInterpolant op;
  op.kind = InterpKind::Taylor1;
  op.order = 1;
  op.level = 3;
  return op;
}

LocalInterpolant LocalInterpolant::sobolev(int k, double mollifier_fraction, int quadrature_points) {
  if (k < 0 || k > 5) throw std::invalid_argument("sobolev degree must lie in [0, 5]");
  if (!(mollifier_fraction > 0.0 && mollifier_fraction <= 0.5))
    throw std::invalid_argument("mollifier fraction must lie in (0, 1/2]");
  if (quadrature_points < k + 2)
    throw std::invalid_argument("too few quadrature points for the averaged Taylor polynomial");
  LocalInterpolant op;
  op.kind = InterpKind::SobolevPoly;
  op.degree = k;
  op.mollifier_fraction = mollifier_fraction;
  op.quadrature_points = quadrature_points;
  op.order = k;
  op.level = k + 1;
  return op;
}

LocalInterpolant LocalInterpolant::lagrange(int k) {
  if (k < 1 || k > 6) throw std::invalid_argument("lagrange degree must lie in [1, 6]");
  LocalInterpolant op;
  op.kind = InterpKind::Lagrange;
  op.degree = k;
  op.order = k;
  op.level = k + 1;
  op.optimal = true;
  return op;
}

LocalInterpolant LocalInterpolant::volume_polynomial(int k) {
  if (k < 1 || k > 7) throw std::invalid_argument("volume polynomial degree must lie in [1, 7]");
  LocalInterpolant op;
  op.kind = InterpKind::VolPoly;
  op.degree = k;
  op.order = k;
  op.level = k + 1;
  op.optimal = true;
  return op;
}

LocalInterpolant LocalInterpolant::parse(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  auto need_int = [&]() {
    if (arg.empty()) throw std::invalid_argument("interpolant '" + spec + "' needs a degree, e.g. " + head + ":2");
    std::size_t used = 0;
    const int v = std::stoi(arg, &used);
    if (used != arg.size()) throw std::invalid_argument("bad degree in interpolant '" + spec + "'");
    return v;
  };
  if (head == "nodal0") return nodal0();
  if (head == "volavg0") return volume_average();
  if (head == "taylor1") return taylor1();
  if (head == "sobolev") return sobolev(need_int());
  if (head == "lagrange") return lagrange(need_int());
  if (head == "volpoly") return volume_polynomial(need_int());
  if (head == "spectral") {
    if (arg.empty()) throw std::invalid_argument("spectral interpolant needs a radius, e.g. spectral:8");
    return spectral(std::stod(arg));
  }
  throw std::invalid_argument("unknown interpolant kind '" + spec + "'");
}

std::string LocalInterpolant::name() const {
  std::ostringstream os;
  switch (kind) {
    case InterpKind::SpectralLocal:
      os << "spectral:" << modes;
      break;
    case InterpKind::Nodal0:
      os << "nodal0";
      break;
    case InterpKind::VolAvg0:
      os << "volavg0";
      break;
    case InterpKind::Taylor1:
      os << "taylor1";
      break;
    case InterpKind::SobolevPoly:
      os << "sobolev:" << degree;
      break;
    case InterpKind::Lagrange:
      os << "lagrange:" << degree;
      break;
    case InterpKind::VolPoly:
      os << "volpoly:" << degree;
      break;
  }
  return os.str();
}

CellOperator::CellOperator(const LocalInterpolant& op, const Subdomain& cell) : op_(op), cell_(cell) {
  switch (op.kind) {
    case InterpKind::SpectralLocal:
      build_spectral();
      break;
    case InterpKind::Nodal0:
      build_nodal();
      break;
    case InterpKind::VolAvg0:
      build_average();
      break;
    case InterpKind::Taylor1:
      build_taylor();
      break;
    case InterpKind::SobolevPoly:
      build_sobolev();
      break;
    case InterpKind::Lagrange:
      build_lagrange();
      break;
    case InterpKind::VolPoly:
      build_volpoly();
      break;
  }
  auto packed = std::make_shared<Packed>();
  if (!coefs_.empty()) {
    frame_.c = Eigen::MatrixXd::Zero(coefs_.front().rows(), coefs_.front().cols());
    packed->map.resize(static_cast<Eigen::Index>(coefs_.size()), coefs_.front().size());
    for (std::size_t e = 0; e < coefs_.size(); ++e)
      packed->map.row(static_cast<Eigen::Index>(e)) = Eigen::Map<const Eigen::RowVectorXd>(coefs_[e].data(), coefs_[e].size());
  }
  packed->entries = std::move(entries_);
  packed_ = std::move(packed);
  entries_.clear();
  coefs_.clear();
}

CellOperator::CellOperator(const CellOperator& proto, const Subdomain& cell) : CellOperator(proto) {
  if (std::abs(cell.sx - proto.cell_.sx) > 1e-12 || std::abs(cell.sy - proto.cell_.sy) > 1e-12 ||
      std::abs(cell.collar - proto.cell_.collar) > 1e-12)
    throw std::invalid_argument("cell is not congruent to the prototype");
  const double dx = periodic_offset(cell.cx(), proto.cell_.cx()), dy = periodic_offset(cell.cy(), proto.cell_.cy());
  auto shift = [](AxisFunctional& f, double d) {
    if (f.kind == AxisFunctional::Kind::Point) {
      f.a = f.b = wrap_angle(f.a + d);
    } else {
      f.a += d;
      f.b += d;
    }
  };
  for (auto& f : request_.xs) shift(f, dx);
  for (auto& f : request_.ys) shift(f, dy);
  cell_ = cell;
}

void CellOperator::build_spectral() {
  const double kx0 = kTwoPi / cell_.sx, ky0 = kTwoPi / cell_.sy;
  const double cx = cell_.cx(), cy = cell_.cy();
  const double ax = 0.5 * cell_.sx, ay = 0.5 * cell_.sy;
  const int jxmax = static_cast<int>(std::floor(op_.modes / kx0 + 1e-12));
  const int jymax = static_cast<int>(std::floor(op_.modes / ky0 + 1e-12));
  for (int j = -jxmax; j <= jxmax; ++j) request_.xs.push_back(AxisFunctional::fourier(cx - ax, cx + ax, j * kx0));
  for (int j = -jymax; j <= jymax; ++j) request_.ys.push_back(AxisFunctional::fourier(cy - ay, cy + ay, j * ky0));
  fourier_frame_.ox = -ax;
  fourier_frame_.oy = -ay;
  for (int jy = -jymax; jy <= jymax; ++jy)
    for (int jx = -jxmax; jx <= jxmax; ++jx) {
      const double kx = jx * kx0, ky = jy * ky0;
      if (kx * kx + ky * ky > op_.modes * op_.modes * (1.0 + 1e-12)) continue;
      entries_.push_back({jx + jxmax, jy + jymax});
      fourier_frame_.kx.push_back(kx);
      fourier_frame_.ky.push_back(ky);
    }
}

void CellOperator::build_nodal() {
  request_.xs = {AxisFunctional::point(cell_.cx())};
  request_.ys = {AxisFunctional::point(cell_.cy())};
  entries_ = {{0, 0}};
  coefs_ = {Eigen::MatrixXd::Ones(1, 1)};
}

void CellOperator::build_average() {
  const double cx = cell_.cx(), cy = cell_.cy();
  request_.xs = {AxisFunctional::average(cx - 0.5 * cell_.sx, cx + 0.5 * cell_.sx)};
  request_.ys = {AxisFunctional::average(cy - 0.5 * cell_.sy, cy + 0.5 * cell_.sy)};
  entries_ = {{0, 0}};
  coefs_ = {Eigen::MatrixXd::Ones(1, 1)};
}

void CellOperator::build_taylor() {
  const double cx = cell_.cx(), cy = cell_.cy();
  request_.xs = {AxisFunctional::point(cx, 0), AxisFunctional::point(cx, 1)};
  request_.ys = {AxisFunctional::point(cy, 0), AxisFunctional::point(cy, 1)};
  frame_.lx = 0.5 * cell_.sx;
  frame_.ly = 0.5 * cell_.sy;
  entries_ = {{0, 0}, {1, 0}, {0, 1}};
  Eigen::MatrixXd c0 = Eigen::MatrixXd::Zero(2, 2), c1 = c0, c2 = c0;
  c0(0, 0) = 1.0;
  c1(1, 0) = frame_.lx;
  c2(0, 1) = frame_.ly;
  coefs_ = {c0, c1, c2};
}

void CellOperator::build_sobolev() {
  const int k = op_.degree;
  const int ng = op_.quadrature_points;
  const double rho = op_.mollifier_fraction * std::min(cell_.sx, cell_.sy);
  const double cx = cell_.cx(), cy = cell_.cy();
  const QuadratureRule q = gauss_legendre(ng, -rho, rho);
  // Radial bump exp(-1/(1-r^2)) on the disc of radius rho, discretely normalized.
  Eigen::MatrixXd w(ng, ng);
  double mass = 0.0;
  for (int i = 0; i < ng; ++i)
    for (int j = 0; j < ng; ++j) {
      const double r2 = (q.nodes[i] * q.nodes[i] + q.nodes[j] * q.nodes[j]) / (rho * rho);
      const double b = r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) : 0.0;
      w(i, j) = q.weights[i] * q.weights[j] * b;
      mass += w(i, j);
    }
  w /= mass;
  for (int a = 0; a <= k; ++a)
    for (int i = 0; i < ng; ++i) request_.xs.push_back(AxisFunctional::point(cx + q.nodes[i], a));
  for (int b = 0; b <= k; ++b)
    for (int j = 0; j < ng; ++j) request_.ys.push_back(AxisFunctional::point(cy + q.nodes[j], b));
  frame_.lx = frame_.ly = rho;
  for (int a = 0; a <= k; ++a)
    for (int b = 0; a + b <= k; ++b)
      for (int i = 0; i < ng; ++i)
        for (int j = 0; j < ng; ++j) {
          if (w(i, j) == 0.0) continue;
          // w_ij / (a! b!) (X - y_i)^a (Y - y_j)^b in u = X / rho, v = Y / rho.
          const double ui = q.nodes[i] / rho, vj = q.nodes[j] / rho;
          Eigen::MatrixXd c = Eigen::MatrixXd::Zero(k + 1, k + 1);
          const double scale = w(i, j) * std::pow(rho, a + b) / (factorial(a) * factorial(b));
          for (int r = 0; r <= a; ++r)
            for (int s = 0; s <= b; ++s)
              c(r, s) = scale * binomial(a, r) * std::pow(-ui, a - r) * binomial(b, s) * std::pow(-vj, b - s);
          entries_.push_back({a * ng + i, b * ng + j});
          coefs_.push_back(std::move(c));
        }
}

void CellOperator::build_lagrange() {
  const int k = op_.degree;
  const double cx = cell_.cx(), cy = cell_.cy();
  const double ax = 0.5 * cell_.sx, ay = 0.5 * cell_.sy;
  std::vector<double> t(k + 1);
  for (int i = 0; i <= k; ++i) t[i] = (i + 0.5) / (k + 1);
  for (int i = 0; i <= k; ++i) {
    request_.xs.push_back(AxisFunctional::point(cx - ax + t[i] * cell_.sx));
    request_.ys.push_back(AxisFunctional::point(cy - ay + t[i] * cell_.sy));
  }
  frame_.ox = -ax;
  frame_.oy = -ay;
  frame_.lx = cell_.sx;
  frame_.ly = cell_.sy;
  std::vector<std::vector<double>> card(k + 1);
  for (int i = 0; i <= k; ++i) card[i] = lagrange_cardinal(t, i);
  for (int j = 0; j <= k; ++j)
    for (int i = 0; i <= k; ++i) {
      entries_.push_back({i, j});
      coefs_.push_back(outer(card[i], card[j]));
    }
}

void CellOperator::build_volpoly() {
  const int m = op_.degree + 1;
  const DualBasisVolPoly basis = build_volpoly_dual_basis(m);
  const double cx = cell_.cx(), cy = cell_.cy();
  const double ax = 0.5 * cell_.sx, ay = 0.5 * cell_.sy;
  const double px = cell_.sx / m, py = cell_.sy / m;
  for (int i = 0; i < m; ++i) {
    request_.xs.push_back(AxisFunctional::average(cx - ax + i * px, cx - ax + (i + 1) * px));
    request_.ys.push_back(AxisFunctional::average(cy - ay + i * py, cy - ay + (i + 1) * py));
  }
  frame_.ox = -ax;
  frame_.oy = -ay;
  frame_.lx = px;
  frame_.ly = py;
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) {
      const Eigen::VectorXd ti = basis.theta(i), tj = basis.theta(j);
      entries_.push_back({i, j});
      coefs_.push_back(ti * tj.transpose());
    }
}

LocalFit CellOperator::fit(const Eigen::MatrixXcd& samples) const {
  LocalFit out;
  if (op_.kind == InterpKind::SpectralLocal) {
    out.kind = LocalFit::Kind::Fourier;
    out.fourier = fourier_frame_;
    const auto& en = packed_->entries;
    out.fourier.c.resize(static_cast<Eigen::Index>(en.size()));
    for (std::size_t e = 0; e < en.size(); ++e) out.fourier.c[static_cast<Eigen::Index>(e)] = samples(en[e].i, en[e].j);
    return out;
  }
  const auto& en = packed_->entries;
  Eigen::VectorXd s(static_cast<Eigen::Index>(en.size()));
  for (std::size_t e = 0; e < en.size(); ++e) s[static_cast<Eigen::Index>(e)] = samples(en[e].i, en[e].j).real();
  const Eigen::VectorXd flat = packed_->map.transpose() * s;
  out.kind = LocalFit::Kind::Polynomial;
  out.poly = frame_;
  out.poly.c = Eigen::Map<const Eigen::MatrixXd>(flat.data(), frame_.c.rows(), frame_.c.cols());
  return out;
}

Complex CellOperator::cardinal(std::size_t e, double X, double Y, int ax, int ay) const {
  if (op_.kind == InterpKind::SpectralLocal) {
    const double kx = fourier_frame_.kx[e], ky = fourier_frame_.ky[e];
    const double ph = kx * (X - fourier_frame_.ox) + ky * (Y - fourier_frame_.oy);
    return std::pow(Complex(0.0, kx), ax) * std::pow(Complex(0.0, ky), ay) * Complex(std::cos(ph), std::sin(ph));
  }
  TensorPolynomial p = frame_;
  const Eigen::RowVectorXd row = packed_->map.row(static_cast<Eigen::Index>(e));
  p.c = Eigen::Map<const Eigen::MatrixXd>(row.data(), frame_.c.rows(), frame_.c.cols());
  return p.eval(X, Y, ax, ay);
}

Eigen::MatrixXd fit_on_lattice(const LocalFit& fit, const std::vector<double>& xs, const std::vector<double>& ys, int ax,
                               int ay) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(ys.size()));
  if (fit.kind == LocalFit::Kind::Polynomial) {
    const TensorPolynomial& p = fit.poly;
    const int dx = static_cast<int>(p.c.rows()) - 1, dy = static_cast<int>(p.c.cols()) - 1;
    if (ax > dx || ay > dy) return Eigen::MatrixXd::Zero(out.rows(), out.cols());
    Eigen::MatrixXd px(out.rows(), dx + 1), py(out.cols(), dy + 1);
    auto fill = [](Eigen::MatrixXd& m, const std::vector<double>& pts, double o, double l, int a) {
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const double u = (pts[i] - o) / l;
        for (Eigen::Index r = 0; r < m.cols(); ++r) {
          double f = 1.0;
          for (int j = 0; j < a; ++j) f *= static_cast<double>(r - j);
          m(static_cast<Eigen::Index>(i), r) = r >= a ? f * std::pow(u, static_cast<double>(r - a)) : 0.0;
        }
      }
    };
    fill(px, xs, p.ox, p.lx, ax);
    fill(py, ys, p.oy, p.ly, ay);
    out = px * p.c * py.transpose();
    out /= std::pow(p.lx, ax) * std::pow(p.ly, ay);
    return out;
  }
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < ys.size(); ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = fit.eval(xs[i], ys[j], ax, ay);
  return out;
}

LocalFit apply_local(const LocalInterpolant& op, const Subdomain& cell, const FieldSource& phi) {
  CellOperator c(op, cell);
  return c.fit(phi.sample(c.request()));
}

double local_seminorm_sq(const FieldSource& phi, const LocalFit* fit, double cx, double cy, const Rect& region,
                         int level, double fit_sign) {
  if (!(region.sx > 0.0 && region.sy > 0.0)) throw std::invalid_argument("empty region");
  if (level < 0) throw std::invalid_argument("level must be non-negative");
  const QuadratureRule qx = panel_rule(region.x0, region.sx), qy = panel_rule(region.y0, region.sy);
  const std::size_t px = qx.nodes.size(), py = qy.nodes.size();
  SampleRequest req;
  for (int a = 0; a <= level; ++a)
    for (double x : qx.nodes) req.xs.push_back(AxisFunctional::point(x, a));
  for (int b = 0; b <= level; ++b)
    for (double y : qy.nodes) req.ys.push_back(AxisFunctional::point(y, b));
  const Eigen::MatrixXcd s = phi.sample(req);
  std::vector<double> fx(px), fy(py);
  for (std::size_t i = 0; i < px; ++i) fx[i] = periodic_offset(qx.nodes[i], cx);
  for (std::size_t j = 0; j < py; ++j) fy[j] = periodic_offset(qy.nodes[j], cy);
  double acc = 0.0;
  for (int a = 0; a <= level; ++a) {
    const int b = level - a;
    Eigen::MatrixXd g;
    if (fit) g = fit_on_lattice(*fit, fx, fy, a, b);
    for (std::size_t i = 0; i < px; ++i)
      for (std::size_t j = 0; j < py; ++j) {
        double d = s(static_cast<Eigen::Index>(a * px + i), static_cast<Eigen::Index>(b * py + j)).real();
        if (fit) d -= fit_sign * g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        acc += qx.weights[i] * qy.weights[j] * d * d;
      }
  }
  return acc;
}

double fit_seminorm_sq(const LocalFit& fit, double cx, double cy, const Rect& region, int level) {
  const QuadratureRule qx = panel_rule(region.x0, region.sx), qy = panel_rule(region.y0, region.sy);
  std::vector<double> fx, fy;
  for (double x : qx.nodes) fx.push_back(periodic_offset(x, cx));
  for (double y : qy.nodes) fy.push_back(periodic_offset(y, cy));
  double acc = 0.0;
  for (int a = 0; a <= level; ++a) {
    const Eigen::MatrixXd g = fit_on_lattice(fit, fx, fy, a, level - a);
    for (std::size_t i = 0; i < fx.size(); ++i)
      for (std::size_t j = 0; j < fy.size(); ++j) {
        const double d = g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        acc += qx.weights[i] * qy.weights[j] * d * d;
      }
  }
  return acc;
}

double local_sobolev_norm(const SpectralField& f, int level, const Rect& region) {
  SpectralSource src(f);
  return std::sqrt(local_seminorm_sq(src, nullptr, 0.0, 0.0, region, level));
}

double AssociatedConstants::operator()(int l, int j) const {
  if (l < 0 || j < 1 || l > order || l + j > level) return 0.0;
  if (l >= eps.rows() || j >= eps.cols()) return 0.0;
  return eps(l, j);
}

double AssociatedConstants::general(int j) const {
  double s = 0.0;
  for (int i = 0; i <= j - 1; ++i) s += std::pow((*this)(i, j - i), 2);
  return std::sqrt(s);
}

double AssociatedConstants::optimal(int l, int kprime) const {
  double s = 0.0;
  for (int i = 0; i <= l; ++i) s += std::pow((*this)(i, kprime - i), 2);
  return std::sqrt(s);
}

AssociatedConstants estimate_all_constants(const LocalInterpolant& op, const Subdomain& cell, const EnsembleSpec& ens) {
  AssociatedConstants out;
  out.order = op.order;
  out.level = op.level;
  out.h = cell.diameter();
  out.eps = Eigen::MatrixXd::Zero(op.order + 1, op.level + 1);
  const Grid grid(ens.grid_n);
  const double cx = cell.cx(), cy = cell.cy();
  for (int s = 0; s < ens.size; ++s) {
    const SpectralField f = random_field(grid, ens.band, ens.seed + 7919ULL * s, ens.decay);
    const SpectralSource src(f);
    const LocalFit fit = apply_local(op, cell, src);
    std::vector<double> num(op.order + 1), den(op.level + 1);
    for (int l = 0; l <= op.order; ++l) num[l] = std::sqrt(local_seminorm_sq(src, &fit, cx, cy, cell.core(), l));
    for (int l = 1; l <= op.level; ++l)
      den[l] = std::sqrt(local_seminorm_sq(src, nullptr, cx, cy, cell.collared(), l));
    for (int l = 0; l <= op.order; ++l)
      for (int j = 1; l + j <= op.level; ++j) {
        if (den[l + j] <= 0.0) continue;
        out.eps(l, j) = std::max(out.eps(l, j), num[l] / (std::pow(out.h, j) * den[l + j]));
      }
  }
  return out;
}

double estimate_constants(const LocalInterpolant& op, const Subdomain& cell, const EnsembleSpec& ens, int l,
                          int kprime) {
  if (l < 0 || l > op.order) throw std::invalid_argument("seminorm level exceeds operator order");
  if (kprime <= l || kprime > op.level) throw std::invalid_argument("target level outside (l, k]");
  return estimate_all_constants(op, cell, ens)(l, kprime - l);
}

InverseInequalityReport check_inverse_inequality(const LocalInterpolant& op, const Subdomain& cell, int l, int lprime,
                                                 const EnsembleSpec& ens) {
  if (lprime < 0 || lprime > l) throw std::invalid_argument("need 0 <= l' <= l");
  InverseInequalityReport rep;
  const Grid grid(ens.grid_n);
  const double h = cell.diameter();
  for (int s = 0; s < ens.size; ++s) {
    const SpectralField f = random_field(grid, ens.band, ens.seed + 7919ULL * s, ens.decay);
    const SpectralSource src(f);
    const LocalFit fit = apply_local(op, cell, src);
    const double top = std::sqrt(fit_seminorm_sq(fit, cell.cx(), cell.cy(), cell.core(), l));
    const double bot = std::sqrt(fit_seminorm_sq(fit, cell.cx(), cell.cy(), cell.core(), lprime));
    if (bot <= 0.0) continue;
    rep.max_ratio = std::max(rep.max_ratio, top / (std::pow(h, lprime - l) * bot));
    ++rep.samples;
  }
  return rep;
}

ConvergenceStudy convergence_order(const LocalInterpolant& op, const FieldSource& phi, double x, double y, double s0,
                                   int levels, int l, double collar_fraction, double floor) {
  if (levels < 4) throw std::invalid_argument("convergence study needs at least four cell sizes");
  ConvergenceStudy st;
  for (int i = 0; i < levels; ++i) {
    const double s = s0 * std::pow(0.5, i);
    const Subdomain cell{x - 0.5 * s, y - 0.5 * s, s, s, 2.0 * collar_fraction * s};
    const LocalFit fit = apply_local(op, cell, phi);
    const double e2 = local_seminorm_sq(phi, &fit, cell.cx(), cell.cy(), cell.core(), l);
    st.h.push_back(cell.diameter());
    st.error.push_back(std::sqrt(e2 / cell.core().area()));
  }
  const LineFit f = loglog_fit(st.h, st.error, floor);
  st.slope = f.slope;
  st.residual = f.residual;
  st.used = f.points;
  return st;
}

}  // namespace mfda
