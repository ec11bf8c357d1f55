#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mfda/cover.hpp"
#include "mfda/polynomial.hpp"
#include "mfda/source.hpp"

namespace mfda {

enum class InterpKind { SpectralLocal, Nodal0, VolAvg0, Taylor1, SobolevPoly, Lagrange, VolPoly };

struct LocalInterpolant {
  InterpKind kind = InterpKind::VolAvg0;
  int degree = 0;                   // k of SobolevPoly / Lagrange / VolPoly
  double modes = 0.0;               // N of SpectralLocal
  double mollifier_fraction = 0.5;  // SobolevPoly radius as a fraction of the core's shorter side
  int quadrature_points = 16;       // SobolevPoly tensor Gauss points per axis
  int order = 0;                    // m
  int level = 1;                    // k
  bool optimal = false;

  static LocalInterpolant spectral(double n_modes, int order = 2, int level = 3);
  static LocalInterpolant nodal0();
  static LocalInterpolant volume_average();
  static LocalInterpolant taylor1();
  static LocalInterpolant sobolev(int k, double mollifier_fraction = 0.5, int quadrature_points = 16);
  static LocalInterpolant lagrange(int k);
  static LocalInterpolant volume_polynomial(int k);

  // "spectral:N", "nodal0", "volavg0", "taylor1", "sobolev:k", "lagrange:k", "volpoly:k".
  static LocalInterpolant parse(const std::string& spec);
  std::string name() const;
};

// A local operator bound to one cell: a linear map from sampled functionals
// to a fit in the cell frame (coordinates relative to the core centre).
class CellOperator {
 public:
  struct Entry {
    int i = 0, j = 0;
  };

  CellOperator(const LocalInterpolant& op, const Subdomain& cell);
  // Same operator on a congruent cell; shares the precomputed maps.
  CellOperator(const CellOperator& proto, const Subdomain& cell);

  const LocalInterpolant& op() const { return op_; }
  const Subdomain& cell() const { return cell_; }
  const SampleRequest& request() const { return request_; }
  const std::vector<Entry>& entries() const { return packed_->entries; }
  std::size_t rank() const { return packed_->entries.size(); }
  bool polynomial() const { return op_.kind != InterpKind::SpectralLocal; }
  // Polynomial kinds: row e holds the coefficients of cardinal e, flattened column-major.
  const Eigen::MatrixXd& coefficient_map() const { return packed_->map; }
  const TensorPolynomial& frame() const { return frame_; }

  LocalFit fit(const Eigen::MatrixXcd& samples) const;
  // Value (or derivative) of the cardinal function of entry e at a frame point.
  Complex cardinal(std::size_t e, double X, double Y, int ax = 0, int ay = 0) const;

 private:
  void build_spectral();
  void build_nodal();
  void build_average();
  void build_taylor();
  void build_sobolev();
  void build_lagrange();
  void build_volpoly();

  struct Packed {
    std::vector<Entry> entries;
    Eigen::MatrixXd map;
  };

  LocalInterpolant op_;
  Subdomain cell_;
  SampleRequest request_;
  std::vector<Entry> entries_;          // during construction only
  std::vector<Eigen::MatrixXd> coefs_;  // during construction only
  std::shared_ptr<const Packed> packed_;
  TensorPolynomial frame_;              // polynomial kinds; c holds the shape
  LocalFourier fourier_frame_;          // spectral kind
};

LocalFit apply_local(const LocalInterpolant& op, const Subdomain& cell, const FieldSource& phi);

// Derivative (ax, ay) of a fit on the tensor lattice xs x ys (frame coordinates).
Eigen::MatrixXd fit_on_lattice(const LocalFit& fit, const std::vector<double>& xs, const std::vector<double>& ys,
                               int ax, int ay);

// Squared homogeneous seminorm over an absolute rectangle of phi - fit, where
// fit lives in the frame centred at (cx, cy). fit may be null.
double local_seminorm_sq(const FieldSource& phi, const LocalFit* fit, double cx, double cy, const Rect& region,
                         int level, double fit_sign = 1.0);
// Same with phi absent: seminorm of the fit alone.
double fit_seminorm_sq(const LocalFit& fit, double cx, double cy, const Rect& region, int level);
double local_sobolev_norm(const SpectralField& f, int level, const Rect& region);

// eps(l, j) for l = 0..m, j = 1..k-l; zero elsewhere.
struct AssociatedConstants {
  int order = 0;
  int level = 1;
  double h = 0.0;
  Eigen::MatrixXd eps;  // rows l = 0..m, cols j = 0..k (column 0 unused)

  double operator()(int l, int j) const;
  // General form: varepsilon_{l,j}^2 = sum_{i=0}^{j-1} eps_{i,j-i}^2.
  double general(int j) const;
  // Optimal form: varepsilon_{l,k'}^2 = sum_{i<=l} eps_{i,k'-i}^2.
  double optimal(int l, int kprime) const;
};

struct EnsembleSpec {
  int size = 8;
  int band = 4;
  double decay = 0.0;
  unsigned long long seed = 1;
  int grid_n = 64;
};

double estimate_constants(const LocalInterpolant& op, const Subdomain& cell, const EnsembleSpec& ens, int l,
                          int kprime);
AssociatedConstants estimate_all_constants(const LocalInterpolant& op, const Subdomain& cell,
                                           const EnsembleSpec& ens);

struct InverseInequalityReport {
  double max_ratio = 0.0;
  int samples = 0;
};

InverseInequalityReport check_inverse_inequality(const LocalInterpolant& op, const Subdomain& cell, int l,
                                                 int lprime, const EnsembleSpec& ens);

struct ConvergenceStudy {
  std::vector<double> h;
  std::vector<double> error;
  double slope = 0.0;
  double residual = 0.0;
  int used = 0;
};

// Cells centred at (x, y) with side s0 * 2^-i, i < levels; error is the RMS
// homogeneous seminorm ||phi - I phi||_{H^l(Q)} / sqrt(|Q|).
ConvergenceStudy convergence_order(const LocalInterpolant& op, const FieldSource& phi, double x, double y,
                                   double s0, int levels, int l, double collar_fraction = 0.25,
                                   double floor = 1e-12);

}  // namespace mfda
