#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mfda/spectral.hpp"

namespace mfda {

class FieldSource;

// Periodic displacement of x from c, in [-pi, pi).
double periodic_offset(double x, double c);
double wrap_angle(double x);

// Axis-aligned periodic rectangle [x0, x0+sx] x [y0, y0+sy] (anchor wrapped).
struct Rect {
  double x0 = 0.0, y0 = 0.0, sx = 0.0, sy = 0.0;
  double cx() const { return wrap_angle(x0 + 0.5 * sx); }
  double cy() const { return wrap_angle(y0 + 0.5 * sy); }
  double area() const { return sx * sy; }
  bool contains(double x, double y, double tol = 0.0) const;
};

// Overlap length of two periodic intervals.
double periodic_overlap(double a0, double la, double b0, double lb);

// Core Q (psi = 1 there) and collar delta; Q~ = Q + [-delta, delta]^2.
struct Subdomain {
  double x0 = 0.0, y0 = 0.0;
  double sx = 0.0, sy = 0.0;
  double collar = 0.0;

  Rect core() const { return {x0, y0, sx, sy}; }
  Rect collared() const;
  // Core grown by half the collar: the cell that the transition band splits evenly.
  Rect tile() const;
  double cx() const { return core().cx(); }
  double cy() const { return core().cy(); }
  double diameter() const;
};

class Cover {
 public:
  explicit Cover(std::vector<Subdomain> cells);

  const std::vector<Subdomain>& cells() const { return cells_; }
  std::size_t size() const { return cells_.size(); }
  const Subdomain& operator[](std::size_t i) const { return cells_[i]; }
  // Cells whose Q~ meets Q~_q with positive measure, self included.
  const std::vector<int>& neighbors(int q) const { return neighbors_[q]; }
  int overlap_bound() const { return pi0_; }
  double adicity() const { return adicity_; }
  std::optional<double> uniform_scale() const { return uniform_scale_; }
  double max_diameter() const;
  double min_diameter() const;
  // Cells whose closed Q~ contains the point.
  std::vector<int> cells_at(double x, double y) const;
  bool check_delta_adic(double delta) const;

 private:
  std::vector<Subdomain> cells_;
  std::vector<std::vector<int>> neighbors_;
  int pi0_ = 0;
  double adicity_ = 1.0;
  std::optional<double> uniform_scale_;
  int bins_ = 1;
  std::vector<std::vector<int>> bin_cells_;
};

Cover uniform_cover(int cells_per_axis, double collar_fraction);
Cover dyadic_cover(int levels, double collar_fraction = 0.25);

int overlap_count(const Cover& cover);

struct MultiplicityReport {
  bool determined = false;
  int multiplicity = 0;
  std::vector<std::vector<int>> classes;
  double lower = 0.0;     // (1/M) sum_Q int_Q phi
  double integral = 0.0;  // int_T2 phi
  double upper = 0.0;     // min_j sum_{Q in class j} int_Q phi
  bool sandwich_holds = false;
};

// Greedy colouring of the tiles into measure-disjoint classes that each
// tile T^2. The sandwich is checked on phi (constant 1 if null).
MultiplicityReport partition_multiplicity(const Cover& cover, const FieldSource* phi = nullptr);

struct OverlapIntegralReport {
  double lower = 0.0;
  double integral = 0.0;
  double upper = 0.0;
  bool holds = false;
};

OverlapIntegralReport check_overlap_integral(const Cover& cover, const FieldSource& phi);

std::string cover_to_json(const Cover& cover);
Cover cover_from_json(const std::string& text);
Cover load_cover(const std::string& path);
void save_cover(const std::string& path, const Cover& cover);

}  // namespace mfda
