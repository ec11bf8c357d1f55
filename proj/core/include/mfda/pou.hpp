#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "mfda/cover.hpp"
#include "mfda/jet.hpp"

namespace mfda {

class PouConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// S(t) = f(t) / (f(t) + f(1-t)), f(t) = exp(-1/t) for t > 0; Taylor jet in t.
Jet1 smoothstep_jet(double t, int order);
double smoothstep(double t);

// psi_q = w_q / sum w, with w_q a tensor plateau bump: 1 on Q_q, 0 off Q~_q.
// When the bumps already sum to 1 the quotient is skipped.
class PartitionOfUnity {
 public:
  PartitionOfUnity(const Cover& cover, int smoothness);

  const Cover& cover() const { return cover_; }
  int smoothness() const { return smoothness_; }
  bool normalized() const { return normalized_; }

  double bump(int q, double x, double y) const;
  Jet2 bump_jet(int q, double x, double y, int order) const;
  double value(int q, double x, double y) const;
  // Jet of psi_q at (x, y), expanded in the global coordinates.
  Jet2 jet(int q, double x, double y, int order) const;
  double sum(double x, double y) const;

 private:
  Jet1 profile_jet(double offset, double half_core, double collar, int order) const;

  Cover cover_;
  int smoothness_;
  bool normalized_ = false;
};

PartitionOfUnity build_pou(const Cover& cover, int smoothness = 4);

struct PouReport {
  double sum_max_deviation = 0.0;
  bool plateau_exact = true;
  bool support_exact = true;
  // c_l = sup |d^alpha psi_q| h_q^l for |alpha| = l, l = 1..4: extrema over cells.
  std::array<double, 5> c_min{};
  std::array<double, 5> c_max{};
  double c_ratio(int l) const { return c_min[l] > 0.0 ? c_max[l] / c_min[l] : 0.0; }
};

// Grid checks on an n x n lattice plus per-cell derivative sampling.
PouReport check_pou(const PartitionOfUnity& pou, int n, int samples_per_cell = 48);

}  // namespace mfda
