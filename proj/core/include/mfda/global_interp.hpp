#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mfda/cover.hpp"
#include "mfda/local_interp.hpp"
#include "mfda/pou.hpp"
#include "mfda/source.hpp"

namespace mfda {

enum class FamilyCategory { RepeatedUniform, RepeatedNonUniform, HybridUniform, HybridNonUniform };
std::string to_string(FamilyCategory c);

// I phi = sum_q psi_q I^(q) phi.
class GlobalInterpolant {
 public:
  GlobalInterpolant(PartitionOfUnity pou, std::vector<LocalInterpolant> locals);

  static GlobalInterpolant uniform(const Cover& cover, const LocalInterpolant& op, int smoothness = 4);

  const Cover& cover() const { return pou_.cover(); }
  const PartitionOfUnity& pou() const { return pou_; }
  const std::vector<LocalInterpolant>& locals() const { return locals_; }
  const CellOperator& cell_operator(int q) const { return cells_[q]; }
  std::size_t size() const { return cells_.size(); }

  int order() const { return order_; }
  int level() const { return level_; }
  bool generic() const { return generic_; }
  bool optimal() const { return optimal_; }
  FamilyCategory category() const { return category_; }
  std::optional<double> uniform_scale() const { return cover().uniform_scale(); }
  std::size_t rank() const;

  std::vector<LocalFit> fits(const FieldSource& phi) const;
  // Taylor jet of I phi at an absolute point.
  Jet2 jet(const std::vector<LocalFit>& fits, double x, double y, int order) const;
  double value(const std::vector<LocalFit>& fits, double x, double y) const { return jet(fits, x, y, 0).c[0][0]; }

 private:
  PartitionOfUnity pou_;
  std::vector<LocalInterpolant> locals_;
  std::vector<CellOperator> cells_;
  int order_ = 0;
  int level_ = 1;
  bool generic_ = true;
  bool optimal_ = true;
  FamilyCategory category_ = FamilyCategory::RepeatedUniform;
};

// Precompiled application on a collocation grid. Polynomial cells keep
// psi_q times the frame monomials at their grid points; spectral cells keep
// W_q(p, e) = psi_q(x_p) * cardinal_e(x_p).
class GridApplicator {
 public:
  GridApplicator(const GlobalInterpolant& interp, const Grid& grid, int band = -1);

  const Grid& grid() const { return grid_; }
  std::vector<double> apply(const SpectralField& phi) const;
  SpectralField apply_mean_free(const SpectralField& phi) const;
  VectorField apply_mean_free(const VectorField& w) const;

 private:
  struct CellWeights {
    std::vector<std::size_t> points;
    Eigen::MatrixXd monomials;
    Eigen::MatrixXcd weights;
  };
  GlobalInterpolant interp_;
  Grid grid_;
  SeparableSampler sampler_;
  std::vector<CellWeights> cells_;
};

// Generic path through the fits; values include the mean.
std::vector<double> apply_global(const GlobalInterpolant& interp, const FieldSource& phi, const Grid& grid);
// J phi = I phi - <I phi>.
SpectralField mean_free(const GlobalInterpolant& interp, const FieldSource& phi, const Grid& grid);

// Tensor Gauss lattice aligned with every core and collar edge.
struct GlobalLattice {
  std::vector<double> x, wx, y, wy;
};
GlobalLattice build_lattice(const Cover& cover, int points_per_interval = 8);

struct GlobalNorms {
  std::vector<double> error;        // ||phi - I phi||_{H^l}, l = 0..lmax
  std::vector<double> interpolant;  // ||I phi||_{H^l}
  std::vector<double> field;        // ||phi||_{H^l}
};

GlobalNorms global_norms(const GlobalInterpolant& interp, const FieldSource& phi, int lmax,
                         int points_per_interval = 8);

struct GlobalErrorRow {
  int l = 0;
  int j = 0;
  double h = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

struct GlobalErrorReport {
  int l = 0;
  double lhs = 0.0;  // ||phi - I phi||^2_{H^l}
  std::vector<GlobalErrorRow> rows;  // general-form terms, j = 1..k
  double rhs_general = 0.0;
  double ratio_general = 0.0;
  std::vector<GlobalErrorRow> optimal_rows;  // optimal form, k' = l+1..k
  std::string to_csv() const;
};

// constants: one per cell, or a single entry used for every cell.
GlobalErrorReport verify_global_error(const GlobalInterpolant& interp, const SpectralField& phi, int l,
                                      const std::vector<AssociatedConstants>& constants);

struct BoundednessReport {
  double ratio_l0 = 0.0;  // sup ||I phi||_{L2} / ||phi||_{H^k}
  double ratio_l1 = 0.0;  // sup ||I phi||_{H^1} / ||phi||_{H^k}
  int samples = 0;
};

BoundednessReport verify_boundedness(const GlobalInterpolant& interp, const EnsembleSpec& ens);

}  // namespace mfda
