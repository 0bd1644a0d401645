#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "corrdyn/correspondence.hpp"
#include "corrdyn/functions.hpp"
#include "corrdyn/grid.hpp"
#include "corrdyn/measures.hpp"
#include "corrdyn/paths.hpp"

namespace corrdyn {

/// Real values on the active cells of a RuelleOperator, in active-cell order.
using GridFunction = std::vector<double>;

/// Transfer operator (L_f g)(x) = sum over backward branches y of x of
/// e^{f(y)} g(y), discretized on a set of active grid cells.
///
/// The branch table is built once: for every active cell centre x, each
/// preimage y (with multiplicity) is assigned to its own cell when that cell
/// is active, to the nearest active cell centre when it lies in the one-ring
/// dilation, and otherwise construction throws PreimageOutsideSupport.
class RuelleOperator {
 public:
  struct Branch {
    int target = 0;  // active index of the preimage cell
    int component = 1;
    int multiplicity = 1;
  };

  RuelleOperator(const Correspondence& corr, const SphereGrid& grid, const CellSet& active, int workers = 1);

  const SphereGrid& grid() const noexcept { return grid_; }
  const CellSet& cells() const noexcept { return cells_; }
  int size() const noexcept { return static_cast<int>(cells_.size()); }
  int degree() const noexcept { return d_top_; }
  /// Active index of a grid cell, or -1.
  int active_index(int cell) const noexcept;
  /// Active index for an arbitrary point under the clamping rule.
  int locate(const SpherePoint& p) const;
  const std::vector<Branch>& branches(int i) const { return table_.at(i); }

  /// Values of f at the active cell centres.
  GridFunction sample(const SphereFunction& f) const;
  GridFunction apply(const GridFunction& f, const GridFunction& g) const;
  /// A GridFunction as a SphereMeasure-compatible weight vector over the full grid.
  std::vector<double> spread(const GridFunction& values) const;

 private:
  SphereGrid grid_;
  CellSet cells_;
  CellSet ring_;
  std::vector<int> index_;
  std::vector<std::vector<Branch>> table_;
  int d_top_ = 0;
  int workers_ = 1;
};

struct HolderReport {
  double lambda = 0.0;
  double alpha = 0.0;
  std::vector<double> omega;  // omega[k-1] = omega_k
  double sup_norm = 0.0;
  double alpha_norm = 0.0;
  bool member = false;
};

/// omega_k(f) = max |f(x) - f(y)| over active centres with sph_dist <= lambda^{-(k-1)}.
/// Throws InvalidArgument unless lambda > 1 and K >= 1.
HolderReport holder_norm(const RuelleOperator& op, const GridFunction& f, double lambda, int K, double tail_tol = 1e-2);

struct SpectralResult {
  double lambda = 0.0;
  GridFunction h;
  int iterations = 0;
  double residual = 0.0;
  /// Ratio of the last two eigen-residuals (small means a wide spectral gap).
  double gap_estimate = 0.0;
  bool converged = false;
};

/// Power iteration g <- L_f g / |L_f g|_inf from a positive random start; h is
/// normalized to max 1. Throws NonConvergence after max_iter sweeps.
SpectralResult power_iteration(const RuelleOperator& op, const GridFunction& f, double tol, int max_iter,
                               std::uint64_t seed);

/// Normalized branch weights e^{f(y)} h(y) / (Lambda h(x)), listed per active cell in branch order.
struct NormalizedWeights {
  std::vector<std::vector<double>> weights;
  /// Per-cell sums of the weights.
  std::vector<double> sums;
};

/// Throws NonPositiveEigenfunction when min h <= 0.
NormalizedWeights normalize(const RuelleOperator& op, const GridFunction& f, const SpectralResult& spectral);

struct AdjointResult {
  SphereMeasure nu;
  PathMeasure mu0;
  GridFunction nu_active;
  int iterations = 0;
  /// |nu P - nu|_1 at exit.
  double residual = 0.0;
  /// L1 distance between the fixed points reached from two random starts.
  double start_spread = 0.0;
  bool non_unique = false;
};

/// Stationary distribution of the kernel P(x -> y) given by the normalized
/// weights, by dual power iteration from two random starts; mu0 is the
/// depth-`depth` cylinder measure of the backward chain with symbol tags.
/// Throws NonConvergence after max_iter sweeps.
AdjointResult adjoint_fixed_point(const RuelleOperator& op, const NormalizedWeights& weights, double tol, int max_iter,
                                  std::uint64_t seed, int depth = 1);

struct ConvergenceReport {
  /// c(g) = int g/h dnu.
  double c = 0.0;
  /// errors[n-1] = |Lambda^-n L_f^n g - c h|_inf.
  std::vector<double> errors;
  /// Geometric mean ratio of successive nonzero errors.
  double decay_rate = 0.0;
};

ConvergenceReport convergence_check(const RuelleOperator& op, const GridFunction& f, const GridFunction& g,
                                    const SpectralResult& spectral, const GridFunction& nu_active, int n_max);

/// For each path, sums e^{F} G over its one-step backward extensions with F,
/// G read off the 0-th coordinate, and compares with (L_f g) at the cell of
/// the path's start. Returns the largest absolute difference.
double lifted_consistency_check(const Correspondence& corr, const RuelleOperator& op, const GridFunction& f,
                                const GridFunction& g, std::span<const ForwardPath> paths);

}  // namespace corrdyn
