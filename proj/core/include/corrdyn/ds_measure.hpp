#pragma once

#include <cstdint>
#include <vector>

#include "corrdyn/correspondence.hpp"
#include "corrdyn/grid.hpp"
#include "corrdyn/measures.hpp"
#include "corrdyn/paths.hpp"

namespace corrdyn {

struct PullbackResult {
  /// levels[k] is the measure on the k-th preimage tree; levels[0] is the start.
  std::vector<SphereMeasure> levels;
  SpherePoint start;
  int resamples = 0;
  bool thinned = false;
  std::uint64_t seed = 0;
};

/// Iterated pullback d_top^-k sum of Dirac masses over k-th preimages, counted
/// with multiplicity. Levels above `cap` atoms are thinned uniformly at random
/// and renormalized. A start whose preimage fiber is degenerate is moved by a
/// random offset of chordal size <= 0.1, at most 10 times.
/// Throws PreconditionViolated unless d_top > d_fwd, DegenerateStart after
/// the last re-sample.
PullbackResult pullback_iterate(const Correspondence& corr, const SphereGrid& grid, const SpherePoint& x0, int n,
                                std::size_t cap, std::uint64_t seed);

struct DsSupport {
  /// Cells whose final-level weight exceeds threshold / N_cells.
  CellSet core;
  /// core dilated by one grid ring.
  CellSet cells;
  /// measure_distance between the last two levels.
  double certificate = 0.0;
};

/// Throws InvalidArgument with fewer than two levels and NotConverged when the
/// certificate exceeds `bound`.
DsSupport ds_support(const std::vector<SphereMeasure>& levels, double threshold, double bound = 0.02);

struct InvarianceReport {
  int samples = 0;
  int violations = 0;
  double violation_fraction = 0.0;
  bool passed = false;
};

/// Samples points in omega and checks that all their preimages land in the
/// one-ring dilation of omega. Passes when at most 1% of samples violate.
InvarianceReport check_backward_invariance(const Correspondence& corr, const SphereGrid& grid, const CellSet& omega,
                                           int samples, std::uint64_t seed);

struct InvariantPaths {
  std::vector<ForwardPath> paths;
  /// No path of the requested length stays in the dilated omega.
  bool none_found = false;
  /// The search stopped at the cap.
  bool capped = false;
};

/// Depth-first search over forward branches, pruned to the one-ring dilation
/// of omega. Throws PreconditionViolated when x0 is outside omega.
InvariantPaths invariant_forward_paths(const Correspondence& corr, const SphereGrid& grid, const CellSet& omega,
                                       const SpherePoint& x0, int n, std::size_t cap);

}  // namespace corrdyn
