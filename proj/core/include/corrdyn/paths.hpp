#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "corrdyn/correspondence.hpp"
#include "corrdyn/sphere.hpp"

namespace corrdyn {

/// A permissible forward path (x0, x1, ..., xn; a1, ..., an) with branch word (j1, ..., jn).
/// Symbols and branch indices are 1-based.
struct ForwardPath {
  std::vector<SpherePoint> points;
  std::vector<int> symbols;
  std::vector<int> branches;

  int length() const noexcept { return static_cast<int>(symbols.size()); }
};

/// A permissible backward path stored as (y_{-n}, ..., y_{-1}, y0; b_{n-1}, ..., b0)
/// with branch word (k_n, ..., k_1), so that (points[i], points[i+1]) lies on
/// component symbols[i].
struct BackwardPath {
  std::vector<SpherePoint> points;
  std::vector<int> symbols;
  std::vector<int> branches;

  int length() const noexcept { return static_cast<int>(symbols.size()); }
};

template <class Path>
struct PathSet {
  std::vector<Path> paths;
  /// True when the full family exceeded the cap and was thinned uniformly at random.
  bool truncated = false;
  /// Some visited fiber was degenerate (critical value or vanishing fiber).
  bool degenerate = false;
  std::uint64_t seed = 0;
};

/// Breadth-first expansion of all branch and symbol choices up to depth n.
/// A branch of multiplicity m contributes m children with consecutive branch
/// indices. Whenever a level exceeds `cap`, it is replaced by a uniform random
/// subsample of size `cap` drawn with `seed`.
PathSet<ForwardPath> enumerate_forward_paths(const Correspondence& corr, const SpherePoint& x0, int n,
                                             std::size_t cap, std::uint64_t seed = 0);
PathSet<BackwardPath> enumerate_backward_paths(const Correspondence& corr, const SpherePoint& y0, int n,
                                               std::size_t cap, std::uint64_t seed = 0);

/// Truncated path metric: max of 2^-r d(x_r, y_r) and 2^-r [a_r != b_r].
/// Throws LengthMismatch for paths of different lengths.
double path_metric(const ForwardPath& p, const ForwardPath& q);

/// Drops x0, a1 and j1. Throws EmptyPath on a length-0 path.
ForwardPath shift(const ForwardPath& p);

/// Coordinate projections; throw IndexOutOfRange outside 0 <= r <= n (points)
/// or 1 <= r <= n (symbols).
SpherePoint project_point(const ForwardPath& p, int r);
int project_symbol(const ForwardPath& p, int r);
/// Backward projections: y_{-r} for 0 <= r <= n and b_r for 0 <= r < n.
SpherePoint project_point(const BackwardPath& p, int r);
int project_symbol(const BackwardPath& p, int r);

/// Largest relative incidence residual |P_a(x_{r-1}, x_r)| along the path.
double incidence_defect(const Correspondence& corr, const ForwardPath& p);
double incidence_defect(const Correspondence& corr, const BackwardPath& p);

/// (n, eps)-separated: some coordinate farther than eps apart, or some symbol differs.
bool are_separated(const ForwardPath& p, const ForwardPath& q, double eps);
/// Same symbol word and every coordinate strictly closer than eps.
bool shadows(const ForwardPath& p, const ForwardPath& q, double eps);

/// Greedy separated selection. Candidates are visited in descending
/// `log_weights` order (ties by input order); a candidate is admitted iff it
/// is separated from every admitted path. Returns admitted indices in visit order.
std::vector<std::size_t> separated_indices(std::span<const ForwardPath> paths, double eps,
                                           std::span<const double> log_weights);

/// Greedy cover. Candidates are visited in `order` (all indices when empty);
/// a candidate is admitted iff no admitted path shadows it.
std::vector<std::size_t> spanning_indices(std::span<const ForwardPath> paths, double eps,
                                          std::span<const std::size_t> order = {});

std::vector<ForwardPath> separated_subset(std::span<const ForwardPath> paths, double eps,
                                          const std::function<double(const ForwardPath&)>& weight);
std::vector<ForwardPath> spanning_subset(std::span<const ForwardPath> paths, double eps);

}  // namespace corrdyn
