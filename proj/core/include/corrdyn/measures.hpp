#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "corrdyn/correspondence.hpp"
#include "corrdyn/functions.hpp"
#include "corrdyn/grid.hpp"
#include "corrdyn/paths.hpp"

namespace corrdyn {

/// Probability measure on the cells of an equal-area grid. Integrals use the grid integration nodes (cell centres, poles for polar cells).
class SphereMeasure {
 public:
  SphereMeasure() = default;
  /// Throws InvalidArgument for negative weights, a size mismatch or a total
  /// mass away from 1 by more than 1e-12.
  SphereMeasure(SphereGrid grid, std::vector<double> weights, std::string provenance = {});

  static SphereMeasure dirac(const SphereGrid& grid, int cell);
  static SphereMeasure dirac(const SphereGrid& grid, const SpherePoint& p);
  static SphereMeasure uniform(const SphereGrid& grid, const CellSet& cells);
  /// Weighted atoms binned into cells; weights are renormalized to mass 1.
  static SphereMeasure from_points(const SphereGrid& grid, std::span<const SpherePoint> points,
                                   std::span<const double> weights);

  const SphereGrid& grid() const noexcept { return grid_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  double weight(int cell) const { return weights_.at(cell); }
  double mass() const noexcept;
  const std::string& provenance() const noexcept { return provenance_; }
  double integrate(const SphereFunction& f) const;
  double integrate(const std::function<double(const std::array<double, 3>&)>& f) const;
  /// Mass carried by `cells`.
  double mass_on(const CellSet& cells) const;
  /// Convex combination t * a + (1 - t) * b.
  static SphereMeasure mix(const SphereMeasure& a, const SphereMeasure& b, double t);

 private:
  SphereGrid grid_;
  std::vector<double> weights_;
  std::string provenance_;
};

/// One letter of a cylinder word: the cell of x_r and the symbol a_{r+1}.
using Letter = std::pair<int, int>;
using Word = std::vector<Letter>;

/// Probability measure on forward path space, either supported on finitely
/// many equal-length paths or given by weights on depth-D cylinder words.
class PathMeasure {
 public:
  PathMeasure() = default;
  static PathMeasure from_paths(const SphereGrid& grid, std::vector<ForwardPath> paths, std::vector<double> weights);
  /// Every word must have `depth` letters; weights are renormalized to mass 1.
  static PathMeasure from_cylinders(const SphereGrid& grid, int depth, std::map<Word, double> weights);
  /// The Bernoulli(p_1, ..., p_M) measure on the symbol shift with every point
  /// coordinate in `cell`, at cylinder depth `depth`.
  static PathMeasure bernoulli(const SphereGrid& grid, int cell, std::span<const double> probabilities, int depth);

  bool is_cylinder() const noexcept { return cylinder_; }
  const SphereGrid& grid() const noexcept { return grid_; }
  /// Cylinder depth, or path length for the support form.
  int depth() const noexcept { return depth_; }
  const std::vector<ForwardPath>& paths() const noexcept { return paths_; }
  const std::vector<double>& path_weights() const noexcept { return path_weights_; }
  const std::map<Word, double>& cylinders() const noexcept { return cylinders_; }
  double mass() const noexcept;
  /// Cylinder form of depth D (D <= path length) of a support-form measure; identity for cylinder form of equal depth.
  PathMeasure to_cylinders(int depth) const;
  /// t * a + (1 - t) * b. Both must share the representation, grid and depth.
  static PathMeasure mix(const PathMeasure& a, const PathMeasure& b, double t);

 private:
  SphereGrid grid_;
  bool cylinder_ = false;
  int depth_ = 0;
  std::vector<ForwardPath> paths_;
  std::vector<double> path_weights_;
  std::map<Word, double> cylinders_;
};

/// (Pi_r)_* mu. Support form: 0 <= r <= length; cylinder form: 0 <= r < depth.
/// Throws IndexOutOfRange otherwise.
SphereMeasure pushforward(const PathMeasure& mu, int r);

/// Fixed finite family of smooth functions on the sphere with weights 2^-k.
class TestFunctionFamily {
 public:
  using Fn = std::function<double(const std::array<double, 3>&)>;
  struct Member {
    std::string name;
    Fn fn;
    double weight;
  };

  TestFunctionFamily() = default;
  explicit TestFunctionFamily(std::vector<Member> members) : members_(std::move(members)) {}
  /// X, Y, Z, XY, YZ, XZ, X^2 - Y^2, (3Z^2 - 1)/2 in the unit-sphere coordinates, weights 2^-1 ... 2^-8.
  static TestFunctionFamily standard();

  const std::vector<Member>& members() const noexcept { return members_; }
  bool empty() const noexcept { return members_.empty(); }

 private:
  std::vector<Member> members_;
};

/// sum_k w_k |int f_k dm1 - int f_k dm2|. Throws FamilyEmpty and InvalidArgument on a grid mismatch.
double measure_distance(const SphereMeasure& m1, const SphereMeasure& m2,
                        const TestFunctionFamily& fam = TestFunctionFamily::standard());
/// sum_r 2^-r d((Pi_r)_* m1, (Pi_r)_* m2) over the coordinates both measures resolve.
double measure_distance(const PathMeasure& m1, const PathMeasure& m2,
                        const TestFunctionFamily& fam = TestFunctionFamily::standard());

/// Birkhoff averages of depth-D cylinder occupations along one random forward
/// trajectory with uniformly chosen branches (counted with multiplicity).
/// Throws InvalidArgument unless n_keep >= D >= 1, and TrajectoryEscape when
/// the orbit reaches a non-finite value or an empty fiber.
PathMeasure empirical_invariant_measure(const Correspondence& corr, const SphereGrid& grid, const SpherePoint& x0,
                                        int n_burn, int n_keep, int depth, std::uint64_t seed);

struct ShiftInvarianceReport {
  double defect = 0.0;
  bool passed = false;
};

/// max over depth-(D-1) cylinders C of |mu(sigma^-1 C) - mu(C)|. Requires cylinder form.
ShiftInvarianceReport check_shift_invariance(const PathMeasure& mu, double tol);

/// Partition of the grid cells into labelled blocks.
class SpherePartition {
 public:
  SpherePartition() = default;
  /// Throws NotAPartition unless the blocks are disjoint and cover every cell.
  SpherePartition(const SphereGrid& grid, const std::vector<CellSet>& blocks);

  static SpherePartition trivial(const SphereGrid& grid);
  static SpherePartition cells(const SphereGrid& grid);
  /// Blocks of band_step x sector_step grid cells.
  static SpherePartition blocks(const SphereGrid& grid, int band_step, int sector_step);

  const SphereGrid& grid() const noexcept { return grid_; }
  int size() const noexcept { return n_blocks_; }
  int label(int cell) const { return labels_.at(cell); }
  std::vector<CellSet> block_cells() const;
  bool operator==(const SpherePartition&) const = default;

 private:
  SphereGrid grid_;
  std::vector<int> labels_;
  int n_blocks_ = 0;
};

/// All nonempty intersections A_i with B_j.
SpherePartition join(const SpherePartition& a, const SpherePartition& b);

/// Partition of path space generated by factors Pi_p^-1(Q_i), optionally
/// intersected with Proj_{p+1}^-1({t}). A path's label is the tuple of its
/// factor labels, so joining concatenates factors.
class PathPartition {
 public:
  struct Factor {
    int position = 0;
    SpherePartition partition;
    bool use_symbol = true;
    bool operator==(const Factor&) const = default;
  };

  PathPartition() = default;
  PathPartition(std::vector<Factor> factors, int alphabet);

  const std::vector<Factor>& factors() const noexcept { return factors_; }
  int alphabet() const noexcept { return alphabet_; }
  /// Number of label tuples, including ones no path realizes.
  long long cell_count() const noexcept;
  /// Label of a path or of a cylinder word; throws NotAPartition when the
  /// factor positions exceed what the path or word resolves.
  std::vector<int> label(const ForwardPath& p) const;
  std::vector<int> label(const Word& w) const;

 private:
  std::vector<Factor> factors_;
  int alphabet_ = 1;
};

PathPartition join(const PathPartition& a, const PathPartition& b);
/// Q^Gamma: the depth-1 partition by (block of x_0, symbol a_1), s * M cells.
PathPartition lifted_partition(const SpherePartition& q, int alphabet);
/// The lifted partition moved to coordinate p (pulled back by sigma^p).
PathPartition shifted_lift(const SpherePartition& q, int alphabet, int p);

/// -sum mu(A) log mu(A) with 0 log 0 = 0.
double partition_entropy(const PathMeasure& mu, const PathPartition& partition);
double partition_entropy(const SphereMeasure& nu, const SpherePartition& partition);

struct EntropyOptions {
  int n_max = 4;
  /// Allowed measure_distance between (Pi_0)_* mu and nu.
  double pushforward_tol = 1e-6;
};

/// Per partition Q: H_n = H_mu(join_{p<n} lift_p(Q)) and rate H_{n_max} - H_{n_max - 1};
/// returns the largest rate over the partition schedule.
/// Throws PushforwardMismatch when (Pi_0)_* mu is not nu within tolerance.
double intermediate_entropy(const SphereMeasure& nu, const PathMeasure& mu, const Correspondence& corr,
                            std::span<const SpherePartition> partitions, const EntropyOptions& options = {});

/// H_n of the joined lifts for n = 0 ... n_max.
std::vector<double> joined_entropies(const PathMeasure& mu, const SpherePartition& q, int alphabet, int n_max);

/// Entropy rate of the symbol process: H(a_1..a_n) - H(a_1..a_{n-1}) at n = n_max.
double cylinder_entropy_rate(const PathMeasure& mu, int n_max);

/// Largest intermediate entropy over candidates whose push-forward matches nu.
/// Throws NoValidCandidates when none does.
double measure_entropy(const SphereMeasure& nu, const Correspondence& corr, std::span<const PathMeasure> candidates,
                       std::span<const SpherePartition> partitions, const EntropyOptions& options = {});

struct VariationalCase {
  std::string label;
  SphereMeasure nu;
  std::vector<PathMeasure> candidates;
};

struct VariationalRow {
  std::string label;
  double entropy = 0.0;
  double integral = 0.0;
  double value = 0.0;
  bool within_bound = false;
};

struct VariationalReport {
  double pressure = 0.0;
  double slack = 0.0;
  std::vector<VariationalRow> rows;
  double best_value = 0.0;
  /// pressure - best_value.
  double gap = 0.0;
  bool all_within_bound = true;
};

/// value(nu) = measure_entropy(nu) + int f dnu for every case, compared with Pr + slack.
VariationalReport variational_check(const Correspondence& corr, const SphereFunction& f,
                                    std::span<const VariationalCase> cases,
                                    std::span<const SpherePartition> partitions, double pressure,
                                    double slack = 0.05, const EntropyOptions& options = {});

}  // namespace corrdyn
