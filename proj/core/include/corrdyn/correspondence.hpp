#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "corrdyn/roots.hpp"
#include "corrdyn/sphere.hpp"

namespace corrdyn {

struct Monomial {
  int z_power = 0;
  int w_power = 0;
  cplx coeff;
};

/// Bivariate polynomial P(z, w) = sum c_{a,b} z^a w^b defining one irreducible
/// component of a correspondence, together with its multiplicity.
class BivarPoly {
 public:
  BivarPoly() = default;
  /// Degrees are read off the nonzero entries. Throws InvalidComponent unless
  /// deg_z >= 1 and deg_w >= 1 (both projections surjective) and multiplicity >= 1.
  explicit BivarPoly(std::span<const Monomial> terms, int multiplicity = 1);

  int deg_z() const noexcept { return deg_z_; }
  int deg_w() const noexcept { return deg_w_; }
  int multiplicity() const noexcept { return multiplicity_; }
  cplx coeff(int a, int b) const noexcept;
  std::vector<Monomial> terms() const;

  /// Coefficients (ascending in w) of P(x, w), with x given in `chart`. In the
  /// reciprocal chart P is homogenized by u^{deg_z}, u = 1/x.
  std::vector<cplx> fiber_over_z(Chart chart, cplx x) const;
  /// Coefficients (ascending in z) of P(z, y), homogenized likewise in y.
  std::vector<cplx> fiber_over_w(Chart chart, cplx y) const;

  /// |P(x, y)| relative to sum |c_{a,b}| |x|^a |y|^b, both arguments taken in their canonical charts.
  double incidence_residual(const SpherePoint& x, const SpherePoint& y) const noexcept;

 private:
  int deg_z_ = 0;
  int deg_w_ = 0;
  int multiplicity_ = 1;
  std::vector<cplx> table_;  // (deg_z + 1) x (deg_w + 1), row-major in z power
};

/// One point of a fiber, tagged with its component (1-based) and branch index
/// (1-based; a root of multiplicity m occupies indices [branch_index, branch_index + m)).
struct BranchPoint {
  SpherePoint point;
  int component = 1;
  int branch_index = 1;
  int multiplicity = 1;
};

struct ImageSet {
  std::vector<BranchPoint> points;
  /// Set for non-generic fibers: a vanishing fiber polynomial, a repeated
  /// root, or a total count different from the generic degree.
  bool degenerate = false;

  int total_multiplicity() const noexcept;
};

struct ComponentDegrees {
  int lambda = 0;  // forward branches, deg_w
  int delta = 0;   // backward branches, deg_z
  int multiplicity = 1;
};

struct Degrees {
  int d_fwd = 0;
  int d_top = 0;
  std::vector<ComponentDegrees> components;
};

/// A holomorphic correspondence: a formal sum of components with multiplicities.
/// Immutable after construction.
class Correspondence {
 public:
  explicit Correspondence(std::vector<BivarPoly> components, RootOptions root_options = {});

  /// Parses the plain-text component format (see README). Throws ParseError or InvalidComponent.
  static Correspondence parse(std::string_view text);
  static Correspondence load(const std::filesystem::path& path);
  std::string to_text() const;

  int size() const noexcept { return static_cast<int>(components_.size()); }
  const std::vector<BivarPoly>& components() const noexcept { return components_; }
  const BivarPoly& component(int t) const { return components_.at(t - 1); }
  const Degrees& degrees() const noexcept { return degrees_; }
  int d_fwd() const noexcept { return degrees_.d_fwd; }
  int d_top() const noexcept { return degrees_.d_top; }

  /// Roots y of P_t(x, y) = 0 for every component t, in canonical branch order
  /// (argument, then modulus, infinity last), each component repeated m_t times.
  ImageSet forward_images(const SpherePoint& x) const;
  ImageSet backward_images(const SpherePoint& y) const;

  /// Same computations with the base point expressed in an explicit chart.
  ImageSet forward_images(Chart chart, cplx x) const;
  ImageSet backward_images(Chart chart, cplx y) const;

 private:
  enum class Direction { Forward, Backward };
  ImageSet images(Direction dir, Chart chart, cplx base) const;

  std::vector<BivarPoly> components_;
  Degrees degrees_;
  RootOptions root_options_;
};

struct ExpansivityResult {
  bool is_expansive = false;
  double lambda_estimate = 0.0;
  int pairs_used = 0;
};

/// Numerical probe of backward contraction: for each sampled close pair
/// (x0, y0) and each backward branch of x0, the best backward branch of y0
/// with the same component gives a ratio d(x', y') / d(x0, y0). The pair's
/// ratio is the worst branch; lambda_estimate is the reciprocal of the worst
/// pair ratio. Pairs farther apart than probe_scale, or coincident, are skipped.
/// Throws InsufficientPairs when no usable pair remains.
ExpansivityResult expansivity_probe(const Correspondence& corr,
                                    std::span<const std::pair<SpherePoint, SpherePoint>> region,
                                    int samples, double probe_scale = 0.1, double margin = 0.05);

}  // namespace corrdyn
