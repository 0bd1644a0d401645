#pragma once

#include <array>
#include <complex>

namespace corrdyn {

using cplx = std::complex<double>;

enum class Chart { Direct, Reciprocal };

/// A point of the Riemann sphere.
///
/// The canonical form keeps the chart value inside the closed unit disk:
/// |z| <= 1 is stored directly, |z| > 1 is stored as w = 1/z in the
/// reciprocal chart. The point at infinity is the reciprocal chart value 0.
class SpherePoint {
 public:
  SpherePoint() = default;

  static SpherePoint from_complex(cplx z) noexcept;
  static SpherePoint from_chart(Chart chart, cplx value) noexcept;
  static SpherePoint infinity() noexcept { return SpherePoint(Chart::Reciprocal, 0.0); }
  /// Inverse stereographic projection of a unit vector (x, y, z); the north pole is infinity.
  static SpherePoint from_unit_vector(const std::array<double, 3>& v) noexcept;

  bool is_infinity() const noexcept { return chart_ == Chart::Reciprocal && value_ == cplx(0.0); }
  Chart chart() const noexcept { return chart_; }
  cplx chart_value() const noexcept { return value_; }

  /// Value in the z-chart; returns (inf, 0) for the point at infinity.
  cplx to_complex() const noexcept;
  /// Value expressed in the requested chart; 1/0 is reported as infinity.
  cplx value_in(Chart chart) const noexcept;
  /// |z| with infinity mapped to +inf.
  double modulus() const noexcept;

  /// Unit-sphere embedding (x, y, z) with infinity at the north pole.
  std::array<double, 3> to_unit_vector() const noexcept;

  bool is_finite_value() const noexcept;

 private:
  SpherePoint(Chart chart, cplx value) noexcept : chart_(chart), value_(value) {}

  Chart chart_ = Chart::Direct;
  cplx value_ = 0.0;
};

/// Chordal distance 2|z - w| / (sqrt(1 + |z|^2) sqrt(1 + |w|^2)), in [0, 2].
double sph_dist(const SpherePoint& p, const SpherePoint& q) noexcept;

/// Chordal distance computed from explicit chart values; chart-invariant by
/// construction and used to cross-check the canonical route.
double sph_dist_in_charts(Chart cp, cplx p, Chart cq, cplx q) noexcept;

}  // namespace corrdyn
