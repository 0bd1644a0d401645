#include "corrdyn/sphere.hpp"

#include <cmath>
#include <limits>

namespace corrdyn {

SpherePoint SpherePoint::from_complex(cplx z) noexcept {
  if (std::isinf(z.real()) || std::isinf(z.imag())) return infinity();
  if (std::abs(z) <= 1.0) return SpherePoint(Chart::Direct, z);
  return SpherePoint(Chart::Reciprocal, 1.0 / z);
}

SpherePoint SpherePoint::from_chart(Chart chart, cplx value) noexcept {
  if (chart == Chart::Direct) return from_complex(value);
  if (std::isinf(value.real()) || std::isinf(value.imag())) return SpherePoint(Chart::Direct, 0.0);
  if (std::abs(value) <= 1.0) {
    // |w| == 1 is the shared boundary; keep the direct chart there.
    if (std::abs(value) == 1.0) return SpherePoint(Chart::Direct, 1.0 / value);
    return SpherePoint(Chart::Reciprocal, value);
  }
  return SpherePoint(Chart::Direct, 1.0 / value);
}

SpherePoint SpherePoint::from_unit_vector(const std::array<double, 3>& v) noexcept {
  // z = (x + iy) / (1 - h) for the south hemisphere, 1/z = (x - iy) / (1 + h) for the north.
  const double h = v[2];
  if (h <= 0.0) return SpherePoint(Chart::Direct, cplx(v[0], v[1]) / (1.0 - h));
  return from_chart(Chart::Reciprocal, cplx(v[0], -v[1]) / (1.0 + h));
}

cplx SpherePoint::to_complex() const noexcept {
  if (chart_ == Chart::Direct) return value_;
  if (value_ == cplx(0.0)) return {std::numeric_limits<double>::infinity(), 0.0};
  return 1.0 / value_;
}

cplx SpherePoint::value_in(Chart chart) const noexcept {
  if (chart == chart_) return value_;
  if (value_ == cplx(0.0)) return {std::numeric_limits<double>::infinity(), 0.0};
  return 1.0 / value_;
}

double SpherePoint::modulus() const noexcept {
  if (chart_ == Chart::Direct) return std::abs(value_);
  const double a = std::abs(value_);
  return a == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / a;
}

bool SpherePoint::is_finite_value() const noexcept {
  return std::isfinite(value_.real()) && std::isfinite(value_.imag());
}

std::array<double, 3> SpherePoint::to_unit_vector() const noexcept {
  const double n2 = std::norm(value_);
  const double d = 1.0 + n2;
  if (chart_ == Chart::Direct) {
    return {2.0 * value_.real() / d, 2.0 * value_.imag() / d, (n2 - 1.0) / d};
  }
  // z = 1/w: x + iy = 2 conj(w) / (1 + |w|^2), h = (1 - |w|^2) / (1 + |w|^2)
  return {2.0 * value_.real() / d, -2.0 * value_.imag() / d, (1.0 - n2) / d};
}

double sph_dist_in_charts(Chart cp, cplx p, Chart cq, cplx q) noexcept {
  // The chordal metric is invariant under z -> 1/z, so same-chart pairs use
  // the plain formula; mixed pairs use |pq - 1| with q the reciprocal value.
  if (cp == cq) {
    return 2.0 * std::abs(p - q) / (std::sqrt(1.0 + std::norm(p)) * std::sqrt(1.0 + std::norm(q)));
  }
  const cplx direct = cp == Chart::Direct ? p : q;
  const cplx recip = cp == Chart::Direct ? q : p;
  return 2.0 * std::abs(direct * recip - 1.0) /
         (std::sqrt(1.0 + std::norm(direct)) * std::sqrt(1.0 + std::norm(recip)));
}

double sph_dist(const SpherePoint& p, const SpherePoint& q) noexcept {
  const double d = sph_dist_in_charts(p.chart(), p.chart_value(), q.chart(), q.chart_value());
  return d > 2.0 ? 2.0 : d;
}

}  // namespace corrdyn
