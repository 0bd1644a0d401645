#include "corrdyn/roots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "corrdyn/error.hpp"

namespace corrdyn {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// p(z) / p'(z), evaluated through the reversed polynomial when |z| > 1.
cplx newton_ratio(std::span<const cplx> c, cplx z) {
  const auto m = static_cast<int>(c.size()) - 1;
  if (std::abs(z) <= 1.0) {
    cplx p = c[m];
    cplx dp = 0.0;
    for (int k = m - 1; k >= 0; --k) {
      dp = dp * z + p;
      p = p * z + c[k];
    }
    return p / dp;
  }
  const cplx y = 1.0 / z;
  cplx q = c[0];
  cplx dq = 0.0;
  for (int k = 1; k <= m; ++k) {
    dq = dq * y + q;
    q = q * y + c[k];
  }
  return z * q / (static_cast<double>(m) * q - y * dq);
}

struct UnionFind {
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::size_t> parent;
};

std::vector<cplx> aberth(std::span<const cplx> c, const RootOptions& opts) {
  const auto m = static_cast<int>(c.size()) - 1;
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> jitter(0.0, 1.0);

  const double radius = std::pow(std::abs(c[0]) / std::abs(c[m]), 1.0 / m);
  std::vector<cplx> z(m);
  for (int k = 0; k < m; ++k) {
    const double angle = 2.0 * std::numbers::pi * (k + 0.25 * jitter(rng)) / m + 0.4;
    z[k] = std::polar(radius * (1.0 + 0.05 * jitter(rng)), angle);
  }

  const double residual_target = 64.0 * kEps * m;
  for (int it = 0; it < opts.max_iterations; ++it) {
    bool small_steps = true;
    bool small_residuals = true;
    for (int k = 0; k < m; ++k) {
      const cplx ratio = newton_ratio(c, z[k]);
      cplx sum = 0.0;
      for (int j = 0; j < m; ++j) {
        if (j != k) sum += 1.0 / (z[k] - z[j]);
      }
      cplx step = ratio / (1.0 - ratio * sum);
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) {
        step = cplx(1e-8 * (1.0 + std::abs(z[k])), 0.0);
      }
      z[k] -= step;
      if (std::abs(step) > 4.0 * kEps * std::max(1.0, std::abs(z[k]))) small_steps = false;
      if (relative_residual(c, SpherePoint::from_complex(z[k])) > residual_target) {
        small_residuals = false;
      }
    }
    if (small_steps || small_residuals) return z;
  }
  for (const cplx& r : z) {
    if (!(relative_residual(c, SpherePoint::from_complex(r)) <= opts.tol)) {
      throw Error(Errc::NonConvergence,
                  "Aberth iteration did not converge in " + std::to_string(opts.max_iterations) +
                      " iterations (degree " + std::to_string(m) + ")");
    }
  }
  return z;
}

}  // namespace

cplx poly_eval(std::span<const cplx> coeffs, cplx w) noexcept {
  cplx p = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) p = p * w + *it;
  return p;
}

double poly_scale(std::span<const cplx> coeffs, double abs_w) noexcept {
  double s = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) s = s * abs_w + std::abs(*it);
  return s;
}

double relative_residual(std::span<const cplx> coeffs, const SpherePoint& r) noexcept {
  if (r.chart() == Chart::Direct) {
    const cplx z = r.chart_value();
    const double s = poly_scale(coeffs, std::abs(z));
    return s == 0.0 ? 0.0 : std::abs(poly_eval(coeffs, z)) / s;
  }
  // Reversed polynomial in w = 1/z.
  std::vector<cplx> rev(coeffs.rbegin(), coeffs.rend());
  const cplx w = r.chart_value();
  const double s = poly_scale(rev, std::abs(w));
  return s == 0.0 ? 0.0 : std::abs(poly_eval(rev, w)) / s;
}

int total_multiplicity(std::span<const Root> rs) noexcept {
  int n = 0;
  for (const auto& r : rs) n += r.multiplicity;
  return n;
}

std::vector<Root> roots(std::span<const cplx> coeffs, const RootOptions& opts) {
  double cmax = 0.0;
  for (const cplx& c : coeffs) cmax = std::max(cmax, std::abs(c));
  if (coeffs.empty() || cmax == 0.0) {
    throw Error(Errc::ZeroPolynomial, "cannot solve the zero polynomial");
  }
  const double negligible = opts.tol * cmax;
  const int degree = static_cast<int>(coeffs.size()) - 1;
  int hi = degree;
  while (std::abs(coeffs[hi]) <= negligible) --hi;
  int lo = 0;
  while (std::abs(coeffs[lo]) <= negligible) ++lo;

  const int at_infinity = degree - hi;
  const int at_zero = lo;
  const std::span<const cplx> core = coeffs.subspan(lo, hi - lo + 1);
  const int m = hi - lo;

  std::vector<cplx> found;
  if (m == 1) {
    found.push_back(-core[0] / core[1]);
  } else if (m > 1) {
    found = aberth(core, opts);
  }

  // Newton polish in the chart where each root lives.
  for (cplx& r : found) {
    for (int k = 0; k < 2; ++k) {
      const cplx step = newton_ratio(core, r);
      if (std::isfinite(step.real()) && std::isfinite(step.imag()) &&
          std::abs(step) < 1e-6 * std::max(1.0, std::abs(r))) {
        r -= step;
      }
    }
  }

  UnionFind clusters(found.size());
  const double merge_radius = 1e3 * opts.tol;
  for (std::size_t i = 0; i < found.size(); ++i) {
    for (std::size_t j = i + 1; j < found.size(); ++j) {
      const double scale = std::max({1.0, std::abs(found[i]), std::abs(found[j])});
      const double gap = std::abs(found[i] - found[j]);
      if (gap <= merge_radius * scale) {
        clusters.unite(i, j);
      } else if (gap <= 1e-4 * scale) {
        const cplx mid = 0.5 * (found[i] + found[j]);
        if (relative_residual(core, SpherePoint::from_complex(mid)) <= 100.0 * kEps * m) {
          clusters.unite(i, j);
        }
      }
    }
  }

  std::vector<Root> out;
  std::vector<cplx> sums(found.size(), 0.0);
  std::vector<int> counts(found.size(), 0);
  for (std::size_t i = 0; i < found.size(); ++i) {
    const std::size_t r = clusters.find(i);
    sums[r] += found[i];
    counts[r] += 1;
  }
  for (std::size_t i = 0; i < found.size(); ++i) {
    if (counts[i] > 0) {
      out.push_back({SpherePoint::from_complex(sums[i] / static_cast<double>(counts[i])), counts[i]});
    }
  }
  if (at_zero > 0) out.push_back({SpherePoint::from_complex(0.0), at_zero});
  if (at_infinity > 0) out.push_back({SpherePoint::infinity(), at_infinity});
  return out;
}

}  // namespace corrdyn
