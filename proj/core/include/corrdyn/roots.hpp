#pragma once

#include <span>
#include <vector>

#include "corrdyn/sphere.hpp"

namespace corrdyn {

struct Root {
  SpherePoint point;
  int multiplicity = 1;
};

struct RootOptions {
  /// Relative to the largest coefficient magnitude.
  double tol = 1e-12;
  int max_iterations = 500;
  /// Seed of the perturbed initial circle; fixed so that roots() stays a pure function.
  unsigned seed = 0x5eed;
};

/// All roots of sum_k coeffs[k] w^k, counted with multiplicity, on the Riemann sphere.
///
/// The formal degree is coeffs.size() - 1. Leading coefficients that vanish
/// (|c| <= tol * max|c|) contribute the point at infinity; vanishing trailing
/// coefficients contribute exact zeros. The remaining core is solved by
/// Aberth-Ehrlich simultaneous iteration from a randomly perturbed circle,
/// polished by Newton steps in the chart where each root lies, and clustered:
/// roots within 1e3 * tol * max(1, |r|) are merged, as are near-coincident
/// roots that jointly behave like a multiple root (tiny value and derivative
/// at the cluster mean).
///
/// Throws Error(ZeroPolynomial) for an identically zero input and
/// Error(NonConvergence) when the residual test fails after max_iterations.
std::vector<Root> roots(std::span<const cplx> coeffs, const RootOptions& opts = {});

/// Sum over roots of multiplicity.
int total_multiplicity(std::span<const Root> rs) noexcept;

/// Horner evaluation of sum_k coeffs[k] w^k.
cplx poly_eval(std::span<const cplx> coeffs, cplx w) noexcept;

/// sum_k |coeffs[k]| |w|^k, the natural scale for the residual at w.
double poly_scale(std::span<const cplx> coeffs, double abs_w) noexcept;

/// Residual |p(r)| / scale(p, r), evaluated in the chart where r lies.
double relative_residual(std::span<const cplx> coeffs, const SpherePoint& r) noexcept;

}  // namespace corrdyn
