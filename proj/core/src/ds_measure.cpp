#include "corrdyn/ds_measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "corrdyn/error.hpp"

namespace corrdyn {
namespace {

struct Atom {
  SpherePoint point;
  double weight;
};

// Offset of chordal size at most `radius`, taken on the unit sphere.
SpherePoint jitter(const SpherePoint& p, double radius, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto v = p.to_unit_vector();
  std::array<double, 3> t{g(rng), g(rng), g(rng)};
  const double dot = t[0] * v[0] + t[1] * v[1] + t[2] * v[2];
  for (int i = 0; i < 3; ++i) t[i] -= dot * v[i];
  const double tn = std::hypot(t[0], t[1], t[2]);
  const double step = radius * u(rng);
  for (int i = 0; i < 3; ++i) v[i] += step * t[i] / tn;
  const double vn = std::hypot(v[0], v[1], v[2]);
  for (double& x : v) x /= vn;
  return SpherePoint::from_unit_vector(v);
}

}  // namespace

PullbackResult pullback_iterate(const Correspondence& corr, const SphereGrid& grid, const SpherePoint& x0, int n,
                                std::size_t cap, std::uint64_t seed) {
  if (corr.d_top() <= corr.d_fwd()) {
    throw Error(Errc::PreconditionViolated, "pullback needs d_top > d_fwd (got d_top=" + std::to_string(corr.d_top()) +
                                                ", d_fwd=" + std::to_string(corr.d_fwd()) + ")");
  }
  if (n < 0 || cap < 1) throw Error(Errc::InvalidArgument, "need n >= 0 and cap >= 1");
  std::mt19937_64 rng(seed);
  PullbackResult out;
  out.seed = seed;
  out.start = x0;
  while (corr.backward_images(out.start).degenerate) {
    if (out.resamples == 10) throw Error(Errc::DegenerateStart, "start stays degenerate after 10 re-samples");
    out.start = jitter(x0, 0.1, rng);
    ++out.resamples;
  }

  std::vector<Atom> level{{out.start, 1.0}};
  auto to_measure = [&](const std::vector<Atom>& atoms) {
    std::vector<SpherePoint> pts;
    std::vector<double> w;
    for (const auto& a : atoms) {
      pts.push_back(a.point);
      w.push_back(a.weight);
    }
    return SphereMeasure::from_points(grid, pts, w);
  };
  out.levels.push_back(to_measure(level));
  for (int k = 1; k <= n; ++k) {
    std::vector<Atom> next;
    for (const auto& a : level) {
      const auto img = corr.backward_images(a.point);
      const int total = img.total_multiplicity();
      if (total == 0) throw Error(Errc::DegenerateStart, "empty preimage fiber at level " + std::to_string(k));
      for (const auto& b : img.points) next.push_back({b.point, a.weight * b.multiplicity / total});
    }
    if (next.size() > cap) {
      std::vector<Atom> kept;
      kept.reserve(cap);
      std::sample(next.begin(), next.end(), std::back_inserter(kept), cap, rng);
      next = std::move(kept);
      out.thinned = true;
    }
    double mass = 0.0;
    for (const auto& a : next) mass += a.weight;
    for (auto& a : next) a.weight /= mass;
    level = std::move(next);
    out.levels.push_back(to_measure(level));
  }
  return out;
}

DsSupport ds_support(const std::vector<SphereMeasure>& levels, double threshold, double bound) {
  if (levels.size() < 2) throw Error(Errc::InvalidArgument, "ds_support needs at least two levels");
  const auto& last = levels.back();
  DsSupport out;
  out.certificate = measure_distance(levels[levels.size() - 2], last);
  if (out.certificate > bound) {
    throw Error(Errc::NotConverged, "last two levels differ by " + std::to_string(out.certificate) +
                                        " > bound " + std::to_string(bound));
  }
  const auto& grid = last.grid();
  const double cut = threshold / grid.size();
  for (int c = 0; c < grid.size(); ++c) {
    if (last.weight(c) > cut || (threshold <= 0.0 && last.weight(c) >= cut)) out.core.push_back(c);
  }
  out.cells = dilate(grid, out.core);
  return out;
}

InvarianceReport check_backward_invariance(const Correspondence& corr, const SphereGrid& grid, const CellSet& omega,
                                           int samples, std::uint64_t seed) {
  if (omega.empty()) throw Error(Errc::InvalidArgument, "omega is empty");
  if (samples < 1) throw Error(Errc::InvalidArgument, "samples must be >= 1");
  const auto cells = normalized(omega);
  const auto allowed = dilate(grid, cells);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, cells.size() - 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  InvarianceReport r;
  r.samples = samples;
  for (int s = 0; s < samples; ++s) {
    const auto x = grid.point_in_cell(cells[pick(rng)], u(rng), u(rng));
    const auto img = corr.backward_images(x);
    const bool bad = std::any_of(img.points.begin(), img.points.end(),
                                 [&](const BranchPoint& b) { return !contains(allowed, grid.cell_of(b.point)); });
    if (bad) ++r.violations;
  }
  r.violation_fraction = static_cast<double>(r.violations) / samples;
  r.passed = r.violation_fraction <= 0.01;
  return r;
}

InvariantPaths invariant_forward_paths(const Correspondence& corr, const SphereGrid& grid, const CellSet& omega,
                                       const SpherePoint& x0, int n, std::size_t cap) {
  const auto cells = normalized(omega);
  if (!contains(cells, grid.cell_of(x0))) throw Error(Errc::PreconditionViolated, "x0 is not in omega");
  if (n < 0 || cap < 1) throw Error(Errc::InvalidArgument, "need n >= 0 and cap >= 1");
  const auto allowed = dilate(grid, cells);
  InvariantPaths out;
  ForwardPath current{{x0}, {}, {}};
  auto dfs = [&](auto&& self) -> void {
    if (out.paths.size() >= cap) {
      out.capped = true;
      return;
    }
    if (current.length() == n) {
      out.paths.push_back(current);
      return;
    }
    const auto img = corr.forward_images(current.points.back());
    for (const auto& b : img.points) {
      if (!contains(allowed, grid.cell_of(b.point))) continue;
      for (int k = 0; k < b.multiplicity; ++k) {
        current.points.push_back(b.point);
        current.symbols.push_back(b.component);
        current.branches.push_back(b.branch_index + k);
        self(self);
        current.points.pop_back();
        current.symbols.pop_back();
        current.branches.pop_back();
        if (out.capped) return;
      }
    }
  };
  dfs(dfs);
  out.none_found = out.paths.empty();
  return out;
}

}  // namespace corrdyn
