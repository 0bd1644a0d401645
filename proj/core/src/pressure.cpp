#include "corrdyn/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include "corrdyn/error.hpp"
#include "corrdyn/grid.hpp"
#include "corrdyn/parallel.hpp"
#include "corrdyn/paths.hpp"

namespace corrdyn {
namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double log_sum(std::span<const double> lw, std::span<const std::size_t> idx) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i : idx) m = std::max(m, lw[i]);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (std::size_t i : idx) s += std::exp(lw[i] - m);
  return m + std::log(s);
}

double log_weight(const SphereFunction& f, const ForwardPath& p) {
  double s = 0.0;
  for (int r = 0; r < p.length(); ++r) s += f(p.points[r]);
  return s;
}

double slope(const std::vector<const PressureRow*>& rows, double PressureRow::*log_sum, double PressureRow::*rate) {
  if (rows.size() < 2) return rows.back()->*rate;
  const auto* a = rows[rows.size() - 2];
  const auto* b = rows.back();
  return (b->*log_sum - a->*log_sum) / static_cast<double>(b->n - a->n);
}

}  // namespace

std::vector<SpherePoint> sample_start_points(int grid_points, std::span<const StartRegion> focus, std::uint64_t seed) {
  if (grid_points < 0) throw Error(Errc::InvalidArgument, "grid_points must be >= 0");
  std::vector<SpherePoint> out;
  if (grid_points > 0) {
    const int bands = std::max(1, static_cast<int>(std::lround(std::sqrt(grid_points / 2.0))));
    const int sectors = std::max(1, static_cast<int>(std::lround(static_cast<double>(grid_points) / bands)));
    const SphereGrid grid(bands, sectors);
    for (int c = 0; c < grid.size(); ++c) out.push_back(grid.center(c));
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const auto& region : focus) {
    if (region.count < 0 || !(region.radius >= 0.0)) throw Error(Errc::InvalidArgument, "bad start region");
    for (int k = 0; k < region.count; ++k) {
      cplx z;
      if (region.kind == StartRegion::Kind::Circle) {
        z = region.center + std::polar(region.radius, 2.0 * std::numbers::pi * k / region.count);
      } else {
        const double r = region.radius * std::sqrt(unit(rng));
        z = region.center + std::polar(r, 2.0 * std::numbers::pi * unit(rng));
      }
      out.push_back(SpherePoint::from_complex(z));
    }
  }
  return out;
}

PressureReport pressure_estimate(const Correspondence& corr, const SphereFunction& f,
                                 std::span<const ScheduleEntry> schedule, int start_points, std::uint64_t seed,
                                 const PressureOptions& options) {
  if (schedule.empty()) throw Error(Errc::ScheduleEmpty, "pressure schedule has no rows");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (schedule[i].n < 1) throw Error(Errc::InvalidArgument, "schedule n must be >= 1");
    if (!(schedule[i].eps > 0.0)) throw Error(Errc::InvalidArgument, "schedule eps must be > 0");
    if (i > 0 && schedule[i].n < schedule[i - 1].n) throw Error(Errc::InvalidArgument, "schedule n must not decrease");
  }
  const auto starts = sample_start_points(start_points, options.focus, seed);
  if (starts.empty()) throw Error(Errc::InvalidArgument, "no start points");

  PressureReport report;
  report.function = f.name();
  report.seed = seed;
  report.start_points = starts.size();

  for (std::size_t row_index = 0; row_index < schedule.size(); ++row_index) {
    const auto [n, eps] = schedule[row_index];
    std::vector<PathSet<ForwardPath>> per_start(starts.size());
    parallel_for(starts.size(), options.workers, [&](std::size_t i) {
      per_start[i] = enumerate_forward_paths(corr, starts[i], n, options.cap, splitmix(seed ^ splitmix(i)));
    });

    PressureRow row;
    row.n = n;
    row.eps = eps;
    std::vector<ForwardPath> paths;
    for (auto& set : per_start) {
      row.truncated = row.truncated || set.truncated;
      report.degenerate = report.degenerate || set.degenerate;
      std::move(set.paths.begin(), set.paths.end(), std::back_inserter(paths));
    }
    per_start.clear();
    row.paths = paths.size();

    std::vector<double> lw(paths.size());
    parallel_for(paths.size(), options.workers, [&](std::size_t i) { lw[i] = log_weight(f, paths[i]); });

    const auto sep = separated_indices(paths, eps, lw);
    std::vector<std::size_t> ascending(paths.size());
    std::iota(ascending.begin(), ascending.end(), 0);
    std::stable_sort(ascending.begin(), ascending.end(), [&](std::size_t a, std::size_t b) { return lw[a] < lw[b]; });
    const auto span = spanning_indices(paths, eps, ascending);

    row.separated = sep.size();
    row.spanning = span.size();
    row.sep_log_sum = log_sum(lw, sep);
    row.span_log_sum = log_sum(lw, span);
    row.sep_rate = row.sep_log_sum / n;
    row.span_rate = row.span_log_sum / n;
    report.truncated = report.truncated || row.truncated;
    report.rows.push_back(row);
  }

  double eps_min = std::numeric_limits<double>::infinity();
  for (const auto& r : report.rows) eps_min = std::min(eps_min, r.eps);
  std::vector<const PressureRow*> finest;
  for (const auto& r : report.rows) {
    if (r.eps != eps_min) continue;
    // Keep one row per n (the last one listed).
    if (!finest.empty() && finest.back()->n == r.n) finest.back() = &r;
    else finest.push_back(&r);
  }
  report.pressure = slope(finest, &PressureRow::sep_log_sum, &PressureRow::sep_rate);
  report.spanning_pressure = slope(finest, &PressureRow::span_log_sum, &PressureRow::span_rate);
  report.pressure_last = finest.back()->sep_rate;
  return report;
}

PressureReport entropy_estimate(const Correspondence& corr, std::span<const ScheduleEntry> schedule,
                                int start_points, std::uint64_t seed, const PressureOptions& options) {
  return pressure_estimate(corr, SphereFunction::constant(0.0), schedule, start_points, seed, options);
}

}  // namespace corrdyn
