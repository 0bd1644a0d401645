#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "corrdyn/correspondence.hpp"
#include "corrdyn/functions.hpp"
#include "corrdyn/sphere.hpp"

namespace corrdyn {

struct ScheduleEntry {
  int n = 1;
  double eps = 0.1;
};

/// Extra start points concentrated where the dynamics lives.
struct StartRegion {
  enum class Kind { Circle, Disk };
  Kind kind = Kind::Circle;
  cplx center = 0.0;
  double radius = 1.0;
  /// Circle: equally spaced at angles 2 pi k / count starting from center + radius.
  /// Disk: uniform in the planar disk, seeded.
  int count = 0;
};

struct PressureOptions {
  /// Path cap per start point.
  std::size_t cap = 1 << 16;
  std::vector<StartRegion> focus;
  int workers = 1;
};

struct PressureRow {
  int n = 0;
  double eps = 0.0;
  /// log of the weighted sum over the greedy separated family.
  double sep_log_sum = 0.0;
  /// log of the weighted sum over the greedy spanning family.
  double span_log_sum = 0.0;
  double sep_rate = 0.0;   // sep_log_sum / n
  double span_rate = 0.0;  // span_log_sum / n
  std::size_t paths = 0;
  std::size_t separated = 0;
  std::size_t spanning = 0;
  bool truncated = false;
};

struct PressureReport {
  std::string function;
  std::uint64_t seed = 0;
  std::size_t start_points = 0;
  std::vector<PressureRow> rows;
  /// Slope of sep_log_sum in n over the two largest-n rows at the smallest eps
  /// (sep_rate of that row when only one n is available).
  double pressure = 0.0;
  /// Same slope for the spanning column.
  double spanning_pressure = 0.0;
  /// sep_rate of the largest-n row at the smallest eps.
  double pressure_last = 0.0;
  bool truncated = false;
  bool degenerate = false;
};

/// Centres of an equal-area grid with about `grid_points` cells, followed by
/// the focus points. grid_points = 0 gives focus points only.
std::vector<SpherePoint> sample_start_points(int grid_points, std::span<const StartRegion> focus, std::uint64_t seed);

/// Weighted separated and spanning sums with path weight exp(sum_{p<n} f(x_p)).
/// Throws ScheduleEmpty for an empty schedule and InvalidArgument when n is
/// not increasing, eps is not positive or there are no start points.
PressureReport pressure_estimate(const Correspondence& corr, const SphereFunction& f,
                                 std::span<const ScheduleEntry> schedule, int start_points, std::uint64_t seed,
                                 const PressureOptions& options = {});

PressureReport entropy_estimate(const Correspondence& corr, std::span<const ScheduleEntry> schedule,
                                int start_points, std::uint64_t seed, const PressureOptions& options = {});

}  // namespace corrdyn
