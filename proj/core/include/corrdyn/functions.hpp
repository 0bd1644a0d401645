#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "corrdyn/grid.hpp"
#include "corrdyn/sphere.hpp"

namespace corrdyn {

/// A real-valued continuous function on the sphere, tagged with the name it
/// was built from so reports can echo it.
///
/// Built-ins accepted by parse():
///   zero          f = 0
///   const:c       f = c
///   re            f = 2 Re z / (1 + |z|^2), the x-coordinate of the sphere embedding
///   im            f = 2 Im z / (1 + |z|^2)
///   log_abs       f = log |z| clamped to [-10, 10]
class SphereFunction {
 public:
  using Fn = std::function<double(const SpherePoint&)>;

  SphereFunction() : SphereFunction(constant(0.0)) {}
  SphereFunction(std::string name, Fn fn, std::optional<double> constant_value = std::nullopt);

  static SphereFunction parse(std::string_view spec);
  static SphereFunction constant(double c);
  /// Piecewise constant on grid cells.
  static SphereFunction tabulated(const SphereGrid& grid, std::vector<double> values, std::string name = "table");

  double operator()(const SpherePoint& p) const { return fn_(p); }
  const std::string& name() const noexcept { return name_; }
  /// Set for constant functions; lets callers keep shift identities exact.
  std::optional<double> constant_value() const noexcept { return constant_; }

 private:
  std::string name_;
  Fn fn_;
  std::optional<double> constant_;
};

}  // namespace corrdyn
