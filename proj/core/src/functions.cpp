#include "corrdyn/functions.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "corrdyn/error.hpp"

namespace corrdyn {

SphereFunction::SphereFunction(std::string name, Fn fn, std::optional<double> constant_value)
    : name_(std::move(name)), fn_(std::move(fn)), constant_(constant_value) {}

SphereFunction SphereFunction::constant(double c) {
  if (c == 0.0) return SphereFunction("zero", [](const SpherePoint&) { return 0.0; }, 0.0);
  std::ostringstream name;
  name.precision(17);
  name << "const:" << c;
  return SphereFunction(name.str(), [c](const SpherePoint&) { return c; }, c);
}

SphereFunction SphereFunction::parse(std::string_view spec) {
  if (spec == "zero") return constant(0.0);
  if (spec.starts_with("const:")) {
    const std::string body(spec.substr(6));
    std::size_t used = 0;
    double c = 0.0;
    try {
      c = std::stod(body, &used);
    } catch (const std::logic_error&) {
      used = 0;
    }
    if (used == 0 || used != body.size() || !std::isfinite(c)) {
      throw Error(Errc::ParseError, "bad constant in function spec '" + std::string(spec) + "'");
    }
    SphereFunction f = constant(c);
    f.name_ = std::string(spec);
    return f;
  }
  if (spec == "re") {
    return SphereFunction("re", [](const SpherePoint& p) { return p.to_unit_vector()[0]; });
  }
  if (spec == "im") {
    return SphereFunction("im", [](const SpherePoint& p) { return p.to_unit_vector()[1]; });
  }
  if (spec == "log_abs") {
    return SphereFunction("log_abs", [](const SpherePoint& p) {
      if (p.is_infinity()) return 10.0;
      const double m = std::abs(p.chart_value());
      if (m == 0.0) return p.chart() == Chart::Direct ? -10.0 : 10.0;
      const double v = p.chart() == Chart::Direct ? std::log(m) : -std::log(m);
      return std::clamp(v, -10.0, 10.0);
    });
  }
  throw Error(Errc::ParseError, "unknown function '" + std::string(spec) + "'");
}

SphereFunction SphereFunction::tabulated(const SphereGrid& grid, std::vector<double> values, std::string name) {
  if (static_cast<int>(values.size()) != grid.size()) {
    throw Error(Errc::InvalidArgument, "table has " + std::to_string(values.size()) + " values for a grid of " +
                                           std::to_string(grid.size()) + " cells");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(Errc::InvalidArgument, "table values must be finite");
  }
  auto table = std::make_shared<const std::vector<double>>(std::move(values));
  return SphereFunction(std::move(name), [grid, table](const SpherePoint& p) { return (*table)[grid.cell_of(p)]; });
}

}  // namespace corrdyn
