#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "corrdyn/grid.hpp"
#include "corrdyn/pressure.hpp"
#include "corrdyn/sphere.hpp"

namespace corrdyn::cli {

struct OrbitsConfig {
  SpherePoint x0 = SpherePoint::from_complex({0.5, 0.3});
  int n = 4;
  std::size_t cap = 4096;
  bool backward = false;
};

struct DsConfig {
  SpherePoint x0 = SpherePoint::from_complex({0.5, 0.3});
  int n = 12;
  std::size_t cap = 8192;
  double threshold = 0.5;
  double bound = 0.02;
  int invariance_samples = 1000;
  int path_length = 10;
  std::size_t path_cap = 64;
};

struct PressureConfig {
  std::vector<ScheduleEntry> schedule{{4, 0.1}, {6, 0.05}, {8, 0.05}};
  int start_points = 200;
  std::size_t cap = 1 << 16;
  std::vector<StartRegion> focus;
};

struct RuelleConfig {
  /// "ds" uses the pullback support core, "circle" the middle band (odd band count).
  std::string active = "ds";
  double tol = 1e-12;
  int max_iter = 100000;
  int depth = 1;
  int n_max = 40;
  std::string g = "re";
  int holder_k = 8;
  double holder_lambda = 2.0;
};

/// One test measure for the variational check. ν is always the push-forward
/// of the candidate path measure at coordinate 0.
struct CaseConfig {
  std::string label;
  /// "cycle", "circle_orbits" or "bernoulli".
  std::string type;
  std::vector<SpherePoint> points;
  std::vector<int> symbols;
  StartRegion circle;
  std::vector<double> probabilities;
};

struct VariationalConfig {
  std::optional<std::filesystem::path> pressure_report;
  std::vector<std::pair<int, int>> partitions{{1, 8}, {3, 16}};
  int n_max = 4;
  double slack = 0.05;
  double pushforward_tol = 1e-6;
  std::vector<CaseConfig> cases;
};

struct RunConfig {
  std::filesystem::path source;
  std::filesystem::path correspondence;
  int bands = 33;
  int sectors = 64;
  std::uint64_t seed = 1;
  int workers = 1;
  /// Built-in name, or "table" with `table` holding one value per grid cell.
  std::string function = "zero";
  std::vector<double> table;
  OrbitsConfig orbits;
  DsConfig ds;
  PressureConfig pressure;
  RuelleConfig ruelle;
  VariationalConfig variational;

  SphereGrid grid() const { return SphereGrid(bands, sectors); }
};

/// Parses a config document; relative paths resolve against `base`. Missing
/// keys take the defaults above. Throws Error(ParseError) on bad input.
RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base);
RunConfig load_config(const std::filesystem::path& path);

/// The effective configuration, defaults included.
nlohmann::json to_json(const RunConfig& cfg);

nlohmann::json point_json(const SpherePoint& p);

}  // namespace corrdyn::cli
