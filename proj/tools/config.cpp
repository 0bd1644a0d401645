#include "config.hpp"

#include <fstream>

#include "corrdyn/error.hpp"

namespace corrdyn::cli {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& key, const std::string& what) {
  throw Error(Errc::ParseError, "config key '" + key + "': " + what);
}

template <class T>
void read(const json& obj, const char* key, T& target) {
  if (!obj.contains(key)) return;
  try {
    target = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    bad(key, e.what());
  }
}

SpherePoint parse_point(const json& v, const std::string& key) {
  if (v.is_string() && v.get<std::string>() == "inf") return SpherePoint::infinity();
  if (v.is_number()) return SpherePoint::from_complex(v.get<double>());
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return SpherePoint::from_complex({v[0].get<double>(), v[1].get<double>()});
  }
  bad(key, "expected [re, im], a number or \"inf\"");
}

void read_point(const json& obj, const char* key, SpherePoint& target) {
  if (obj.contains(key)) target = parse_point(obj.at(key), key);
}

StartRegion parse_region(const json& v) {
  StartRegion r;
  std::string kind = "circle";
  read(v, "kind", kind);
  if (kind == "circle") r.kind = StartRegion::Kind::Circle;
  else if (kind == "disk") r.kind = StartRegion::Kind::Disk;
  else bad("focus.kind", "expected circle or disk");
  std::vector<double> c{0.0, 0.0};
  read(v, "center", c);
  if (c.size() != 2) bad("focus.center", "expected [re, im]");
  r.center = {c[0], c[1]};
  read(v, "radius", r.radius);
  read(v, "count", r.count);
  return r;
}

json region_json(const StartRegion& r) {
  return {{"kind", r.kind == StartRegion::Kind::Circle ? "circle" : "disk"},
          {"center", {r.center.real(), r.center.imag()}},
          {"radius", r.radius},
          {"count", r.count}};
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) bad(key, what);
}

}  // namespace

json point_json(const SpherePoint& p) {
  if (p.is_infinity()) return "inf";
  const cplx z = p.to_complex();
  return {z.real(), z.imag()};
}

RunConfig parse_config(const json& doc, const std::filesystem::path& base) {
  if (!doc.is_object()) throw Error(Errc::ParseError, "config must be a JSON object");
  RunConfig cfg;
  std::string corr;
  read(doc, "correspondence", corr);
  require(!corr.empty(), "correspondence", "missing");
  cfg.correspondence = std::filesystem::path(corr).is_absolute() ? std::filesystem::path(corr) : base / corr;
  if (doc.contains("grid")) {
    read(doc["grid"], "bands", cfg.bands);
    read(doc["grid"], "sectors", cfg.sectors);
  }
  require(cfg.bands >= 1 && cfg.sectors >= 1, "grid", "bands and sectors must be >= 1");
  read(doc, "seed", cfg.seed);
  read(doc, "workers", cfg.workers);
  require(cfg.workers >= 1, "workers", "must be >= 1");
  if (doc.contains("function")) {
    const auto& f = doc["function"];
    if (f.is_string()) {
      cfg.function = f.get<std::string>();
    } else if (f.is_object() && f.contains("table")) {
      cfg.function = "table";
      read(f, "table", cfg.table);
      require(static_cast<int>(cfg.table.size()) == cfg.bands * cfg.sectors, "function.table",
              "needs one value per grid cell");
    } else {
      bad("function", "expected a built-in name or {\"table\": [...]}");
    }
  }

  if (doc.contains("orbits")) {
    const auto& o = doc["orbits"];
    read_point(o, "x0", cfg.orbits.x0);
    read(o, "n", cfg.orbits.n);
    read(o, "cap", cfg.orbits.cap);
    std::string dir = "forward";
    read(o, "direction", dir);
    require(dir == "forward" || dir == "backward", "orbits.direction", "expected forward or backward");
    cfg.orbits.backward = dir == "backward";
  }
  if (doc.contains("ds_measure")) {
    const auto& d = doc["ds_measure"];
    read_point(d, "x0", cfg.ds.x0);
    read(d, "n", cfg.ds.n);
    read(d, "cap", cfg.ds.cap);
    read(d, "threshold", cfg.ds.threshold);
    read(d, "bound", cfg.ds.bound);
    read(d, "invariance_samples", cfg.ds.invariance_samples);
    read(d, "path_length", cfg.ds.path_length);
    read(d, "path_cap", cfg.ds.path_cap);
    require(cfg.ds.bound > 0.0, "ds_measure.bound", "must be > 0");
  }
  if (doc.contains("pressure")) {
    const auto& p = doc["pressure"];
    if (p.contains("schedule")) {
      cfg.pressure.schedule.clear();
      for (const auto& row : p["schedule"]) {
        ScheduleEntry e;
        read(row, "n", e.n);
        read(row, "eps", e.eps);
        require(e.eps > 0.0, "pressure.schedule.eps", "must be > 0");
        cfg.pressure.schedule.push_back(e);
      }
    }
    read(p, "start_points", cfg.pressure.start_points);
    read(p, "cap", cfg.pressure.cap);
    if (p.contains("focus")) {
      for (const auto& r : p["focus"]) cfg.pressure.focus.push_back(parse_region(r));
    }
  }
  if (doc.contains("ruelle")) {
    const auto& r = doc["ruelle"];
    read(r, "active", cfg.ruelle.active);
    require(cfg.ruelle.active == "ds" || cfg.ruelle.active == "circle", "ruelle.active", "expected ds or circle");
    read(r, "tol", cfg.ruelle.tol);
    require(cfg.ruelle.tol > 0.0, "ruelle.tol", "must be > 0");
    read(r, "max_iter", cfg.ruelle.max_iter);
    read(r, "depth", cfg.ruelle.depth);
    read(r, "n_max", cfg.ruelle.n_max);
    read(r, "g", cfg.ruelle.g);
    read(r, "holder_k", cfg.ruelle.holder_k);
    read(r, "holder_lambda", cfg.ruelle.holder_lambda);
  }
  if (doc.contains("variational")) {
    const auto& v = doc["variational"];
    if (v.contains("pressure_report")) {
      const std::filesystem::path p = v["pressure_report"].get<std::string>();
      cfg.variational.pressure_report = p.is_absolute() ? p : base / p;
    }
    if (v.contains("partitions")) {
      cfg.variational.partitions.clear();
      for (const auto& q : v["partitions"]) {
        require(q.is_array() && q.size() == 2, "variational.partitions", "expected [band_step, sector_step]");
        cfg.variational.partitions.emplace_back(q[0].get<int>(), q[1].get<int>());
      }
    }
    read(v, "n_max", cfg.variational.n_max);
    read(v, "slack", cfg.variational.slack);
    read(v, "pushforward_tol", cfg.variational.pushforward_tol);
    if (v.contains("cases")) {
      for (const auto& c : v["cases"]) {
        CaseConfig cc;
        read(c, "label", cc.label);
        read(c, "type", cc.type);
        if (c.contains("points")) {
          for (const auto& p : c["points"]) cc.points.push_back(parse_point(p, "variational.cases.points"));
        }
        read(c, "symbols", cc.symbols);
        if (c.contains("circle")) cc.circle = parse_region(c["circle"]);
        read(c, "probabilities", cc.probabilities);
        if (cc.type == "cycle") {
          require(!cc.points.empty() && cc.points.size() == cc.symbols.size(), "variational.cases",
                  "a cycle needs matching points and symbols");
        } else if (cc.type == "circle_orbits") {
          require(cc.circle.count >= 1, "variational.cases.circle", "count must be >= 1");
        } else if (cc.type == "bernoulli") {
          require(cc.points.size() == 1 && !cc.probabilities.empty(), "variational.cases",
                  "bernoulli needs one fixed point and probabilities");
        } else {
          bad("variational.cases.type", "expected cycle, circle_orbits or bernoulli");
        }
        if (cc.label.empty()) cc.label = cc.type + "_" + std::to_string(cfg.variational.cases.size());
        cfg.variational.cases.push_back(std::move(cc));
      }
    }
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, "cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, path.string() + ": " + e.what());
  }
  RunConfig cfg = parse_config(doc, path.parent_path());
  cfg.source = path;
  return cfg;
}

json to_json(const RunConfig& cfg) {
  json j;
  j["correspondence"] = cfg.correspondence.string();
  j["grid"] = {{"bands", cfg.bands}, {"sectors", cfg.sectors}};
  j["seed"] = cfg.seed;
  j["workers"] = cfg.workers;
  if (cfg.function == "table") j["function"] = {{"table", cfg.table}};
  else j["function"] = cfg.function;
  j["orbits"] = {{"x0", point_json(cfg.orbits.x0)},
                 {"n", cfg.orbits.n},
                 {"cap", cfg.orbits.cap},
                 {"direction", cfg.orbits.backward ? "backward" : "forward"}};
  j["ds_measure"] = {{"x0", point_json(cfg.ds.x0)},
                     {"n", cfg.ds.n},
                     {"cap", cfg.ds.cap},
                     {"threshold", cfg.ds.threshold},
                     {"bound", cfg.ds.bound},
                     {"invariance_samples", cfg.ds.invariance_samples},
                     {"path_length", cfg.ds.path_length},
                     {"path_cap", cfg.ds.path_cap}};
  json schedule = json::array();
  for (const auto& e : cfg.pressure.schedule) schedule.push_back({{"n", e.n}, {"eps", e.eps}});
  json focus = json::array();
  for (const auto& r : cfg.pressure.focus) focus.push_back(region_json(r));
  j["pressure"] = {{"schedule", schedule},
                   {"start_points", cfg.pressure.start_points},
                   {"cap", cfg.pressure.cap},
                   {"focus", focus}};
  j["ruelle"] = {{"active", cfg.ruelle.active},       {"tol", cfg.ruelle.tol},
                 {"max_iter", cfg.ruelle.max_iter},   {"depth", cfg.ruelle.depth},
                 {"n_max", cfg.ruelle.n_max},         {"g", cfg.ruelle.g},
                 {"holder_k", cfg.ruelle.holder_k},   {"holder_lambda", cfg.ruelle.holder_lambda}};
  json parts = json::array();
  for (const auto& [b, s] : cfg.variational.partitions) parts.push_back({b, s});
  json cases = json::array();
  for (const auto& c : cfg.variational.cases) {
    json cj{{"label", c.label}, {"type", c.type}};
    if (!c.points.empty()) {
      json pts = json::array();
      for (const auto& p : c.points) pts.push_back(point_json(p));
      cj["points"] = pts;
    }
    if (!c.symbols.empty()) cj["symbols"] = c.symbols;
    if (c.type == "circle_orbits") cj["circle"] = region_json(c.circle);
    if (!c.probabilities.empty()) cj["probabilities"] = c.probabilities;
    cases.push_back(cj);
  }
  j["variational"] = {{"partitions", parts},
                      {"n_max", cfg.variational.n_max},
                      {"slack", cfg.variational.slack},
                      {"pushforward_tol", cfg.variational.pushforward_tol},
                      {"cases", cases}};
  if (cfg.variational.pressure_report) j["variational"]["pressure_report"] = cfg.variational.pressure_report->string();
  return j;
}

}  // namespace corrdyn::cli
