#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>

#include "CLI11.hpp"
#include "corrdyn/ds_measure.hpp"
#include "corrdyn/functions.hpp"
#include "corrdyn/parallel.hpp"
#include "corrdyn/paths.hpp"
#include "corrdyn/pressure.hpp"
#include "corrdyn/ruelle.hpp"

namespace corrdyn::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string num(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string point_cols(const SpherePoint& p) {
  if (p.is_infinity()) return "inf,0";
  const cplx z = p.to_complex();
  return num(z.real()) + "," + num(z.imag());
}

class Csv {
 public:
  Csv(const fs::path& path, const std::string& header) : out_(path) {
    if (!out_) throw Error(Errc::InvalidArgument, "cannot write " + path.string());
    out_ << header << '\n';
  }
  Csv& operator<<(const std::string& line) {
    out_ << line << '\n';
    return *this;
  }

 private:
  std::ofstream out_;
};

SphereFunction make_function(const RunConfig& cfg) {
  if (cfg.function == "table") return SphereFunction::tabulated(cfg.grid(), cfg.table);
  return SphereFunction::parse(cfg.function);
}

struct Context {
  RunConfig cfg;
  Correspondence corr;
  fs::path out;
  json results = json::object();
  std::ostream& log;
};

json degrees_json(const Correspondence& corr) {
  json comps = json::array();
  for (const auto& c : corr.degrees().components) {
    comps.push_back({{"lambda", c.lambda}, {"delta", c.delta}, {"multiplicity", c.multiplicity}});
  }
  return {{"components", corr.size()}, {"d_fwd", corr.d_fwd()}, {"d_top", corr.d_top()}, {"per_component", comps}};
}

void cmd_degrees(Context& ctx) {
  ctx.results = degrees_json(ctx.corr);
  Csv csv(ctx.out / "degrees.csv", "component,lambda,delta,multiplicity");
  int t = 1;
  for (const auto& c : ctx.corr.degrees().components) {
    csv << std::to_string(t++) + "," + std::to_string(c.lambda) + "," + std::to_string(c.delta) + "," +
               std::to_string(c.multiplicity);
  }
  ctx.log << "M=" << ctx.corr.size() << " d_fwd=" << ctx.corr.d_fwd() << " d_top=" << ctx.corr.d_top() << '\n';
}

void cmd_orbits(Context& ctx) {
  const auto& o = ctx.cfg.orbits;
  Csv csv(ctx.out / "paths.csv", "path,r,re,im,symbol,branch");
  std::size_t count = 0;
  bool truncated = false;
  bool degenerate = false;
  if (o.backward) {
    const auto set = enumerate_backward_paths(ctx.corr, o.x0, o.n, o.cap, ctx.cfg.seed);
    for (std::size_t i = 0; i < set.paths.size(); ++i) {
      const auto& p = set.paths[i];
      for (int r = 0; r <= p.length(); ++r) {
        const std::string sym = r < p.length() ? std::to_string(p.symbols[r]) : "";
        const std::string br = r < p.length() ? std::to_string(p.branches[r]) : "";
        csv << std::to_string(i) + "," + std::to_string(r) + "," + point_cols(p.points[r]) + "," + sym + "," + br;
      }
    }
    count = set.paths.size();
    truncated = set.truncated;
    degenerate = set.degenerate;
  } else {
    const auto set = enumerate_forward_paths(ctx.corr, o.x0, o.n, o.cap, ctx.cfg.seed);
    for (std::size_t i = 0; i < set.paths.size(); ++i) {
      const auto& p = set.paths[i];
      for (int r = 0; r <= p.length(); ++r) {
        const std::string sym = r > 0 ? std::to_string(p.symbols[r - 1]) : "";
        const std::string br = r > 0 ? std::to_string(p.branches[r - 1]) : "";
        csv << std::to_string(i) + "," + std::to_string(r) + "," + point_cols(p.points[r]) + "," + sym + "," + br;
      }
    }
    count = set.paths.size();
    truncated = set.truncated;
    degenerate = set.degenerate;
  }
  ctx.results = {{"paths", count}, {"truncated", truncated}, {"degenerate", degenerate}};
  ctx.log << count << " paths" << (truncated ? " (truncated)" : "") << '\n';
}

struct DsRun {
  PullbackResult pullback;
  DsSupport support;
};

DsRun run_ds(const Context& ctx) {
  const auto& d = ctx.cfg.ds;
  DsRun r;
  r.pullback = pullback_iterate(ctx.corr, ctx.cfg.grid(), d.x0, d.n, d.cap, ctx.cfg.seed);
  r.support = ds_support(r.pullback.levels, d.threshold, d.bound);
  return r;
}

void cmd_ds_measure(Context& ctx) {
  const auto grid = ctx.cfg.grid();
  const auto ds = run_ds(ctx);
  {
    Csv csv(ctx.out / "levels.csv", "level,cell,weight");
    for (std::size_t k = 0; k < ds.pullback.levels.size(); ++k) {
      const auto& w = ds.pullback.levels[k].weights();
      for (int c = 0; c < grid.size(); ++c) {
        if (w[c] > 0.0) csv << std::to_string(k) + "," + std::to_string(c) + "," + num(w[c]);
      }
    }
  }
  {
    Csv csv(ctx.out / "support.csv", "cell,band,sector,core");
    for (int c : ds.support.cells) {
      const auto [b, s] = grid.band_sector(c);
      csv << std::to_string(c) + "," + std::to_string(b) + "," + std::to_string(s) + "," +
                 (contains(ds.support.core, c) ? "1" : "0");
    }
  }
  const auto inv = check_backward_invariance(ctx.corr, grid, ds.support.core, ctx.cfg.ds.invariance_samples,
                                             ctx.cfg.seed);
  // Start the invariant-path search at the heaviest core cell.
  const auto& last = ds.pullback.levels.back();
  int best = ds.support.core.front();
  for (int c : ds.support.core) {
    if (last.weight(c) > last.weight(best)) best = c;
  }
  const auto paths = invariant_forward_paths(ctx.corr, grid, ds.support.core, grid.center(best),
                                             ctx.cfg.ds.path_length, ctx.cfg.ds.path_cap);
  json gaps = json::array();
  for (std::size_t k = 1; k < ds.pullback.levels.size(); ++k) {
    gaps.push_back(measure_distance(ds.pullback.levels[k - 1], ds.pullback.levels[k]));
  }
  ctx.results = {{"start", point_json(ds.pullback.start)},
                 {"resamples", ds.pullback.resamples},
                 {"thinned", ds.pullback.thinned},
                 {"level_gaps", gaps},
                 {"certificate", ds.support.certificate},
                 {"core_cells", ds.support.core.size()},
                 {"support_cells", ds.support.cells.size()},
                 {"backward_invariance",
                  {{"samples", inv.samples}, {"violation_fraction", inv.violation_fraction}, {"passed", inv.passed}}},
                 {"invariant_paths", {{"found", paths.paths.size()}, {"none_found", paths.none_found}}}};
  ctx.log << "support " << ds.support.core.size() << " core cells, certificate " << ds.support.certificate << '\n';
}

json pressure_json(const PressureReport& r) {
  return {{"function", r.function},         {"pressure", r.pressure},
          {"spanning_pressure", r.spanning_pressure}, {"pressure_last", r.pressure_last},
          {"start_points", r.start_points}, {"truncated", r.truncated},
          {"degenerate", r.degenerate},     {"seed", r.seed}};
}

PressureReport run_pressure(const Context& ctx, const SphereFunction& f) {
  PressureOptions opts;
  opts.cap = ctx.cfg.pressure.cap;
  opts.focus = ctx.cfg.pressure.focus;
  opts.workers = ctx.cfg.workers;
  return pressure_estimate(ctx.corr, f, ctx.cfg.pressure.schedule, ctx.cfg.pressure.start_points, ctx.cfg.seed, opts);
}

void write_pressure(Context& ctx, const PressureReport& r) {
  Csv csv(ctx.out / "pressure.csv", "n,eps,sep_log_sum,span_log_sum,sep_rate,span_rate,paths,separated,spanning,truncated");
  for (const auto& row : r.rows) {
    csv << std::to_string(row.n) + "," + num(row.eps) + "," + num(row.sep_log_sum) + "," + num(row.span_log_sum) + "," +
               num(row.sep_rate) + "," + num(row.span_rate) + "," + std::to_string(row.paths) + "," +
               std::to_string(row.separated) + "," + std::to_string(row.spanning) + "," + (row.truncated ? "1" : "0");
  }
  ctx.results = pressure_json(r);
  ctx.log << "pressure(" << r.function << ") = " << num(r.pressure) << '\n';
}

void cmd_entropy(Context& ctx) { write_pressure(ctx, run_pressure(ctx, SphereFunction::constant(0.0))); }

void cmd_pressure(Context& ctx) { write_pressure(ctx, run_pressure(ctx, make_function(ctx.cfg))); }

CellSet active_cells(const Context& ctx) {
  const auto grid = ctx.cfg.grid();
  if (ctx.cfg.ruelle.active == "circle") {
    if (grid.n_bands() % 2 == 0) throw Error(Errc::InvalidArgument, "circle support needs an odd number of bands");
    CellSet band;
    for (int s = 0; s < grid.n_sectors(); ++s) band.push_back(grid.index(grid.n_bands() / 2, s));
    return band;
  }
  return run_ds(ctx).support.core;
}

void cmd_ruelle(Context& ctx) {
  const auto grid = ctx.cfg.grid();
  const auto& rc = ctx.cfg.ruelle;
  const auto cells = active_cells(ctx);
  RuelleOperator op(ctx.corr, grid, cells, ctx.cfg.workers);
  const auto f = op.sample(make_function(ctx.cfg));
  const auto g = op.sample(SphereFunction::parse(rc.g));

  std::vector<std::pair<SpherePoint, SpherePoint>> pairs;
  for (int i = 0; i < op.size(); ++i) {
    for (int c : grid.ring(op.cells()[i])) {
      if (c != op.cells()[i] && op.active_index(c) >= 0) pairs.emplace_back(grid.center(op.cells()[i]), grid.center(c));
    }
  }
  json expansivity;
  try {
    const auto e = expansivity_probe(ctx.corr, pairs, static_cast<int>(pairs.size()));
    expansivity = {{"is_expansive", e.is_expansive}, {"lambda_estimate", e.lambda_estimate}, {"pairs", e.pairs_used}};
    if (!e.is_expansive) ctx.log << "warning: expansivity probe rejects this support\n";
  } catch (const Error& e) {
    expansivity = {{"error", e.what()}};
    ctx.log << "warning: " << e.what() << '\n';
  }

  const auto spec = power_iteration(op, f, rc.tol, rc.max_iter, ctx.cfg.seed);
  const auto weights = normalize(op, f, spec);
  const auto adj = adjoint_fixed_point(op, weights, rc.tol, rc.max_iter, ctx.cfg.seed + 1, rc.depth);
  const auto conv = convergence_check(op, f, g, spec, adj.nu_active, rc.n_max);
  const auto holder = holder_norm(op, f, rc.holder_lambda, rc.holder_k);
  const auto shift = check_shift_invariance(adj.mu0, 10.0 * rc.tol);

  std::vector<ForwardPath> paths;
  for (int i = 0; i < op.size() && paths.size() < 100; ++i) {
    const auto found = invariant_forward_paths(ctx.corr, grid, op.cells(), grid.center(op.cells()[i]), 2, 1);
    paths.insert(paths.end(), found.paths.begin(), found.paths.end());
  }
  const double lifted = lifted_consistency_check(ctx.corr, op, f, g, paths);

  double worst_sum = 0.0;
  for (double s : weights.sums) worst_sum = std::max(worst_sum, std::abs(s - 1.0));
  {
    Csv csv(ctx.out / "eigen.csv", "cell,band,sector,f,h,nu,weight_sum");
    for (int i = 0; i < op.size(); ++i) {
      const auto [b, s] = grid.band_sector(op.cells()[i]);
      csv << std::to_string(op.cells()[i]) + "," + std::to_string(b) + "," + std::to_string(s) + "," + num(f[i]) + "," +
                 num(spec.h[i]) + "," + num(adj.nu_active[i]) + "," + num(weights.sums[i]);
    }
  }
  {
    Csv csv(ctx.out / "convergence.csv", "n,error");
    for (std::size_t n = 0; n < conv.errors.size(); ++n) csv << std::to_string(n + 1) + "," + num(conv.errors[n]);
  }
  ctx.results = {{"function", make_function(ctx.cfg).name()},
                 {"active_cells", op.size()},
                 {"lambda", spec.lambda},
                 {"log_lambda", std::log(spec.lambda)},
                 {"iterations", spec.iterations},
                 {"residual", spec.residual},
                 {"gap_estimate", spec.gap_estimate},
                 {"max_weight_sum_deviation", worst_sum},
                 {"adjoint", {{"iterations", adj.iterations}, {"residual", adj.residual},
                              {"start_spread", adj.start_spread}, {"non_unique", adj.non_unique},
                              {"shift_defect", shift.defect}}},
                 {"convergence", {{"g", rc.g}, {"c", conv.c}, {"final_error", conv.errors.back()},
                                  {"decay_rate", conv.decay_rate}}},
                 {"holder", {{"lambda", holder.lambda}, {"alpha", holder.alpha}, {"omega", holder.omega},
                             {"sup_norm", holder.sup_norm}, {"alpha_norm", holder.alpha_norm},
                             {"member", holder.member}}},
                 {"lifted_discrepancy", lifted},
                 {"expansivity", expansivity}};
  ctx.log << "Lambda = " << num(spec.lambda) << " after " << spec.iterations << " iterations\n";
}

void cmd_variational(Context& ctx) {
  const auto grid = ctx.cfg.grid();
  const auto& vc = ctx.cfg.variational;
  const auto f = make_function(ctx.cfg);
  double pressure = 0.0;
  std::string source;
  if (vc.pressure_report) {
    std::ifstream in(*vc.pressure_report);
    if (!in) throw Error(Errc::ParseError, "cannot open pressure report " + vc.pressure_report->string());
    json rep;
    try {
      rep = json::parse(in);
      const auto fn = rep.at("results").at("function").get<std::string>();
      if (fn != f.name()) {
        throw Error(Errc::ConfigMismatch, "pressure report was computed for f = " + fn + ", this run uses f = " + f.name());
      }
      pressure = rep.at("results").at("pressure").get<double>();
    } catch (const json::exception& e) {
      throw Error(Errc::ParseError, vc.pressure_report->string() + ": " + e.what());
    }
    source = vc.pressure_report->string();
  } else {
    pressure = run_pressure(ctx, f).pressure;
    source = "computed";
  }
  std::vector<SpherePartition> partitions;
  for (const auto& [b, s] : vc.partitions) partitions.push_back(SpherePartition::blocks(grid, b, s));
  std::vector<VariationalCase> cases;
  for (const auto& c : vc.cases) cases.push_back(build_case(ctx.corr, grid, c, vc.n_max));
  if (cases.empty()) throw Error(Errc::NoValidCandidates, "no variational cases configured");
  EntropyOptions opts;
  opts.n_max = vc.n_max;
  opts.pushforward_tol = vc.pushforward_tol;
  const auto rep = variational_check(ctx.corr, f, cases, partitions, pressure, vc.slack, opts);
  Csv csv(ctx.out / "variational.csv", "label,entropy,integral,value,pressure,within_bound");
  json rows = json::array();
  for (const auto& r : rep.rows) {
    csv << r.label + "," + num(r.entropy) + "," + num(r.integral) + "," + num(r.value) + "," + num(pressure) + "," +
               (r.within_bound ? "1" : "0");
    rows.push_back({{"label", r.label}, {"entropy", r.entropy}, {"integral", r.integral}, {"value", r.value},
                    {"within_bound", r.within_bound}});
  }
  ctx.results = {{"function", f.name()},  {"pressure", pressure},           {"pressure_source", source},
                 {"slack", vc.slack},     {"best_value", rep.best_value},   {"gap", rep.gap},
                 {"all_within_bound", rep.all_within_bound}, {"rows", rows}};
  ctx.log << "variational gap " << num(rep.gap) << (rep.all_within_bound ? "" : " (bound violated)") << '\n';
}

}  // namespace

int exit_code(Errc code) noexcept { return 10 + static_cast<int>(code); }

VariationalCase build_case(const Correspondence& corr, const SphereGrid& grid, const CaseConfig& c, int length) {
  PathMeasure mu;
  if (c.type == "bernoulli") {
    mu = PathMeasure::bernoulli(grid, grid.cell_of(c.points.front()), c.probabilities, length);
  } else if (c.type == "cycle") {
    const std::size_t k = c.points.size();
    std::vector<ForwardPath> paths;
    for (std::size_t i = 0; i < k; ++i) {
      ForwardPath p;
      for (int r = 0; r <= length; ++r) {
        p.points.push_back(c.points[(i + r) % k]);
        if (r < length) {
          p.symbols.push_back(c.symbols[(i + r) % k]);
          p.branches.push_back(1);
        }
      }
      paths.push_back(std::move(p));
    }
    mu = PathMeasure::from_paths(grid, std::move(paths), std::vector<double>(k, 1.0));
  } else {
    std::vector<ForwardPath> paths;
    std::vector<double> weights;
    const int count = c.circle.count;
    for (int k = 0; k < count; ++k) {
      const cplx z = c.circle.center + std::polar(c.circle.radius, 2.0 * std::numbers::pi * (k + 0.5) / count);
      auto set = enumerate_forward_paths(corr, SpherePoint::from_complex(z), length, 4096, k);
      for (auto& p : set.paths) {
        weights.push_back(1.0 / static_cast<double>(set.paths.size()));
        paths.push_back(std::move(p));
      }
    }
    mu = PathMeasure::from_paths(grid, std::move(paths), std::move(weights));
  }
  VariationalCase out{c.label, pushforward(mu, 0), {mu}};
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<char*> argv;
  std::vector<std::string> copy = args;
  for (auto& a : copy) argv.push_back(a.data());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"corrdyn: dynamics of holomorphic correspondences"};
  std::string command;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "corrdyn_out";
  app.add_option("command", command, "degrees | orbits | ds-measure | entropy | pressure | ruelle | variational")
      ->required()
      ->check(CLI::IsMember({"degrees", "orbits", "ds-measure", "entropy", "pressure", "ruelle", "variational"}));
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--seed", seed, "override the configured seed");
  app.add_option("--out", out_dir, "output directory");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : kExitUsage;
  }

  try {
    const auto t0 = std::chrono::steady_clock::now();
    RunConfig cfg = load_config(config_path);
    if (seed) cfg.seed = *seed;
    cfg.workers = workers_from_env(cfg.workers);
    Context ctx{cfg, Correspondence::load(cfg.correspondence), out_dir, json::object(), out};
    const auto t1 = std::chrono::steady_clock::now();
    fs::create_directories(ctx.out);
    if (command == "degrees") cmd_degrees(ctx);
    else if (command == "orbits") cmd_orbits(ctx);
    else if (command == "ds-measure") cmd_ds_measure(ctx);
    else if (command == "entropy") cmd_entropy(ctx);
    else if (command == "pressure") cmd_pressure(ctx);
    else if (command == "ruelle") cmd_ruelle(ctx);
    else cmd_variational(ctx);
    const auto t2 = std::chrono::steady_clock::now();
    json report{{"command", command},
                {"version", CORRDYN_VERSION},
                {"config", to_json(cfg)},
                {"results", ctx.results},
                {"timings", {{"load_seconds", std::chrono::duration<double>(t1 - t0).count()},
                             {"run_seconds", std::chrono::duration<double>(t2 - t1).count()}}}};
    std::ofstream(ctx.out / "report.json") << report.dump(2) << '\n';
    return 0;
  } catch (const Error& e) {
    err << "corrdyn: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << "corrdyn: " << e.what() << '\n';
    return kExitUnexpected;
  }
}

}  // namespace corrdyn::cli
