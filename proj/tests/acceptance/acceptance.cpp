// Acceptance suite: one line per criterion, non-zero exit when any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "corrdyn/correspondence.hpp"
#include "corrdyn/ds_measure.hpp"
#include "corrdyn/functions.hpp"
#include "corrdyn/measures.hpp"
#include "corrdyn/parallel.hpp"
#include "corrdyn/paths.hpp"
#include "corrdyn/pressure.hpp"
#include "corrdyn/ruelle.hpp"

using namespace corrdyn;

namespace {

const double kLog2 = std::log(2.0);
const SphereGrid kGrid(33, 64);
const int kWorkers = workers_from_env(static_cast<int>(std::max(1u, std::thread::hardware_concurrency())));

Correspondence load(const char* name) { return Correspondence::load(std::string(CORRDYN_DATA_DIR) + "/" + name); }

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

CellSet circle_band() {
  CellSet band;
  for (int s = 0; s < kGrid.n_sectors(); ++s) band.push_back(kGrid.index(kGrid.n_bands() / 2, s));
  return band;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Pressure settings shared by the entropy and variational criteria.
std::vector<ScheduleEntry> square_schedule() { return {{7, 0.05}, {8, 0.05}}; }
std::vector<ScheduleEntry> pair_schedule() { return {{4, 0.1}, {6, 0.05}, {8, 0.05}}; }

PressureOptions square_options() {
  PressureOptions o;
  o.workers = kWorkers;
  StartRegion circle;
  circle.count = 1 << 19;
  o.focus = {circle};
  return o;
}

PressureOptions plain_options() {
  PressureOptions o;
  o.workers = kWorkers;
  return o;
}

struct Pressures {
  double square_zero = 0.0;
  double pair_zero = 0.0;
} g_pressures;

// ---------------------------------------------------------------------------

Outcome degrees() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<std::tuple<const char*, int, int>> cases{
      {"mobius.corr", 1, 1}, {"z2.corr", 1, 2}, {"z3.corr", 1, 3}, {"z2_z3.corr", 2, 5}};
  for (const auto& [file, fwd, top] : cases) {
    const auto c = load(file);
    o.check(c.d_fwd() == fwd && c.d_top() == top,
            std::string(file) + " (" + std::to_string(c.d_fwd()) + "," + std::to_string(c.d_top()) + ")");
  }
  const double t = seconds_since(t0);
  o.check(t < 1.0, fmt("%.3fs", t));
  return o;
}

Outcome equidistribution() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto c = load("z2.corr");
  const auto a = pullback_iterate(c, kGrid, SpherePoint::from_complex({0.5, 0.3}), 12, 8192, 1);
  const auto b = pullback_iterate(c, kGrid, SpherePoint::from_complex({-2.0, 1.7}), 12, 8192, 2);
  const auto ring = annulus_cells(kGrid, 0.95, 1.05);
  const double ma = a.levels.back().mass_on(ring), mb = b.levels.back().mass_on(ring);
  const double d = measure_distance(a.levels.back(), b.levels.back());
  o.check(ma >= 0.99 && mb >= 0.99, fmt("mass near circle %.6f, %.6f", ma, mb));
  o.check(d <= 0.02, fmt("distance %.3g", d));
  const double t = seconds_since(t0);
  o.check(t < 10.0, fmt("%.2fs", t));
  return o;
}

Outcome entropy() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto sq = entropy_estimate(load("z2.corr"), square_schedule(), 200, 1, square_options());
  const auto pair = entropy_estimate(load("mobius_pair.corr"), pair_schedule(), 200, 1, plain_options());
  const auto rot = entropy_estimate(load("mobius.corr"), pair_schedule(), 200, 1, plain_options());
  g_pressures.square_zero = sq.pressure;
  g_pressures.pair_zero = pair.pressure;
  o.check(std::abs(sq.pressure - kLog2) <= 0.1, fmt("z^2 %.4f", sq.pressure));
  o.check(std::abs(pair.pressure - kLog2) <= 0.05, fmt("pair %.4f", pair.pressure));
  o.check(std::abs(rot.pressure) <= 1e-9, fmt("rotation %.3g", rot.pressure));
  const double t = seconds_since(t0);
  o.check(t < 60.0, fmt("%.1fs", t));
  return o;
}

Outcome shift_law() {
  Outcome o;
  const std::vector<std::pair<const char*, int>> cases{{"mobius_pair.corr", 200}, {"z2.corr", 4096}};
  for (const auto& [file, starts] : cases) {
    const auto c = load(file);
    const auto h = entropy_estimate(c, pair_schedule(), starts, 17, plain_options());
    const auto p = pressure_estimate(c, SphereFunction::constant(0.7), pair_schedule(), starts, 17, plain_options());
    const double err = std::abs(p.pressure - h.pressure - 0.7);
    o.check(err <= 1e-10, std::string(file) + fmt(" |Pr - h - 0.7| = %.2g", err));
  }
  return o;
}

Outcome ruelle_spectra() {
  Outcome o;
  const GridFunction zero(kGrid.n_sectors(), 0.0), shifted(kGrid.n_sectors(), 0.3);
  for (auto [file, degree] : {std::pair{"z2.corr", 2.0}, std::pair{"z3.corr", 3.0}}) {
    const auto t0 = std::chrono::steady_clock::now();
    const RuelleOperator op(load(file), kGrid, circle_band(), kWorkers);
    const auto s = power_iteration(op, zero, 1e-12, 100000, 1);
    const auto [lo, hi] = std::minmax_element(s.h.begin(), s.h.end());
    const double var = (*hi - *lo) / *hi;
    const auto sc = power_iteration(op, shifted, 1e-12, 100000, 1);
    const double shift_err = std::abs(sc.lambda - std::exp(0.3) * s.lambda);
    const double t = seconds_since(t0);
    o.check(std::abs(s.lambda - degree) <= 1e-6, std::string(file) + fmt(" Lambda %.12f", s.lambda));
    o.check(var <= 1e-6, fmt("h variation %.2g", var));
    o.check(shift_err <= 1e-8, fmt("shift error %.2g", shift_err));
    o.check(t < 10.0, fmt("%.2fs", t));
  }
  return o;
}

Outcome normalization() {
  Outcome o;
  const RuelleOperator op(load("z2.corr"), kGrid, circle_band(), kWorkers);
  for (const char* name : {"zero", "re"}) {
    const auto f = op.sample(SphereFunction::parse(name));
    const auto w = normalize(op, f, power_iteration(op, f, 1e-12, 100000, 1));
    double worst = 0.0;
    for (double s : w.sums) worst = std::max(worst, std::abs(s - 1.0));
    o.check(worst <= 1e-8, std::string(name) + fmt(" max |sum - 1| = %.2g", worst));
  }
  return o;
}

Outcome fixed_point() {
  Outcome o;
  const double tol = 1e-12;
  const RuelleOperator op(load("z2.corr"), kGrid, circle_band(), kWorkers);
  const GridFunction zero(op.size(), 0.0);
  const auto s = power_iteration(op, zero, tol, 100000, 1);
  const auto a = adjoint_fixed_point(op, normalize(op, zero, s), tol, 100000, 7);
  double tv = 0.0;
  for (double v : a.nu_active) tv += std::abs(v - 1.0 / op.size());
  tv *= 0.5;
  o.check(tv <= 0.02, fmt("TV to uniform %.2g", tv));
  o.check(a.start_spread <= 10 * tol, fmt("start spread %.2g", a.start_spread));
  const auto conv = convergence_check(op, zero, op.sample(SphereFunction::parse("re")), s, a.nu_active, 40);
  // Successive errors may only grow by rounding noise.
  bool monotone = true;
  for (std::size_t n = 1; n < conv.errors.size(); ++n) monotone &= conv.errors[n] <= conv.errors[n - 1] + 1e-14;
  o.check(monotone, "monotone decay");
  o.check(conv.errors.back() < 1e-6, fmt("e_40 = %.2g", conv.errors.back()));
  return o;
}

Outcome lifted_identity() {
  Outcome o;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const char* file : {"z2.corr", "z2_z3.corr"}) {
    const auto c = load(file);
    const RuelleOperator op(c, kGrid, circle_band(), kWorkers);
    std::vector<ForwardPath> pool;
    for (int i = 0; i < op.size(); ++i) {
      auto set = enumerate_forward_paths(c, kGrid.center(op.cells()[i]), 3, 64);
      for (auto& p : set.paths) pool.push_back(std::move(p));
    }
    std::vector<ForwardPath> paths;
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    for (int k = 0; k < 100; ++k) paths.push_back(pool[pick(rng)]);
    const auto f = op.sample(SphereFunction::parse("re"));
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      GridFunction g(op.size());
      for (double& v : g) v = u(rng);
      worst = std::max(worst, lifted_consistency_check(c, op, f, g, paths));
    }
    o.check(worst <= 1e-12, std::string(file) + fmt(" discrepancy %.2g over %g paths", worst, paths.size()));
  }
  return o;
}

Outcome pushforward_stationarity() {
  Outcome o;
  struct Run {
    const char* file;
    cplx x0;
    std::uint64_t seed;
  };
  const std::vector<Run> runs{{"z2.corr", std::polar(1.0, 1.0), 1},  {"z2.corr", std::polar(1.0, 2.5), 2},
                              {"z3.corr", std::polar(1.0, 0.3), 3},  {"z2_z3.corr", std::polar(1.0, 0.7), 4},
                              {"mobius_pair.corr", {0.2, 0.1}, 5}, {"mobius.corr", {0.6, 0.0}, 6}};
  int used = 0;
  for (const auto& r : runs) {
    const auto mu = empirical_invariant_measure(load(r.file), kGrid, SpherePoint::from_complex(r.x0), 100, 40000, 3,
                                                r.seed);
    const auto inv = check_shift_invariance(mu, 0.02);
    if (inv.defect > 0.02) continue;
    ++used;
    const double d = measure_distance(pushforward(mu, 0), pushforward(mu, 1));
    o.check(d <= 0.05, std::string(r.file) + fmt(" defect %.2g, distance %.2g", inv.defect, d));
  }
  o.check(used >= 3, std::to_string(used) + " invariant measures");
  return o;
}

Outcome intermediate_entropy_check() {
  Outcome o;
  const auto c = load("mobius_pair.corr");
  const std::vector<double> half{0.5, 0.5};
  const auto mu = PathMeasure::bernoulli(kGrid, kGrid.cell_of(SpherePoint::infinity()), half, 6);
  const std::vector<SpherePartition> qs{SpherePartition::blocks(kGrid, 1, 8), SpherePartition::blocks(kGrid, 3, 16)};
  const double h = intermediate_entropy(pushforward(mu, 0), mu, c, qs);
  const double rate = cylinder_entropy_rate(mu, 5);
  o.check(std::abs(h - kLog2) <= 0.05, fmt("h = %.6f", h));
  o.check(std::abs(h - rate) <= 0.02, fmt("cylinder rate %.6f", rate));
  return o;
}

// Candidate measures for the variational criterion.

PathMeasure cycle_measure(const std::vector<cplx>& pts, const std::vector<int>& syms, int length) {
  const std::size_t k = pts.size();
  std::vector<ForwardPath> paths;
  for (std::size_t i = 0; i < k; ++i) {
    ForwardPath p;
    for (int r = 0; r <= length; ++r) {
      const cplx z = pts[(i + r) % k];
      p.points.push_back(std::isinf(z.real()) ? SpherePoint::infinity() : SpherePoint::from_complex(z));
      if (r < length) {
        p.symbols.push_back(syms[(i + r) % k]);
        p.branches.push_back(1);
      }
    }
    paths.push_back(std::move(p));
  }
  return PathMeasure::from_paths(kGrid, std::move(paths), std::vector<double>(k, 1.0));
}

PathMeasure circle_measure(const Correspondence& c, int count, int length) {
  std::vector<ForwardPath> paths;
  for (int k = 0; k < count; ++k) {
    const auto z = std::polar(1.0, 2 * std::numbers::pi * (k + 0.5) / count);
    auto set = enumerate_forward_paths(c, SpherePoint::from_complex(z), length, 16, k);
    for (auto& p : set.paths) paths.push_back(std::move(p));
  }
  const std::size_t n = paths.size();
  return PathMeasure::from_paths(kGrid, std::move(paths), std::vector<double>(n, 1.0));
}

VariationalCase make_case(std::string label, PathMeasure mu) {
  SphereMeasure nu = pushforward(mu, 0);
  return {std::move(label), std::move(nu), {std::move(mu)}};
}

Outcome variational() {
  Outcome o;
  const int n_max = 4;
  const double inf = std::numeric_limits<double>::infinity();
  const std::vector<SpherePartition> qs{SpherePartition::blocks(kGrid, 1, 8), SpherePartition::blocks(kGrid, 3, 16)};
  EntropyOptions opts;
  opts.n_max = n_max;

  const auto sq = load("z2.corr");
  const double w3 = 2 * std::numbers::pi / 3, w7 = 2 * std::numbers::pi / 7;
  std::vector<VariationalCase> sq_cases;
  sq_cases.push_back(make_case("fixed_one", cycle_measure({1.0}, {1}, n_max)));
  sq_cases.push_back(make_case("fixed_zero", cycle_measure({0.0}, {1}, n_max)));
  sq_cases.push_back(make_case("fixed_inf", cycle_measure({{inf, 0.0}}, {1}, n_max)));
  sq_cases.push_back(make_case("period_two", cycle_measure({std::polar(1.0, w3), std::polar(1.0, 2 * w3)}, {1, 1}, n_max)));
  sq_cases.push_back(make_case(
      "period_three", cycle_measure({std::polar(1.0, w7), std::polar(1.0, 2 * w7), std::polar(1.0, 4 * w7)}, {1, 1, 1}, n_max)));
  sq_cases.push_back(make_case("circle_orbits", circle_measure(sq, 4096, n_max)));

  const auto pair = load("mobius_pair.corr");
  const int cell_inf = kGrid.cell_of(SpherePoint::infinity());
  const std::vector<double> half{0.5, 0.5}, skew{0.8, 0.2}, skew2{0.3, 0.7};
  std::vector<VariationalCase> pair_cases;
  pair_cases.push_back(make_case("bernoulli_half", PathMeasure::bernoulli(kGrid, cell_inf, half, n_max + 1)));
  pair_cases.push_back(make_case("bernoulli_skew", PathMeasure::bernoulli(kGrid, cell_inf, skew, n_max + 1)));
  pair_cases.push_back(make_case("bernoulli_skew2", PathMeasure::bernoulli(kGrid, cell_inf, skew2, n_max + 1)));
  pair_cases.push_back(make_case("fixed_zero", cycle_measure({0.0}, {2}, n_max)));
  pair_cases.push_back(make_case("fixed_inf_1", cycle_measure({{inf, 0.0}}, {1}, n_max)));
  pair_cases.push_back(make_case("fixed_inf_2", cycle_measure({{inf, 0.0}}, {2}, n_max)));

  const auto re = SphereFunction::parse("re");
  const double sq_re = pressure_estimate(sq, re, square_schedule(), 200, 1, square_options()).pressure;
  const double pair_re = pressure_estimate(pair, re, pair_schedule(), 200, 1, plain_options()).pressure;

  struct Run {
    const char* name;
    const Correspondence* corr;
    const std::vector<VariationalCase>* cases;
    SphereFunction f;
    double pressure;
  };
  const std::vector<Run> runs{{"z^2 f=0", &sq, &sq_cases, SphereFunction::constant(0.0), g_pressures.square_zero},
                              {"z^2 f=Re", &sq, &sq_cases, re, sq_re},
                              {"pair f=0", &pair, &pair_cases, SphereFunction::constant(0.0), g_pressures.pair_zero},
                              {"pair f=Re", &pair, &pair_cases, re, pair_re}};
  for (const auto& r : runs) {
    const auto rep = variational_check(*r.corr, r.f, *r.cases, qs, r.pressure, 0.05, opts);
    double worst = -inf;
    for (const auto& row : rep.rows) worst = std::max(worst, row.value - r.pressure);
    o.check(rep.all_within_bound && rep.rows.size() >= 5,
            std::string(r.name) + fmt(": Pr %.4f, max(value - Pr) %.4f", r.pressure, worst));
    if (std::string(r.name) == "pair f=0") {
      const double gap = r.pressure - rep.rows[0].value;
      o.check(gap <= 0.05, fmt("Bernoulli gap %.4f", gap));
    }
  }
  return o;
}

Outcome properties() {
  Outcome o;
  std::mt19937_64 rng(99);
  std::normal_distribution<double> g(0.0, 2.0);
  std::uniform_int_distribution<int> sym(1, 2);
  auto point = [&] {
    const double pick = std::uniform_real_distribution<double>(0, 1)(rng);
    if (pick < 0.02) return SpherePoint::infinity();
    return SpherePoint::from_complex({g(rng), g(rng)});
  };
  int metric_failures = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto x = point(), y = point(), z = point();
    const double xy = sph_dist(x, y), yz = sph_dist(y, z), xz = sph_dist(x, z);
    if (sph_dist(x, x) != 0.0 || xy < 0.0 || xy > 2.0 || std::abs(xy - sph_dist(y, x)) > 1e-15 || xz > xy + yz + 1e-14)
      ++metric_failures;
  }
  o.check(metric_failures == 0, std::to_string(metric_failures) + " sphere metric failures");

  auto path = [&](int n) {
    ForwardPath p;
    for (int r = 0; r <= n; ++r) p.points.push_back(point());
    for (int r = 0; r < n; ++r) {
      p.symbols.push_back(sym(rng));
      p.branches.push_back(1);
    }
    return p;
  };
  int path_failures = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto p = path(5), q = path(5), r = path(5);
    const double pq = path_metric(p, q), qr = path_metric(q, r), pr = path_metric(p, r);
    if (path_metric(p, p) != 0.0 || pq < 0.0 || pq != path_metric(q, p) || pr > pq + qr + 1e-14) ++path_failures;
  }
  o.check(path_failures == 0, std::to_string(path_failures) + " path metric failures");

  int join_failures = 0;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::vector<SpherePartition> parts{SpherePartition::trivial(kGrid), SpherePartition::blocks(kGrid, 3, 16),
                                           SpherePartition::blocks(kGrid, 11, 4), SpherePartition::blocks(kGrid, 1, 8)};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> w(kGrid.size());
    double total = 0.0;
    for (double& v : w) total += (v = u(rng) < 0.3 ? u(rng) : 0.0);
    for (double& v : w) v /= total;
    const SphereMeasure nu(kGrid, w);
    for (const auto& a : parts) {
      for (const auto& b : parts) {
        const double hj = partition_entropy(nu, join(a, b));
        if (hj + 1e-12 < partition_entropy(nu, a) || hj + 1e-12 < partition_entropy(nu, b)) ++join_failures;
      }
    }
    std::map<Word, double> cyl;
    for (int k = 0; k < 40; ++k) {
      Word word;
      for (int r = 0; r < 3; ++r) word.emplace_back(static_cast<int>(u(rng) * kGrid.size()), sym(rng));
      cyl[word] += u(rng);
    }
    const auto mu = PathMeasure::from_cylinders(kGrid, 3, cyl);
    const auto l0 = lifted_partition(parts[1], 2), l1 = shifted_lift(parts[2], 2, 1);
    const double hj = partition_entropy(mu, join(l0, l1));
    if (hj + 1e-12 < partition_entropy(mu, l0) || hj + 1e-12 < partition_entropy(mu, l1)) ++join_failures;
  }
  o.check(join_failures == 0, std::to_string(join_failures) + " join monotonicity failures");

  std::vector<double> masses;
  const auto sq = load("z2.corr");
  for (const auto& l : pullback_iterate(sq, kGrid, SpherePoint::from_complex({0.4, 0.2}), 10, 4096, 3).levels)
    masses.push_back(l.mass());
  const auto emp = empirical_invariant_measure(sq, kGrid, SpherePoint::from_complex(std::polar(1.0, 0.4)), 10, 5000, 3, 1);
  masses.push_back(emp.mass());
  for (int r = 0; r < 3; ++r) masses.push_back(pushforward(emp, r).mass());
  const auto pair_paths = enumerate_forward_paths(load("mobius_pair.corr"), SpherePoint::from_complex(0.3), 6, 1024);
  std::vector<double> pw(pair_paths.paths.size());
  for (double& v : pw) v = u(rng);
  const auto pm = PathMeasure::from_paths(kGrid, pair_paths.paths, pw);
  masses.push_back(pm.mass());
  masses.push_back(pm.to_cylinders(4).mass());
  for (int r = 0; r <= 6; ++r) masses.push_back(pushforward(pm, r).mass());
  const RuelleOperator op(sq, kGrid, circle_band(), kWorkers);
  const GridFunction f = op.sample(SphereFunction::parse("re"));
  const auto adj = adjoint_fixed_point(op, normalize(op, f, power_iteration(op, f, 1e-12, 100000, 1)), 1e-12, 100000, 2, 2);
  masses.push_back(adj.nu.mass());
  masses.push_back(adj.mu0.mass());
  int mass_failures = 0;
  for (double m : masses) mass_failures += std::abs(m - 1.0) > 1e-10;
  o.check(mass_failures == 0, std::to_string(mass_failures) + " mass failures over " + std::to_string(masses.size()) + " measures");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"degrees", degrees},
      {"equidistribution", equidistribution},
      {"entropy", entropy},
      {"pressure shift law", shift_law},
      {"ruelle spectra", ruelle_spectra},
      {"normalization", normalization},
      {"fixed-point measure", fixed_point},
      {"lifted operator identity", lifted_identity},
      {"push-forward stationarity", pushforward_stationarity},
      {"intermediate entropy", intermediate_entropy_check},
      {"variational inequality", variational},
      {"metric and partition properties", properties},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::printf("%s %2zu %-32s %7.2fs  %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, seconds_since(t0),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
