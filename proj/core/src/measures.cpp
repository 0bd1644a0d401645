#include "corrdyn/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "corrdyn/error.hpp"

namespace corrdyn {
namespace {

double shannon(const auto& masses) {
  double h = 0.0;
  for (const auto& [key, m] : masses) {
    if (m > 0.0) h -= m * std::log(m);
  }
  return h;
}

void require_same_grid(const SphereGrid& a, const SphereGrid& b) {
  if (!(a == b)) throw Error(Errc::InvalidArgument, "measures live on different grids");
}

}  // namespace

SphereMeasure::SphereMeasure(SphereGrid grid, std::vector<double> weights, std::string provenance)
    : grid_(grid), weights_(std::move(weights)), provenance_(std::move(provenance)) {
  if (static_cast<int>(weights_.size()) != grid_.size()) {
    throw Error(Errc::InvalidArgument, "weight vector does not match the grid");
  }
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw Error(Errc::InvalidArgument, "weights must be finite and >= 0");
  }
  if (std::abs(mass() - 1.0) > 1e-9) {
    throw Error(Errc::InvalidArgument, "total mass " + std::to_string(mass()) + " is not 1");
  }
}

SphereMeasure SphereMeasure::dirac(const SphereGrid& grid, int cell) {
  if (cell < 0 || cell >= grid.size()) throw Error(Errc::IndexOutOfRange, "cell " + std::to_string(cell));
  std::vector<double> w(grid.size(), 0.0);
  w[cell] = 1.0;
  return SphereMeasure(grid, std::move(w), "dirac");
}

SphereMeasure SphereMeasure::dirac(const SphereGrid& grid, const SpherePoint& p) { return dirac(grid, grid.cell_of(p)); }

SphereMeasure SphereMeasure::uniform(const SphereGrid& grid, const CellSet& cells) {
  if (cells.empty()) throw Error(Errc::InvalidArgument, "uniform measure on an empty cell set");
  std::vector<double> w(grid.size(), 0.0);
  const auto set = normalized(cells);
  for (int c : set) w.at(c) = 1.0 / static_cast<double>(set.size());
  return SphereMeasure(grid, std::move(w), "uniform");
}

SphereMeasure SphereMeasure::from_points(const SphereGrid& grid, std::span<const SpherePoint> points,
                                         std::span<const double> weights) {
  if (points.size() != weights.size()) throw Error(Errc::InvalidArgument, "points and weights differ in length");
  std::vector<double> w(grid.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(weights[i] >= 0.0)) throw Error(Errc::InvalidArgument, "negative atom weight");
    w[grid.cell_of(points[i])] += weights[i];
    total += weights[i];
  }
  if (!(total > 0.0)) throw Error(Errc::InvalidArgument, "atoms carry no mass");
  for (double& x : w) x /= total;
  return SphereMeasure(grid, std::move(w), "atoms");
}

double SphereMeasure::mass() const noexcept {
  double s = 0.0;
  for (double w : weights_) s += w;
  return s;
}

double SphereMeasure::integrate(const SphereFunction& f) const {
  double s = 0.0;
  for (int c = 0; c < grid_.size(); ++c) {
    if (weights_[c] != 0.0) s += weights_[c] * f(grid_.node(c));
  }
  return s;
}

double SphereMeasure::integrate(const std::function<double(const std::array<double, 3>&)>& f) const {
  double s = 0.0;
  for (int c = 0; c < grid_.size(); ++c) {
    if (weights_[c] != 0.0) s += weights_[c] * f(grid_.node_vector(c));
  }
  return s;
}

double SphereMeasure::mass_on(const CellSet& cells) const {
  double s = 0.0;
  for (int c : normalized(cells)) s += weights_.at(c);
  return s;
}

SphereMeasure SphereMeasure::mix(const SphereMeasure& a, const SphereMeasure& b, double t) {
  require_same_grid(a.grid_, b.grid_);
  if (!(t >= 0.0 && t <= 1.0)) throw Error(Errc::InvalidArgument, "mixing weight outside [0, 1]");
  std::vector<double> w(a.weights_.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = t * a.weights_[i] + (1.0 - t) * b.weights_[i];
  return SphereMeasure(a.grid_, std::move(w), "mixture");
}

PathMeasure PathMeasure::from_paths(const SphereGrid& grid, std::vector<ForwardPath> paths,
                                    std::vector<double> weights) {
  if (paths.empty() || paths.size() != weights.size()) {
    throw Error(Errc::InvalidArgument, "support form needs matching nonempty paths and weights");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    if (paths[i].length() != paths[0].length()) throw Error(Errc::LengthMismatch, "support paths differ in length");
    if (!(weights[i] >= 0.0)) throw Error(Errc::InvalidArgument, "negative path weight");
    total += weights[i];
  }
  if (!(total > 0.0)) throw Error(Errc::InvalidArgument, "path weights carry no mass");
  for (double& w : weights) w /= total;
  PathMeasure m;
  m.grid_ = grid;
  m.depth_ = paths[0].length();
  m.paths_ = std::move(paths);
  m.path_weights_ = std::move(weights);
  return m;
}

PathMeasure PathMeasure::from_cylinders(const SphereGrid& grid, int depth, std::map<Word, double> weights) {
  if (depth < 1) throw Error(Errc::InvalidArgument, "cylinder depth must be >= 1");
  double total = 0.0;
  for (const auto& [word, w] : weights) {
    if (static_cast<int>(word.size()) != depth) throw Error(Errc::LengthMismatch, "cylinder word of wrong depth");
    for (const auto& [cell, sym] : word) {
      if (cell < 0 || cell >= grid.size() || sym < 1) throw Error(Errc::InvalidArgument, "bad cylinder letter");
    }
    if (!(w >= 0.0)) throw Error(Errc::InvalidArgument, "negative cylinder weight");
    total += w;
  }
  if (!(total > 0.0)) throw Error(Errc::InvalidArgument, "cylinder weights carry no mass");
  for (auto& [word, w] : weights) w /= total;
  PathMeasure m;
  m.grid_ = grid;
  m.cylinder_ = true;
  m.depth_ = depth;
  m.cylinders_ = std::move(weights);
  return m;
}

PathMeasure PathMeasure::bernoulli(const SphereGrid& grid, int cell, std::span<const double> probabilities, int depth) {
  if (probabilities.empty()) throw Error(Errc::InvalidArgument, "empty symbol distribution");
  std::map<Word, double> w;
  Word word(depth, Letter{cell, 1});
  const int m = static_cast<int>(probabilities.size());
  while (true) {
    double p = 1.0;
    for (const auto& [c, s] : word) p *= probabilities[s - 1];
    if (p > 0.0) w[word] = p;
    int pos = depth - 1;
    while (pos >= 0 && word[pos].second == m) word[pos--].second = 1;
    if (pos < 0) break;
    ++word[pos].second;
  }
  return from_cylinders(grid, depth, std::move(w));
}

double PathMeasure::mass() const noexcept {
  double s = 0.0;
  if (cylinder_) {
    for (const auto& [word, w] : cylinders_) s += w;
  } else {
    for (double w : path_weights_) s += w;
  }
  return s;
}

PathMeasure PathMeasure::to_cylinders(int depth) const {
  if (cylinder_) {
    if (depth != depth_) throw Error(Errc::InvalidArgument, "cannot change the depth of a cylinder measure");
    return *this;
  }
  if (depth < 1 || depth > depth_) throw Error(Errc::IndexOutOfRange, "cylinder depth beyond path length");
  std::map<Word, double> w;
  for (std::size_t i = 0; i < paths_.size(); ++i) {
    Word word;
    for (int r = 0; r < depth; ++r) word.emplace_back(grid_.cell_of(paths_[i].points[r]), paths_[i].symbols[r]);
    w[word] += path_weights_[i];
  }
  return from_cylinders(grid_, depth, std::move(w));
}

PathMeasure PathMeasure::mix(const PathMeasure& a, const PathMeasure& b, double t) {
  require_same_grid(a.grid_, b.grid_);
  if (a.cylinder_ != b.cylinder_ || a.depth_ != b.depth_) {
    throw Error(Errc::InvalidArgument, "mixing needs the same representation and depth");
  }
  if (a.cylinder_) {
    std::map<Word, double> w;
    for (const auto& [word, x] : a.cylinders_) w[word] += t * x;
    for (const auto& [word, x] : b.cylinders_) w[word] += (1.0 - t) * x;
    return from_cylinders(a.grid_, a.depth_, std::move(w));
  }
  auto paths = a.paths_;
  paths.insert(paths.end(), b.paths_.begin(), b.paths_.end());
  std::vector<double> w;
  for (double x : a.path_weights_) w.push_back(t * x);
  for (double x : b.path_weights_) w.push_back((1.0 - t) * x);
  return from_paths(a.grid_, std::move(paths), std::move(w));
}

SphereMeasure pushforward(const PathMeasure& mu, int r) {
  const auto& grid = mu.grid();
  std::vector<double> w(grid.size(), 0.0);
  if (mu.is_cylinder()) {
    if (r < 0 || r >= mu.depth()) {
      throw Error(Errc::IndexOutOfRange, "coordinate " + std::to_string(r) + " beyond cylinder depth");
    }
    for (const auto& [word, x] : mu.cylinders()) w[word[r].first] += x;
  } else {
    if (r < 0 || r > mu.depth()) throw Error(Errc::IndexOutOfRange, "coordinate " + std::to_string(r));
    for (std::size_t i = 0; i < mu.paths().size(); ++i) {
      w[grid.cell_of(mu.paths()[i].points[r])] += mu.path_weights()[i];
    }
  }
  return SphereMeasure(grid, std::move(w), "pushforward");
}

TestFunctionFamily TestFunctionFamily::standard() {
  using V = std::array<double, 3>;
  std::vector<Member> m{
      {"X", [](const V& v) { return v[0]; }, 0.0},
      {"Y", [](const V& v) { return v[1]; }, 0.0},
      {"Z", [](const V& v) { return v[2]; }, 0.0},
      {"XY", [](const V& v) { return v[0] * v[1]; }, 0.0},
      {"YZ", [](const V& v) { return v[1] * v[2]; }, 0.0},
      {"XZ", [](const V& v) { return v[0] * v[2]; }, 0.0},
      {"X2-Y2", [](const V& v) { return v[0] * v[0] - v[1] * v[1]; }, 0.0},
      {"P2(Z)", [](const V& v) { return 0.5 * (3.0 * v[2] * v[2] - 1.0); }, 0.0},
  };
  double w = 0.5;
  for (auto& x : m) {
    x.weight = w;
    w *= 0.5;
  }
  return TestFunctionFamily(std::move(m));
}

double measure_distance(const SphereMeasure& m1, const SphereMeasure& m2, const TestFunctionFamily& fam) {
  if (fam.empty()) throw Error(Errc::FamilyEmpty, "test-function family is empty");
  require_same_grid(m1.grid(), m2.grid());
  const auto& grid = m1.grid();
  std::vector<double> diff(grid.size());
  for (int c = 0; c < grid.size(); ++c) diff[c] = m1.weights()[c] - m2.weights()[c];
  double d = 0.0;
  for (const auto& member : fam.members()) {
    double s = 0.0;
    for (int c = 0; c < grid.size(); ++c) {
      if (diff[c] != 0.0) s += diff[c] * member.fn(grid.node_vector(c));
    }
    d += member.weight * std::abs(s);
  }
  return d;
}

double measure_distance(const PathMeasure& m1, const PathMeasure& m2, const TestFunctionFamily& fam) {
  auto coords = [](const PathMeasure& m) { return m.is_cylinder() ? m.depth() : m.depth() + 1; };
  const int n = std::min(coords(m1), coords(m2));
  double d = 0.0;
  double w = 1.0;
  for (int r = 0; r < n; ++r) {
    d += w * measure_distance(pushforward(m1, r), pushforward(m2, r), fam);
    w *= 0.5;
  }
  return d;
}

PathMeasure empirical_invariant_measure(const Correspondence& corr, const SphereGrid& grid, const SpherePoint& x0,
                                        int n_burn, int n_keep, int depth, std::uint64_t seed) {
  if (depth < 1 || n_keep < depth || n_burn < 0) {
    throw Error(Errc::InvalidArgument, "need n_keep >= depth >= 1 and n_burn >= 0");
  }
  std::mt19937_64 rng(seed);
  SpherePoint x = x0;
  std::vector<Letter> letters;
  letters.reserve(n_keep);
  for (int t = 0; t < n_burn + n_keep; ++t) {
    if (!x.is_finite_value()) throw Error(Errc::TrajectoryEscape, "orbit left the representable domain at step " + std::to_string(t));
    const auto img = corr.forward_images(x);
    const int total = img.total_multiplicity();
    if (total == 0) throw Error(Errc::TrajectoryEscape, "empty fiber at step " + std::to_string(t));
    int pick = std::uniform_int_distribution<int>(0, total - 1)(rng);
    const BranchPoint* chosen = nullptr;
    for (const auto& b : img.points) {
      if (pick < b.multiplicity) {
        chosen = &b;
        break;
      }
      pick -= b.multiplicity;
    }
    if (t >= n_burn) letters.emplace_back(grid.cell_of(x), chosen->component);
    x = chosen->point;
  }
  std::map<Word, double> w;
  const int windows = n_keep - depth + 1;
  for (int s = 0; s < windows; ++s) {
    w[Word(letters.begin() + s, letters.begin() + s + depth)] += 1.0 / windows;
  }
  return PathMeasure::from_cylinders(grid, depth, std::move(w));
}

ShiftInvarianceReport check_shift_invariance(const PathMeasure& mu, double tol) {
  if (!mu.is_cylinder()) throw Error(Errc::InvalidArgument, "shift invariance check needs the cylinder form");
  std::map<Word, double> head;
  std::map<Word, double> tail;
  for (const auto& [word, w] : mu.cylinders()) {
    head[Word(word.begin(), word.end() - 1)] += w;
    tail[Word(word.begin() + 1, word.end())] += w;
  }
  double defect = 0.0;
  for (const auto& [c, w] : head) {
    const auto it = tail.find(c);
    defect = std::max(defect, std::abs(w - (it == tail.end() ? 0.0 : it->second)));
  }
  for (const auto& [c, w] : tail) {
    if (!head.contains(c)) defect = std::max(defect, w);
  }
  return {defect, defect <= tol};
}

SpherePartition::SpherePartition(const SphereGrid& grid, const std::vector<CellSet>& blocks)
    : grid_(grid), labels_(grid.size(), -1), n_blocks_(static_cast<int>(blocks.size())) {
  for (int i = 0; i < n_blocks_; ++i) {
    for (int c : blocks[i]) {
      if (c < 0 || c >= grid.size()) throw Error(Errc::NotAPartition, "cell " + std::to_string(c) + " is off the grid");
      if (labels_[c] != -1) throw Error(Errc::NotAPartition, "cell " + std::to_string(c) + " lies in two blocks");
      labels_[c] = i;
    }
  }
  for (int c = 0; c < grid.size(); ++c) {
    if (labels_[c] == -1) throw Error(Errc::NotAPartition, "cell " + std::to_string(c) + " is not covered");
  }
}

SpherePartition SpherePartition::trivial(const SphereGrid& grid) {
  CellSet all(grid.size());
  for (int c = 0; c < grid.size(); ++c) all[c] = c;
  return SpherePartition(grid, {all});
}

SpherePartition SpherePartition::cells(const SphereGrid& grid) {
  std::vector<CellSet> blocks(grid.size());
  for (int c = 0; c < grid.size(); ++c) blocks[c] = {c};
  return SpherePartition(grid, blocks);
}

SpherePartition SpherePartition::blocks(const SphereGrid& grid, int band_step, int sector_step) {
  if (band_step < 1 || sector_step < 1) throw Error(Errc::InvalidArgument, "block steps must be >= 1");
  const int per_row = (grid.n_sectors() + sector_step - 1) / sector_step;
  const int rows = (grid.n_bands() + band_step - 1) / band_step;
  std::vector<CellSet> out(rows * per_row);
  for (int c = 0; c < grid.size(); ++c) {
    const auto [b, s] = grid.band_sector(c);
    out[(b / band_step) * per_row + s / sector_step].push_back(c);
  }
  return SpherePartition(grid, out);
}

std::vector<CellSet> SpherePartition::block_cells() const {
  std::vector<CellSet> out(n_blocks_);
  for (int c = 0; c < grid_.size(); ++c) out[labels_[c]].push_back(c);
  return out;
}

SpherePartition join(const SpherePartition& a, const SpherePartition& b) {
  require_same_grid(a.grid(), b.grid());
  std::map<std::pair<int, int>, int> ids;
  std::vector<CellSet> blocks;
  for (int c = 0; c < a.grid().size(); ++c) {
    const auto key = std::make_pair(a.label(c), b.label(c));
    auto [it, fresh] = ids.try_emplace(key, static_cast<int>(blocks.size()));
    if (fresh) blocks.emplace_back();
    blocks[it->second].push_back(c);
  }
  return SpherePartition(a.grid(), blocks);
}

PathPartition::PathPartition(std::vector<Factor> factors, int alphabet) : alphabet_(alphabet) {
  if (alphabet < 1) throw Error(Errc::InvalidArgument, "alphabet must be >= 1");
  for (auto& f : factors) {
    if (f.position < 0) throw Error(Errc::NotAPartition, "negative factor position");
    if (std::find(factors_.begin(), factors_.end(), f) == factors_.end()) factors_.push_back(std::move(f));
  }
}

long long PathPartition::cell_count() const noexcept {
  long long n = 1;
  for (const auto& f : factors_) n *= static_cast<long long>(f.partition.size()) * (f.use_symbol ? alphabet_ : 1);
  return n;
}

std::vector<int> PathPartition::label(const ForwardPath& p) const {
  std::vector<int> out;
  for (const auto& f : factors_) {
    if (f.position > p.length() || (f.use_symbol && f.position + 1 > p.length())) {
      throw Error(Errc::NotAPartition, "factor at coordinate " + std::to_string(f.position) + " beyond path length");
    }
    out.push_back(f.partition.label(f.partition.grid().cell_of(p.points[f.position])));
    if (f.use_symbol) out.push_back(p.symbols[f.position]);
  }
  return out;
}

std::vector<int> PathPartition::label(const Word& w) const {
  std::vector<int> out;
  for (const auto& f : factors_) {
    if (f.position >= static_cast<int>(w.size())) {
      throw Error(Errc::NotAPartition, "factor at coordinate " + std::to_string(f.position) + " beyond cylinder depth");
    }
    out.push_back(f.partition.label(w[f.position].first));
    if (f.use_symbol) out.push_back(w[f.position].second);
  }
  return out;
}

PathPartition join(const PathPartition& a, const PathPartition& b) {
  auto factors = a.factors();
  factors.insert(factors.end(), b.factors().begin(), b.factors().end());
  return PathPartition(std::move(factors), std::max(a.alphabet(), b.alphabet()));
}

PathPartition lifted_partition(const SpherePartition& q, int alphabet) { return shifted_lift(q, alphabet, 0); }

PathPartition shifted_lift(const SpherePartition& q, int alphabet, int p) {
  return PathPartition({PathPartition::Factor{p, q, true}}, alphabet);
}

double partition_entropy(const PathMeasure& mu, const PathPartition& partition) {
  std::map<std::vector<int>, double> masses;
  if (mu.is_cylinder()) {
    for (const auto& [word, w] : mu.cylinders()) masses[partition.label(word)] += w;
  } else {
    for (std::size_t i = 0; i < mu.paths().size(); ++i) masses[partition.label(mu.paths()[i])] += mu.path_weights()[i];
  }
  return shannon(masses);
}

double partition_entropy(const SphereMeasure& nu, const SpherePartition& partition) {
  if (!(nu.grid() == partition.grid())) throw Error(Errc::NotAPartition, "partition grid differs from the measure grid");
  std::map<int, double> masses;
  for (int c = 0; c < nu.grid().size(); ++c) masses[partition.label(c)] += nu.weights()[c];
  return shannon(masses);
}

std::vector<double> joined_entropies(const PathMeasure& mu, const SpherePartition& q, int alphabet, int n_max) {
  std::vector<double> h{0.0};
  std::vector<PathPartition::Factor> factors;
  for (int n = 1; n <= n_max; ++n) {
    factors.push_back({n - 1, q, true});
    h.push_back(partition_entropy(mu, PathPartition(factors, alphabet)));
  }
  return h;
}

double intermediate_entropy(const SphereMeasure& nu, const PathMeasure& mu, const Correspondence& corr,
                            std::span<const SpherePartition> partitions, const EntropyOptions& options) {
  if (partitions.empty()) throw Error(Errc::InvalidArgument, "partition schedule is empty");
  if (options.n_max < 1) throw Error(Errc::InvalidArgument, "n_max must be >= 1");
  const double d = measure_distance(pushforward(mu, 0), nu);
  if (d > options.pushforward_tol) {
    throw Error(Errc::PushforwardMismatch, "push-forward differs from nu by " + std::to_string(d));
  }
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& q : partitions) {
    const auto h = joined_entropies(mu, q, corr.size(), options.n_max);
    best = std::max(best, h[options.n_max] - h[options.n_max - 1]);
  }
  return best;
}

double cylinder_entropy_rate(const PathMeasure& mu, int n_max) {
  if (n_max < 1 || n_max > mu.depth()) throw Error(Errc::InvalidArgument, "n_max outside [1, depth]");
  auto block_entropy = [&](int n) {
    std::map<std::vector<int>, double> masses;
    if (mu.is_cylinder()) {
      for (const auto& [word, w] : mu.cylinders()) {
        std::vector<int> key;
        for (int r = 0; r < n; ++r) key.push_back(word[r].second);
        masses[key] += w;
      }
    } else {
      for (std::size_t i = 0; i < mu.paths().size(); ++i) {
        const auto& s = mu.paths()[i].symbols;
        masses[std::vector<int>(s.begin(), s.begin() + n)] += mu.path_weights()[i];
      }
    }
    return shannon(masses);
  };
  return block_entropy(n_max) - (n_max > 1 ? block_entropy(n_max - 1) : 0.0);
}

double measure_entropy(const SphereMeasure& nu, const Correspondence& corr, std::span<const PathMeasure> candidates,
                       std::span<const SpherePartition> partitions, const EntropyOptions& options) {
  double best = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (const auto& mu : candidates) {
    if (measure_distance(pushforward(mu, 0), nu) > options.pushforward_tol) continue;
    best = std::max(best, intermediate_entropy(nu, mu, corr, partitions, options));
    any = true;
  }
  if (!any) throw Error(Errc::NoValidCandidates, "no candidate pushes forward to nu");
  return best;
}

VariationalReport variational_check(const Correspondence& corr, const SphereFunction& f,
                                    std::span<const VariationalCase> cases,
                                    std::span<const SpherePartition> partitions, double pressure, double slack,
                                    const EntropyOptions& options) {
  VariationalReport report;
  report.pressure = pressure;
  report.slack = slack;
  report.best_value = -std::numeric_limits<double>::infinity();
  for (const auto& c : cases) {
    VariationalRow row;
    row.label = c.label;
    row.entropy = measure_entropy(c.nu, corr, c.candidates, partitions, options);
    row.integral = c.nu.integrate(f);
    row.value = row.entropy + row.integral;
    row.within_bound = row.value <= pressure + slack;
    report.all_within_bound = report.all_within_bound && row.within_bound;
    report.best_value = std::max(report.best_value, row.value);
    report.rows.push_back(row);
  }
  report.gap = pressure - report.best_value;
  return report;
}

}  // namespace corrdyn
