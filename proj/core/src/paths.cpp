#include "corrdyn/paths.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <unordered_map>

#include "corrdyn/error.hpp"

namespace corrdyn {
namespace {

template <class Node>
void thin(std::vector<Node>& level, std::size_t cap, std::mt19937_64& rng, bool& truncated) {
  if (level.size() <= cap) return;
  std::vector<Node> kept;
  kept.reserve(cap);
  std::sample(level.begin(), level.end(), std::back_inserter(kept), cap, rng);
  level = std::move(kept);
  truncated = true;
}

std::uint64_t word_hash(const std::vector<int>& symbols) {
  std::uint64_t h = 1469598103934665603ULL;
  for (int s : symbols) {
    h ^= static_cast<std::uint64_t>(s);
    h *= 1099511628211ULL;
  }
  return h;
}

// Buckets admitted paths by symbol word and by the eps-cube holding their
// terminal point. Two paths within eps at every coordinate sit in the same
// word and in neighbouring cubes.
class ShadowIndex {
 public:
  ShadowIndex(std::span<const ForwardPath> paths, double eps) : paths_(paths), eps_(eps) {}

  template <class Conflict>
  bool conflicts(std::size_t cand, Conflict&& conflict) const {
    const auto [h, c] = locate(cand);
    for (int dx = -1; dx <= 1; ++dx) {
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dz = -1; dz <= 1; ++dz) {
          const auto it = buckets_.find(Key{h, c[0] + dx, c[1] + dy, c[2] + dz});
          if (it == buckets_.end()) continue;
          for (std::size_t idx : it->second) {
            if (conflict(paths_[idx], paths_[cand])) return true;
          }
        }
      }
    }
    return false;
  }

  void insert(std::size_t idx) {
    const auto [h, c] = locate(idx);
    buckets_[Key{h, c[0], c[1], c[2]}].push_back(idx);
  }

 private:
  struct Key {
    std::uint64_t word;
    long long x, y, z;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
      std::uint64_t h = k.word;
      for (long long v : {k.x, k.y, k.z}) h = (h ^ static_cast<std::uint64_t>(v)) * 1099511628211ULL;
      return static_cast<std::size_t>(h);
    }
  };

  std::pair<std::uint64_t, std::array<long long, 3>> locate(std::size_t idx) const {
    const auto v = paths_[idx].points.back().to_unit_vector();
    const double cell = std::max(eps_, 1e-300);
    return {word_hash(paths_[idx].symbols),
            {static_cast<long long>(std::floor(v[0] / cell)), static_cast<long long>(std::floor(v[1] / cell)),
             static_cast<long long>(std::floor(v[2] / cell))}};
  }

  std::span<const ForwardPath> paths_;
  double eps_;
  std::unordered_map<Key, std::vector<std::size_t>, KeyHash> buckets_;
};

}  // namespace

PathSet<ForwardPath> enumerate_forward_paths(const Correspondence& corr, const SpherePoint& x0, int n,
                                             std::size_t cap, std::uint64_t seed) {
  if (n < 0) throw Error(Errc::InvalidArgument, "path length must be >= 0");
  if (cap < 1) throw Error(Errc::InvalidArgument, "cap must be >= 1");
  PathSet<ForwardPath> out;
  out.seed = seed;
  std::mt19937_64 rng(seed);
  std::vector<ForwardPath> level{ForwardPath{{x0}, {}, {}}};
  for (int r = 1; r <= n; ++r) {
    std::vector<ForwardPath> next;
    for (const auto& p : level) {
      const auto img = corr.forward_images(p.points.back());
      out.degenerate = out.degenerate || img.degenerate;
      for (const auto& b : img.points) {
        for (int k = 0; k < b.multiplicity; ++k) {
          ForwardPath child = p;
          child.points.push_back(b.point);
          child.symbols.push_back(b.component);
          child.branches.push_back(b.branch_index + k);
          next.push_back(std::move(child));
        }
      }
    }
    thin(next, cap, rng, out.truncated);
    level = std::move(next);
  }
  thin(level, cap, rng, out.truncated);
  out.paths = std::move(level);
  return out;
}

PathSet<BackwardPath> enumerate_backward_paths(const Correspondence& corr, const SpherePoint& y0, int n,
                                               std::size_t cap, std::uint64_t seed) {
  if (n < 0) throw Error(Errc::InvalidArgument, "path length must be >= 0");
  if (cap < 1) throw Error(Errc::InvalidArgument, "cap must be >= 1");
  PathSet<BackwardPath> out;
  out.seed = seed;
  std::mt19937_64 rng(seed);
  // Built from y0 outwards, reversed at the end.
  std::vector<BackwardPath> level{BackwardPath{{y0}, {}, {}}};
  for (int r = 1; r <= n; ++r) {
    std::vector<BackwardPath> next;
    for (const auto& p : level) {
      const auto img = corr.backward_images(p.points.back());
      out.degenerate = out.degenerate || img.degenerate;
      for (const auto& b : img.points) {
        for (int k = 0; k < b.multiplicity; ++k) {
          BackwardPath child = p;
          child.points.push_back(b.point);
          child.symbols.push_back(b.component);
          child.branches.push_back(b.branch_index + k);
          next.push_back(std::move(child));
        }
      }
    }
    thin(next, cap, rng, out.truncated);
    level = std::move(next);
  }
  for (auto& p : level) {
    std::reverse(p.points.begin(), p.points.end());
    std::reverse(p.symbols.begin(), p.symbols.end());
    std::reverse(p.branches.begin(), p.branches.end());
  }
  out.paths = std::move(level);
  return out;
}

double path_metric(const ForwardPath& p, const ForwardPath& q) {
  if (p.length() != q.length()) {
    throw Error(Errc::LengthMismatch,
                "paths of length " + std::to_string(p.length()) + " and " + std::to_string(q.length()));
  }
  double d = 0.0;
  double w = 1.0;
  for (int r = 0; r <= p.length(); ++r) {
    d = std::max(d, w * sph_dist(p.points[r], q.points[r]));
    if (r >= 1 && p.symbols[r - 1] != q.symbols[r - 1]) d = std::max(d, w);
    w *= 0.5;
  }
  return d;
}

ForwardPath shift(const ForwardPath& p) {
  if (p.length() == 0) throw Error(Errc::EmptyPath, "cannot shift a path of length 0");
  return ForwardPath{{p.points.begin() + 1, p.points.end()},
                     {p.symbols.begin() + 1, p.symbols.end()},
                     {p.branches.begin() + 1, p.branches.end()}};
}

SpherePoint project_point(const ForwardPath& p, int r) {
  if (r < 0 || r > p.length()) {
    throw Error(Errc::IndexOutOfRange, "point index " + std::to_string(r) + " outside [0, " +
                                           std::to_string(p.length()) + "]");
  }
  return p.points[r];
}

int project_symbol(const ForwardPath& p, int r) {
  if (r < 1 || r > p.length()) {
    throw Error(Errc::IndexOutOfRange, "symbol index " + std::to_string(r) + " outside [1, " +
                                           std::to_string(p.length()) + "]");
  }
  return p.symbols[r - 1];
}

SpherePoint project_point(const BackwardPath& p, int r) {
  if (r < 0 || r > p.length()) throw Error(Errc::IndexOutOfRange, "point index " + std::to_string(r));
  return p.points[p.length() - r];
}

int project_symbol(const BackwardPath& p, int r) {
  if (r < 0 || r >= p.length()) throw Error(Errc::IndexOutOfRange, "symbol index " + std::to_string(r));
  return p.symbols[p.length() - 1 - r];
}

double incidence_defect(const Correspondence& corr, const ForwardPath& p) {
  double worst = 0.0;
  for (int r = 1; r <= p.length(); ++r) {
    worst = std::max(worst, corr.component(p.symbols[r - 1]).incidence_residual(p.points[r - 1], p.points[r]));
  }
  return worst;
}

double incidence_defect(const Correspondence& corr, const BackwardPath& p) {
  double worst = 0.0;
  for (int i = 0; i < p.length(); ++i) {
    worst = std::max(worst, corr.component(p.symbols[i]).incidence_residual(p.points[i], p.points[i + 1]));
  }
  return worst;
}

bool are_separated(const ForwardPath& p, const ForwardPath& q, double eps) {
  if (p.symbols != q.symbols) return true;
  const auto n = std::min(p.points.size(), q.points.size());
  for (std::size_t r = 0; r < n; ++r) {
    if (sph_dist(p.points[r], q.points[r]) > eps) return true;
  }
  return false;
}

bool shadows(const ForwardPath& p, const ForwardPath& q, double eps) {
  if (p.symbols != q.symbols) return false;
  const auto n = std::min(p.points.size(), q.points.size());
  for (std::size_t r = 0; r < n; ++r) {
    if (!(sph_dist(p.points[r], q.points[r]) < eps)) return false;
  }
  return true;
}

std::vector<std::size_t> separated_indices(std::span<const ForwardPath> paths, double eps,
                                           std::span<const double> log_weights) {
  std::vector<std::size_t> order(paths.size());
  std::iota(order.begin(), order.end(), 0);
  if (!log_weights.empty()) {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return log_weights[a] > log_weights[b]; });
  }
  ShadowIndex index(paths, eps);
  std::vector<std::size_t> admitted;
  for (std::size_t i : order) {
    const bool clash =
        index.conflicts(i, [eps](const ForwardPath& a, const ForwardPath& b) { return !are_separated(a, b, eps); });
    if (!clash) {
      index.insert(i);
      admitted.push_back(i);
    }
  }
  return admitted;
}

std::vector<std::size_t> spanning_indices(std::span<const ForwardPath> paths, double eps,
                                          std::span<const std::size_t> order) {
  std::vector<std::size_t> visit(order.begin(), order.end());
  if (visit.empty()) {
    visit.resize(paths.size());
    std::iota(visit.begin(), visit.end(), 0);
  }
  ShadowIndex index(paths, eps);
  std::vector<std::size_t> admitted;
  for (std::size_t i : visit) {
    const bool covered =
        index.conflicts(i, [eps](const ForwardPath& a, const ForwardPath& b) { return shadows(a, b, eps); });
    if (!covered) {
      index.insert(i);
      admitted.push_back(i);
    }
  }
  return admitted;
}

std::vector<ForwardPath> separated_subset(std::span<const ForwardPath> paths, double eps,
                                          const std::function<double(const ForwardPath&)>& weight) {
  std::vector<double> lw(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) lw[i] = std::log(weight(paths[i]));
  std::vector<ForwardPath> out;
  for (std::size_t i : separated_indices(paths, eps, lw)) out.push_back(paths[i]);
  return out;
}

std::vector<ForwardPath> spanning_subset(std::span<const ForwardPath> paths, double eps) {
  std::vector<ForwardPath> out;
  for (std::size_t i : spanning_indices(paths, eps)) out.push_back(paths[i]);
  return out;
}

}  // namespace corrdyn
