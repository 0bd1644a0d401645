#include "corrdyn/ruelle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "corrdyn/error.hpp"
#include "corrdyn/parallel.hpp"

namespace corrdyn {
namespace {

double sup_norm(const GridFunction& g) {
  double m = 0.0;
  for (double x : g) m = std::max(m, std::abs(x));
  return m;
}

void require_size(const RuelleOperator& op, const GridFunction& g, const char* what) {
  if (static_cast<int>(g.size()) != op.size()) {
    throw Error(Errc::InvalidArgument, std::string(what) + " has " + std::to_string(g.size()) + " values for " +
                                           std::to_string(op.size()) + " active cells");
  }
}

GridFunction random_positive(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.5, 1.5);
  GridFunction g(n);
  for (double& x : g) x = u(rng);
  return g;
}

}  // namespace

RuelleOperator::RuelleOperator(const Correspondence& corr, const SphereGrid& grid, const CellSet& active, int workers)
    : grid_(grid), cells_(normalized(active)), index_(grid.size(), -1), d_top_(corr.d_top()), workers_(workers) {
  if (cells_.empty()) throw Error(Errc::InvalidArgument, "active cell set is empty");
  for (std::size_t i = 0; i < cells_.size(); ++i) index_.at(cells_[i]) = static_cast<int>(i);
  for (int c : dilate(grid_, cells_)) {
    if (index_[c] < 0) ring_.push_back(c);
  }
  table_.resize(cells_.size());
  parallel_for(cells_.size(), workers_, [&](std::size_t i) {
    const auto img = corr.backward_images(grid_.center(cells_[i]));
    for (const auto& b : img.points) table_[i].push_back({locate(b.point), b.component, b.multiplicity});
  });
}

int RuelleOperator::active_index(int cell) const noexcept {
  return cell >= 0 && cell < grid_.size() ? index_[cell] : -1;
}

int RuelleOperator::locate(const SpherePoint& p) const {
  const int cell = grid_.cell_of(p);
  if (index_[cell] >= 0) return index_[cell];
  if (!contains(ring_, cell)) {
    throw Error(Errc::PreimageOutsideSupport, "preimage in cell " + std::to_string(cell) + " beyond the support ring");
  }
  const auto v = p.to_unit_vector();
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    const auto c = grid_.center_vector(cells_[i]);
    const double d = std::hypot(c[0] - v[0], c[1] - v[1], c[2] - v[2]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

GridFunction RuelleOperator::sample(const SphereFunction& f) const {
  GridFunction out(cells_.size());
  for (std::size_t i = 0; i < cells_.size(); ++i) out[i] = f(grid_.center(cells_[i]));
  return out;
}

GridFunction RuelleOperator::apply(const GridFunction& f, const GridFunction& g) const {
  require_size(*this, f, "potential");
  require_size(*this, g, "argument");
  GridFunction ef(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) ef[i] = std::exp(f[i]);
  GridFunction out(cells_.size(), 0.0);
  parallel_for(cells_.size(), workers_, [&](std::size_t i) {
    double s = 0.0;
    for (const auto& b : table_[i]) s += b.multiplicity * ef[b.target] * g[b.target];
    out[i] = s;
  });
  return out;
}

std::vector<double> RuelleOperator::spread(const GridFunction& values) const {
  require_size(*this, values, "values");
  std::vector<double> out(grid_.size(), 0.0);
  for (std::size_t i = 0; i < cells_.size(); ++i) out[cells_[i]] = values[i];
  return out;
}

HolderReport holder_norm(const RuelleOperator& op, const GridFunction& f, double lambda, int K, double tail_tol) {
  if (!(lambda > 1.0)) throw Error(Errc::InvalidArgument, "lambda must be > 1");
  if (K < 1) throw Error(Errc::InvalidArgument, "K must be >= 1");
  require_size(op, f, "function");
  HolderReport r;
  r.lambda = lambda;
  r.alpha = 1.0 / lambda;
  r.omega.assign(K, 0.0);
  std::vector<SpherePoint> centres;
  for (int c : op.cells()) centres.push_back(op.grid().center(c));
  for (std::size_t i = 0; i < centres.size(); ++i) {
    for (std::size_t j = i; j < centres.size(); ++j) {
      const double d = sph_dist(centres[i], centres[j]);
      const double df = std::abs(f[i] - f[j]);
      double radius = 1.0;
      for (int k = 0; k < K && d <= radius; ++k) {
        r.omega[k] = std::max(r.omega[k], df);
        radius /= lambda;
      }
    }
  }
  r.sup_norm = sup_norm(f);
  r.alpha_norm = r.sup_norm;
  for (double w : r.omega) r.alpha_norm += w;
  r.member = std::isfinite(r.alpha_norm) && r.omega.back() <= tail_tol;
  return r;
}

SpectralResult power_iteration(const RuelleOperator& op, const GridFunction& f, double tol, int max_iter,
                               std::uint64_t seed) {
  require_size(op, f, "potential");
  if (!(tol > 0.0) || max_iter < 1) throw Error(Errc::InvalidArgument, "need tol > 0 and max_iter >= 1");
  for (double x : f) {
    if (!std::isfinite(x)) throw Error(Errc::InvalidArgument, "potential must be finite");
  }
  std::mt19937_64 rng(seed);
  GridFunction g = random_positive(op.size(), rng);
  const double g0 = sup_norm(g);
  for (double& x : g) x /= g0;
  SpectralResult r;
  double prev_lambda = 0.0;
  double prev_residual = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    GridFunction lg = op.apply(f, g);
    const double lambda = sup_norm(lg);
    if (!(lambda > 0.0)) throw Error(Errc::NonConvergence, "operator annihilated the iterate");
    double residual = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) residual = std::max(residual, std::abs(lg[i] - lambda * g[i]));
    r.iterations = it;
    r.lambda = lambda;
    r.residual = residual;
    r.gap_estimate = prev_residual > 0.0 ? residual / prev_residual : 0.0;
    if (std::abs(lambda - prev_lambda) < tol && residual < tol * lambda) {
      r.h = g;
      r.converged = true;
      return r;
    }
    prev_lambda = lambda;
    prev_residual = residual;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = lg[i] / lambda;
  }
  throw Error(Errc::NonConvergence, "power iteration did not converge in " + std::to_string(max_iter) +
                                        " iterations (residual " + std::to_string(r.residual) + ")");
}

NormalizedWeights normalize(const RuelleOperator& op, const GridFunction& f, const SpectralResult& spectral) {
  require_size(op, f, "potential");
  require_size(op, spectral.h, "eigenfunction");
  const double hmin = *std::min_element(spectral.h.begin(), spectral.h.end());
  if (!(hmin > 0.0)) throw Error(Errc::NonPositiveEigenfunction, "min h = " + std::to_string(hmin));
  NormalizedWeights out;
  out.weights.resize(op.size());
  out.sums.assign(op.size(), 0.0);
  for (int i = 0; i < op.size(); ++i) {
    for (const auto& b : op.branches(i)) {
      const double w =
          b.multiplicity * std::exp(f[b.target]) * spectral.h[b.target] / (spectral.lambda * spectral.h[i]);
      out.weights[i].push_back(w);
      out.sums[i] += w;
    }
  }
  return out;
}

AdjointResult adjoint_fixed_point(const RuelleOperator& op, const NormalizedWeights& weights, double tol, int max_iter,
                                  std::uint64_t seed, int depth) {
  if (static_cast<int>(weights.weights.size()) != op.size()) {
    throw Error(Errc::InvalidArgument, "weight table does not match the operator");
  }
  if (depth < 1) throw Error(Errc::InvalidArgument, "depth must be >= 1");
  std::mt19937_64 rng(seed);
  const int n = op.size();

  auto step = [&](const GridFunction& nu) {
    GridFunction next(n, 0.0);
    for (int i = 0; i < n; ++i) {
      const auto& br = op.branches(i);
      for (std::size_t k = 0; k < br.size(); ++k) next[br[k].target] += nu[i] * weights.weights[i][k];
    }
    return next;
  };
  auto l1 = [](const GridFunction& a, const GridFunction& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s;
  };
  auto solve = [&](int& iterations, double& residual) {
    GridFunction nu = random_positive(n, rng);
    double total = 0.0;
    for (double x : nu) total += x;
    for (double& x : nu) x /= total;
    for (int it = 1; it <= max_iter; ++it) {
      GridFunction next = step(nu);
      residual = l1(next, nu);
      iterations = it;
      if (residual <= tol) return nu;
      // Lazy chain: same fixed point, no periodic oscillation.
      double mass = 0.0;
      for (int i = 0; i < n; ++i) {
        nu[i] = 0.5 * (nu[i] + next[i]);
        mass += nu[i];
      }
      for (double& x : nu) x /= mass;
    }
    throw Error(Errc::NonConvergence, "adjoint iteration did not converge in " + std::to_string(max_iter) +
                                          " iterations (residual " + std::to_string(residual) + ")");
  };

  AdjointResult out;
  out.nu_active = solve(out.iterations, out.residual);
  int it2 = 0;
  double res2 = 0.0;
  const GridFunction other = solve(it2, res2);
  out.start_spread = l1(out.nu_active, other);
  out.non_unique = out.start_spread > 10.0 * tol;
  out.nu = SphereMeasure(op.grid(), op.spread(out.nu_active), "adjoint fixed point");

  std::map<Word, double> cylinders;
  Word word(depth);
  auto walk = [&](auto&& self, int at, int r, double w) -> void {
    if (r < 0) {
      cylinders[word] += w;
      return;
    }
    const auto& br = op.branches(at);
    for (std::size_t k = 0; k < br.size(); ++k) {
      const double wk = w * weights.weights[at][k];
      if (wk == 0.0) continue;
      word[r] = {op.cells()[br[k].target], br[k].component};
      self(self, br[k].target, r - 1, wk);
    }
  };
  for (int i = 0; i < n; ++i) {
    if (out.nu_active[i] > 0.0) walk(walk, i, depth - 1, out.nu_active[i]);
  }
  out.mu0 = PathMeasure::from_cylinders(op.grid(), depth, std::move(cylinders));
  return out;
}

ConvergenceReport convergence_check(const RuelleOperator& op, const GridFunction& f, const GridFunction& g,
                                    const SpectralResult& spectral, const GridFunction& nu_active, int n_max) {
  require_size(op, g, "test function");
  require_size(op, nu_active, "measure");
  if (n_max < 1) throw Error(Errc::InvalidArgument, "n_max must be >= 1");
  ConvergenceReport r;
  for (int i = 0; i < op.size(); ++i) r.c += nu_active[i] * g[i] / spectral.h[i];
  GridFunction phi = g;
  for (int n = 1; n <= n_max; ++n) {
    phi = op.apply(f, phi);
    for (double& x : phi) x /= spectral.lambda;
    double e = 0.0;
    for (int i = 0; i < op.size(); ++i) e = std::max(e, std::abs(phi[i] - r.c * spectral.h[i]));
    r.errors.push_back(e);
  }
  double log_ratio = 0.0;
  int count = 0;
  for (std::size_t k = 1; k < r.errors.size(); ++k) {
    if (r.errors[k] > 0.0 && r.errors[k - 1] > 0.0) {
      log_ratio += std::log(r.errors[k] / r.errors[k - 1]);
      ++count;
    }
  }
  r.decay_rate = count > 0 ? std::exp(log_ratio / count) : 0.0;
  return r;
}

double lifted_consistency_check(const Correspondence& corr, const RuelleOperator& op, const GridFunction& f,
                                const GridFunction& g, std::span<const ForwardPath> paths) {
  require_size(op, f, "potential");
  require_size(op, g, "test function");
  const GridFunction lg = op.apply(f, g);
  double worst = 0.0;
  for (const auto& p : paths) {
    const int home = op.locate(p.points.front());
    double lifted = 0.0;
    // One-step extensions (y; b a)_{k j} of the path, each counted once per branch index.
    for (const auto& b : corr.backward_images(p.points.front()).points) {
      for (int k = 0; k < b.multiplicity; ++k) {
        ForwardPath ext = p;
        ext.points.insert(ext.points.begin(), b.point);
        ext.symbols.insert(ext.symbols.begin(), b.component);
        ext.branches.insert(ext.branches.begin(), b.branch_index + k);
        const int y = op.locate(ext.points.front());
        lifted += std::exp(f[y]) * g[y];
      }
    }
    worst = std::max(worst, std::abs(lifted - lg[home]));
  }
  return worst;
}

}  // namespace corrdyn
