#include "corrdyn/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "corrdyn/error.hpp"

namespace corrdyn {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Height of |z| = r under the stereographic embedding.
double height_of_radius(double r) {
  if (std::isinf(r)) return 1.0;
  return (r * r - 1.0) / (r * r + 1.0);
}

}  // namespace

SphereGrid::SphereGrid(int n_bands, int n_sectors) : n_bands_(n_bands), n_sectors_(n_sectors) {
  if (n_bands < 1 || n_sectors < 1) {
    throw Error(Errc::InvalidArgument, "grid needs at least one band and one sector");
  }
}

int SphereGrid::cell_of(const std::array<double, 3>& v) const noexcept {
  const double h = std::clamp(v[2], -1.0, 1.0);
  int band = static_cast<int>(std::ceil((h + 1.0) * 0.5 * n_bands_)) - 1;
  band = std::clamp(band, 0, n_bands_ - 1);
  double phi = std::atan2(v[1], v[0]);
  if (phi < 0.0) phi += kTwoPi;
  int sector = static_cast<int>(std::ceil(phi / kTwoPi * n_sectors_)) - 1;
  sector = std::clamp(sector, 0, n_sectors_ - 1);
  return index(band, sector);
}

int SphereGrid::cell_of(const SpherePoint& p) const noexcept { return cell_of(p.to_unit_vector()); }

double SphereGrid::center_height(int cell) const noexcept {
  const int band = cell / n_sectors_;
  return -1.0 + (2.0 * band + 1.0) / n_bands_;
}

double SphereGrid::center_azimuth(int cell) const noexcept {
  const int sector = cell % n_sectors_;
  return kTwoPi * (sector + 0.5) / n_sectors_;
}

std::array<double, 3> SphereGrid::node_vector(int cell) const noexcept {
  if (n_bands_ > 1) {
    const int band = cell / n_sectors_;
    if (band == 0) return {0.0, 0.0, -1.0};
    if (band == n_bands_ - 1) return {0.0, 0.0, 1.0};
  }
  return center_vector(cell);
}

SpherePoint SphereGrid::node(int cell) const noexcept { return SpherePoint::from_unit_vector(node_vector(cell)); }

std::array<double, 3> SphereGrid::center_vector(int cell) const noexcept {
  const double h = center_height(cell);
  const double phi = center_azimuth(cell);
  const double s = std::sqrt(std::max(0.0, 1.0 - h * h));
  return {s * std::cos(phi), s * std::sin(phi), h};
}

SpherePoint SphereGrid::center(int cell) const noexcept {
  return SpherePoint::from_unit_vector(center_vector(cell));
}

SpherePoint SphereGrid::point_in_cell(int cell, double u, double v) const noexcept {
  const auto [band, sector] = band_sector(cell);
  const double h = -1.0 + 2.0 * (band + u) / n_bands_;
  const double phi = kTwoPi * (sector + v) / n_sectors_;
  const double s = std::sqrt(std::max(0.0, 1.0 - h * h));
  return SpherePoint::from_unit_vector({s * std::cos(phi), s * std::sin(phi), h});
}

std::vector<int> SphereGrid::ring(int cell) const {
  const auto [band, sector] = band_sector(cell);
  std::vector<int> out;
  for (int b = band - 1; b <= band + 1; ++b) {
    if (b < 0 || b >= n_bands_) continue;
    if (b == band && (b == 0 || b == n_bands_ - 1)) {
      // Polar cap cells all meet at the pole.
      for (int s = 0; s < n_sectors_; ++s) out.push_back(index(b, s));
      continue;
    }
    for (int ds = -1; ds <= 1; ++ds) {
      const int s = ((sector + ds) % n_sectors_ + n_sectors_) % n_sectors_;
      out.push_back(index(b, s));
    }
  }
  return normalized(std::move(out));
}

CellSet normalized(CellSet cells) {
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  return cells;
}

CellSet dilate(const SphereGrid& grid, const CellSet& cells) {
  CellSet out;
  for (int c : cells) {
    const auto r = grid.ring(c);
    out.insert(out.end(), r.begin(), r.end());
  }
  return normalized(std::move(out));
}

bool contains(const CellSet& cells, int cell) noexcept {
  return std::binary_search(cells.begin(), cells.end(), cell);
}

CellSet annulus_cells(const SphereGrid& grid, double r_min, double r_max) {
  const double h_lo = height_of_radius(r_min);
  const double h_hi = height_of_radius(r_max);
  CellSet out;
  for (int b = 0; b < grid.n_bands(); ++b) {
    const double lo = -1.0 + 2.0 * b / grid.n_bands();
    const double hi = -1.0 + 2.0 * (b + 1) / grid.n_bands();
    if (hi < h_lo || lo > h_hi) continue;
    for (int s = 0; s < grid.n_sectors(); ++s) out.push_back(grid.index(b, s));
  }
  return out;
}

}  // namespace corrdyn
