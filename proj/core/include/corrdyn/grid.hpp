#pragma once

#include <array>
#include <utility>
#include <vector>

#include "corrdyn/sphere.hpp"

namespace corrdyn {

/// Equal-area partition of the unit sphere into n_bands x n_sectors cells.
///
/// Bands have equal height in h = cos(polar angle) (Archimedes' projection),
/// sectors have equal azimuth, so every cell has area 4 pi / size(). Band 0
/// touches the south pole (z = 0), the last band the north pole (infinity).
/// Cell indices are row-major: cell = band * n_sectors + sector. A point on a
/// cell boundary belongs to the lower-indexed cell.
class SphereGrid {
 public:
  SphereGrid() = default;
  SphereGrid(int n_bands, int n_sectors);

  int n_bands() const noexcept { return n_bands_; }
  int n_sectors() const noexcept { return n_sectors_; }
  int size() const noexcept { return n_bands_ * n_sectors_; }

  int index(int band, int sector) const noexcept { return band * n_sectors_ + sector; }
  std::pair<int, int> band_sector(int cell) const noexcept { return {cell / n_sectors_, cell % n_sectors_}; }

  int cell_of(const SpherePoint& p) const noexcept;
  int cell_of(const std::array<double, 3>& v) const noexcept;

  /// Height and azimuth (radians, [0, 2 pi)) of the cell centre.
  double center_height(int cell) const noexcept;
  double center_azimuth(int cell) const noexcept;
  std::array<double, 3> center_vector(int cell) const noexcept;
  SpherePoint center(int cell) const noexcept;

  /// Integration node of a cell: its centre, or the pole for cells touching a pole (when n_bands > 1).
  std::array<double, 3> node_vector(int cell) const noexcept;
  SpherePoint node(int cell) const noexcept;

  /// Point at fractional position (u, v) in [0,1)^2 of the cell's (height, azimuth) box.
  SpherePoint point_in_cell(int cell, double u, double v) const noexcept;

  /// Cells sharing an edge or corner with `cell`, plus the cell itself.
  std::vector<int> ring(int cell) const;

  bool operator==(const SphereGrid&) const = default;

 private:
  int n_bands_ = 0;
  int n_sectors_ = 0;
};

/// Sorted, duplicate-free list of cell indices.
using CellSet = std::vector<int>;

CellSet normalized(CellSet cells);
CellSet dilate(const SphereGrid& grid, const CellSet& cells);
bool contains(const CellSet& cells, int cell) noexcept;

/// Cells whose (height, azimuth) box meets the annulus r_min <= |z| <= r_max.
CellSet annulus_cells(const SphereGrid& grid, double r_min, double r_max);

}  // namespace corrdyn
