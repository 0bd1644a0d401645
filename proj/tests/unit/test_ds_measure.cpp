#include <gtest/gtest.h>

#include <cmath>

#include "corrdyn/ds_measure.hpp"
#include "corrdyn/error.hpp"

using namespace corrdyn;

namespace {

const char* kZ2 = "1\n2 0 1 0\n0 1 -1 0\n";
const char* kSqrt = "1\n1 0 1 0\n0 2 -1 0\n";
const SphereGrid kGrid(33, 64);

template <class F>
Errc code_of(F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::InvalidArgument;
}

}  // namespace

TEST(DsMeasure, LevelsAreProbabilityMeasures) {
  const auto c = Correspondence::parse(kZ2);
  const auto r = pullback_iterate(c, kGrid, SpherePoint::from_complex({0.5, 0.3}), 6, 8192, 1);
  ASSERT_EQ(r.levels.size(), 7u);
  for (const auto& l : r.levels) EXPECT_NEAR(l.mass(), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(r.levels[0].weight(kGrid.cell_of(SpherePoint::from_complex({0.5, 0.3}))), 1.0);
}

TEST(DsMeasure, FirstLevelIsSquareRoots) {
  const auto c = Correspondence::parse(kZ2);
  const auto r = pullback_iterate(c, kGrid, SpherePoint::from_complex(4.0), 1, 8192, 1);
  EXPECT_NEAR(r.levels[1].weight(kGrid.cell_of(SpherePoint::from_complex(2.0))), 0.5, 1e-15);
  EXPECT_NEAR(r.levels[1].weight(kGrid.cell_of(SpherePoint::from_complex(-2.0))), 0.5, 1e-15);
}

TEST(DsMeasure, EquidistributesOnCircle) {
  const auto c = Correspondence::parse(kZ2);
  const auto a = pullback_iterate(c, kGrid, SpherePoint::from_complex({0.5, 0.3}), 12, 8192, 1);
  const auto b = pullback_iterate(c, kGrid, SpherePoint::from_complex({-3.0, 2.0}), 12, 8192, 2);
  const auto ring = annulus_cells(kGrid, 0.95, 1.05);
  EXPECT_GE(a.levels.back().mass_on(ring), 0.99);
  EXPECT_GE(b.levels.back().mass_on(ring), 0.99);
  EXPECT_LE(measure_distance(a.levels.back(), b.levels.back()), 0.02);
}

TEST(DsMeasure, CriticalStartIsResampled) {
  const auto c = Correspondence::parse(kZ2);
  const auto r = pullback_iterate(c, kGrid, SpherePoint::from_complex(0.0), 3, 8192, 5);
  EXPECT_GE(r.resamples, 1);
  EXPECT_GT(sph_dist(r.start, SpherePoint::from_complex(0.0)), 0.0);
  EXPECT_LE(sph_dist(r.start, SpherePoint::from_complex(0.0)), 0.1 + 1e-12);
}

TEST(DsMeasure, RequiresBackwardDominance) {
  const auto c = Correspondence::parse(kSqrt);
  EXPECT_EQ(code_of([&] { pullback_iterate(c, kGrid, SpherePoint::from_complex(0.5), 3, 100, 1); }),
            Errc::PreconditionViolated);
}

TEST(DsMeasure, CapThins) {
  const auto c = Correspondence::parse(kZ2);
  const auto r = pullback_iterate(c, kGrid, SpherePoint::from_complex({0.5, 0.3}), 8, 64, 1);
  EXPECT_TRUE(r.thinned);
  EXPECT_NEAR(r.levels.back().mass(), 1.0, 1e-12);
}

TEST(DsMeasure, SupportIsCircleBand) {
  const auto c = Correspondence::parse(kZ2);
  const auto r = pullback_iterate(c, kGrid, SpherePoint::from_complex({0.5, 0.3}), 12, 8192, 1);
  const auto s = ds_support(r.levels, 0.5, 0.02);
  EXPECT_LE(s.certificate, 0.02);
  ASSERT_FALSE(s.core.empty());
  for (int cell : s.core) EXPECT_EQ(kGrid.band_sector(cell).first, 16);
  EXPECT_EQ(s.cells, dilate(kGrid, s.core));
  const auto inv = check_backward_invariance(c, kGrid, s.core, 500, 3);
  EXPECT_TRUE(inv.passed);
}

TEST(DsMeasure, SupportErrors) {
  const auto c = Correspondence::parse(kZ2);
  const auto r = pullback_iterate(c, kGrid, SpherePoint::from_complex({0.5, 0.3}), 2, 8192, 1);
  EXPECT_EQ(code_of([&] { ds_support({r.levels[0]}, 0.5); }), Errc::InvalidArgument);
  EXPECT_EQ(code_of([&] { ds_support(r.levels, 0.5, 1e-6); }), Errc::NotConverged);
}

TEST(DsMeasure, InvariantPathsStayOnCircle) {
  const auto c = Correspondence::parse(kZ2);
  CellSet band;
  for (int s = 0; s < 64; ++s) band.push_back(kGrid.index(16, s));
  const auto p = invariant_forward_paths(c, kGrid, band, kGrid.center(band[3]), 10, 16);
  ASSERT_FALSE(p.none_found);
  ASSERT_FALSE(p.paths.empty());
  for (const auto& x : p.paths[0].points) EXPECT_NEAR(std::abs(x.to_complex()), 1.0, 1e-9);
  EXPECT_EQ(code_of([&] { invariant_forward_paths(c, kGrid, band, SpherePoint::from_complex(0.0), 3, 4); }),
            Errc::PreconditionViolated);
}
