#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "corrdyn/error.hpp"
#include "corrdyn/pressure.hpp"

using namespace corrdyn;

namespace {

const char* kPair = "1\n0 0 1 0\n1 0 1 0\n0 1 -1 0\n1\n1 0 2 0\n0 1 -1 0\n";
const char* kRotation = "1\n1 0 0.54030230586813977 0.8414709848078965\n0 1 -1 0\n";

const std::vector<ScheduleEntry> kSchedule{{4, 0.05}, {6, 0.05}};

Errc code_of(const std::vector<ScheduleEntry>& schedule, int start_points) {
  try {
    entropy_estimate(Correspondence::parse(kPair), schedule, start_points, 1);
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::NotConverged;
}

}  // namespace

TEST(Pressure, RotationHasZeroEntropy) {
  const auto r = entropy_estimate(Correspondence::parse(kRotation), kSchedule, 100, 1);
  EXPECT_NEAR(r.pressure, 0.0, 1e-9);
}

TEST(Pressure, FullShiftHasEntropyLog2) {
  const auto r = entropy_estimate(Correspondence::parse(kPair), kSchedule, 100, 1);
  EXPECT_NEAR(r.pressure, std::log(2.0), 0.05);
  EXPECT_EQ(r.function, "zero");
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_GE(r.rows[1].separated, r.rows[0].separated);
}

TEST(Pressure, ConstantShiftIsExact) {
  const auto c = Correspondence::parse(kPair);
  const auto h = entropy_estimate(c, kSchedule, 100, 3);
  const auto p = pressure_estimate(c, SphereFunction::constant(0.7), kSchedule, 100, 3);
  EXPECT_NEAR(p.pressure, h.pressure + 0.7, 1e-10);
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    EXPECT_NEAR(p.rows[i].sep_log_sum, h.rows[i].sep_log_sum + 0.7 * p.rows[i].n, 1e-10);
  }
}

TEST(Pressure, MonotoneInFunction) {
  const auto c = Correspondence::parse(kPair);
  const auto lo = pressure_estimate(c, SphereFunction::parse("im"), kSchedule, 100, 3);
  const auto hi = pressure_estimate(c, SphereFunction::constant(1.0), kSchedule, 100, 3);
  EXPECT_LE(lo.pressure_last, hi.pressure_last + 1e-12);
}

TEST(Pressure, SameSeedSameReport) {
  const auto c = Correspondence::parse(kPair);
  const auto a = pressure_estimate(c, SphereFunction::parse("re"), kSchedule, 50, 9);
  const auto b = pressure_estimate(c, SphereFunction::parse("re"), kSchedule, 50, 9);
  EXPECT_EQ(a.pressure, b.pressure);
}

TEST(Pressure, WorkersDoNotChangeResult) {
  const auto c = Correspondence::parse(kPair);
  PressureOptions one, four;
  four.workers = 4;
  const auto a = pressure_estimate(c, SphereFunction::parse("re"), kSchedule, 50, 9, one);
  const auto b = pressure_estimate(c, SphereFunction::parse("re"), kSchedule, 50, 9, four);
  EXPECT_DOUBLE_EQ(a.pressure, b.pressure);
}

TEST(Pressure, ScheduleValidation) {
  EXPECT_EQ(code_of({}, 10), Errc::ScheduleEmpty);
  EXPECT_EQ(code_of({{0, 0.1}}, 10), Errc::InvalidArgument);
  EXPECT_EQ(code_of({{2, 0.0}}, 10), Errc::InvalidArgument);
  EXPECT_EQ(code_of({{4, 0.1}, {2, 0.1}}, 10), Errc::InvalidArgument);
  EXPECT_EQ(code_of({{2, 0.1}}, 0), Errc::InvalidArgument);
}

TEST(Pressure, StartPointsIncludeFocus) {
  StartRegion circle;
  circle.count = 16;
  const std::vector<StartRegion> focus{circle};
  const auto pts = sample_start_points(0, focus, 1);
  ASSERT_EQ(pts.size(), 16u);
  for (const auto& p : pts) EXPECT_NEAR(std::abs(p.to_complex()), 1.0, 1e-14);
  EXPECT_NEAR(std::arg(pts[4].to_complex()), std::numbers::pi / 2, 1e-14);
  const auto grid_pts = sample_start_points(200, {}, 1);
  EXPECT_NEAR(static_cast<double>(grid_pts.size()), 200.0, 20.0);
}
