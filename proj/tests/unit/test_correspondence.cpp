#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "corrdyn/correspondence.hpp"
#include "corrdyn/error.hpp"

using namespace corrdyn;

namespace {

const char* kZ2 = "1\n2 0 1 0\n0 1 -1 0\n";
const char* kZ2Z3 = "1\n2 0 1 0\n0 1 -1 0\n1\n3 0 1 0\n0 1 -1 0\n";

bool has_point(const ImageSet& s, cplx z, int component = 0, double tol = 1e-10) {
  return std::any_of(s.points.begin(), s.points.end(), [&](const BranchPoint& b) {
    return (component == 0 || b.component == component) && sph_dist(b.point, SpherePoint::from_complex(z)) < tol;
  });
}

// Generic fiber size counted by solving independently at random points.
int fiber_count(const Correspondence& c, bool forward, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  int count = -1;
  for (int i = 0; i < 10; ++i) {
    const auto p = SpherePoint::from_complex({u(rng), u(rng)});
    const auto s = forward ? c.forward_images(p) : c.backward_images(p);
    const int n = s.total_multiplicity();
    if (count >= 0 && n != count) return -1;
    count = n;
  }
  return count;
}

Errc error_of(const std::string& text) {
  try {
    Correspondence::parse(text);
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::InvalidArgument;
}

}  // namespace

TEST(Correspondence, DegreesOfSquare) {
  const auto c = Correspondence::parse(kZ2);
  EXPECT_EQ(c.size(), 1);
  EXPECT_EQ(c.d_fwd(), 1);
  EXPECT_EQ(c.d_top(), 2);
  EXPECT_EQ(fiber_count(c, true, 1), 1);
  EXPECT_EQ(fiber_count(c, false, 2), 2);
}

TEST(Correspondence, DegreesOfTwoComponents) {
  const auto c = Correspondence::parse(kZ2Z3);
  EXPECT_EQ(c.size(), 2);
  EXPECT_EQ(c.d_fwd(), 2);
  EXPECT_EQ(c.d_top(), 5);
  EXPECT_EQ(fiber_count(c, true, 3), 2);
  EXPECT_EQ(fiber_count(c, false, 4), 5);
}

TEST(Correspondence, MultiplicityScalesDegrees) {
  const auto c = Correspondence::parse("2\n2 0 1 0\n0 1 -1 0\n");
  EXPECT_EQ(c.d_fwd(), 2);
  EXPECT_EQ(c.d_top(), 4);
}

TEST(Correspondence, EmptyInputRejected) {
  EXPECT_EQ(error_of(""), Errc::ParseError);
  EXPECT_EQ(error_of("# nothing\n"), Errc::ParseError);
  EXPECT_EQ(error_of("1\n2 0 x 0\n"), Errc::ParseError);
}

TEST(Correspondence, ComponentWithoutWRejected) {
  EXPECT_EQ(error_of("1\n2 0 1 0\n0 0 -1 0\n"), Errc::InvalidComponent);
  EXPECT_EQ(error_of("1\n0 1 1 0\n0 0 -1 0\n"), Errc::InvalidComponent);
}

TEST(Correspondence, ForwardImages) {
  const auto c = Correspondence::parse(kZ2);
  const auto s = c.forward_images(SpherePoint::from_complex(2.0));
  ASSERT_EQ(s.total_multiplicity(), 1);
  EXPECT_TRUE(has_point(s, 4.0));
  const auto inf = c.forward_images(SpherePoint::infinity());
  ASSERT_EQ(inf.points.size(), 1u);
  EXPECT_TRUE(inf.points[0].point.is_infinity());

  const auto two = Correspondence::parse(kZ2Z3).forward_images(SpherePoint::from_complex(2.0));
  EXPECT_TRUE(has_point(two, 4.0, 1));
  EXPECT_TRUE(has_point(two, 8.0, 2));
}

TEST(Correspondence, BackwardImages) {
  const auto c = Correspondence::parse(kZ2);
  const auto s = c.backward_images(SpherePoint::from_complex(4.0));
  EXPECT_TRUE(has_point(s, 2.0));
  EXPECT_TRUE(has_point(s, -2.0));
  const auto crit = c.backward_images(SpherePoint::from_complex(0.0));
  ASSERT_EQ(crit.points.size(), 1u);
  EXPECT_EQ(crit.points[0].multiplicity, 2);
  EXPECT_TRUE(crit.degenerate);

  const auto two = Correspondence::parse(kZ2Z3).backward_images(SpherePoint::from_complex(1.0));
  EXPECT_EQ(two.total_multiplicity(), 5);
  EXPECT_TRUE(has_point(two, 1.0, 1));
  EXPECT_TRUE(has_point(two, -1.0, 1));
  for (int k = 0; k < 3; ++k) EXPECT_TRUE(has_point(two, std::polar(1.0, 2 * std::numbers::pi * k / 3), 2));
}

TEST(Correspondence, BranchOrderIsCanonical) {
  const auto c = Correspondence::parse(kZ2);
  const auto s = c.backward_images(SpherePoint::from_complex(4.0));
  ASSERT_EQ(s.points.size(), 2u);
  EXPECT_EQ(s.points[0].branch_index, 1);
  EXPECT_EQ(s.points[1].branch_index, 2);
  // Argument order: 2 (arg 0) before -2 (arg pi).
  EXPECT_NEAR(s.points[0].point.to_complex().real(), 2.0, 1e-12);
}

TEST(Correspondence, IncidenceResidualSmallOnGraph) {
  const auto c = Correspondence::parse(kZ2Z3);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int i = 0; i < 20; ++i) {
    const auto x = SpherePoint::from_complex({u(rng), u(rng)});
    for (const auto& b : c.forward_images(x).points) {
      EXPECT_LT(c.component(b.component).incidence_residual(x, b.point), 1e-12);
    }
  }
}

TEST(Correspondence, TextRoundTrip) {
  const auto c = Correspondence::parse(kZ2Z3);
  const auto d = Correspondence::parse(c.to_text());
  EXPECT_EQ(d.d_fwd(), c.d_fwd());
  EXPECT_EQ(d.d_top(), c.d_top());
}

TEST(Correspondence, MobiusIsExpansiveNowhereButSquareIsOnCircle) {
  const auto c = Correspondence::parse(kZ2);
  std::vector<std::pair<SpherePoint, SpherePoint>> pairs;
  for (int k = 0; k < 32; ++k) {
    const double t = 2 * std::numbers::pi * k / 32;
    pairs.emplace_back(SpherePoint::from_complex(std::polar(1.0, t)), SpherePoint::from_complex(std::polar(1.0, t + 0.01)));
  }
  const auto r = expansivity_probe(c, pairs, 32);
  EXPECT_TRUE(r.is_expansive);
  EXPECT_NEAR(r.lambda_estimate, 2.0, 0.01);

  const auto rot = Correspondence::parse("1\n1 0 0.54030230586813977 0.8414709848078965\n0 1 -1 0\n");
  EXPECT_FALSE(expansivity_probe(rot, pairs, 32).is_expansive);
}

TEST(Correspondence, ProbeNeedsPairs) {
  const auto c = Correspondence::parse(kZ2);
  std::vector<std::pair<SpherePoint, SpherePoint>> far{{SpherePoint::from_complex(0.0), SpherePoint::infinity()}};
  try {
    expansivity_probe(c, far, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InsufficientPairs);
  }
}
