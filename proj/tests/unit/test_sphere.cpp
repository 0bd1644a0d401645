#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "corrdyn/sphere.hpp"

using namespace corrdyn;

namespace {

// Chordal distance computed from the stereographic embedding.
double embed_dist(cplx a, cplx b) {
  auto v = [](cplx z) {
    const double n = 1.0 + std::norm(z);
    return std::array<double, 3>{2 * z.real() / n, 2 * z.imag() / n, (std::norm(z) - 1) / n};
  };
  const auto p = v(a), q = v(b);
  return std::hypot(p[0] - q[0], p[1] - q[1], p[2] - q[2]);
}

}  // namespace

TEST(Sphere, InfinityIsNorthPole) {
  const auto v = SpherePoint::infinity().to_unit_vector();
  EXPECT_DOUBLE_EQ(v[2], 1.0);
  EXPECT_TRUE(SpherePoint::infinity().is_infinity());
  EXPECT_FALSE(SpherePoint::from_complex(3.0).is_infinity());
}

TEST(Sphere, DistanceMatchesEmbedding) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const cplx a{g(rng), g(rng)}, b{g(rng), g(rng)};
    EXPECT_NEAR(sph_dist(SpherePoint::from_complex(a), SpherePoint::from_complex(b)), embed_dist(a, b), 1e-12);
  }
}

TEST(Sphere, ZeroToInfinityIsDiameter) {
  EXPECT_NEAR(sph_dist(SpherePoint::from_complex(0.0), SpherePoint::infinity()), 2.0, 1e-15);
  EXPECT_NEAR(sph_dist(SpherePoint::from_complex(1.0), SpherePoint::from_complex(-1.0)), 2.0, 1e-15);
}

TEST(Sphere, LargeValuesApproachInfinity) {
  EXPECT_NEAR(sph_dist(SpherePoint::from_complex(1e8), SpherePoint::infinity()), 2e-8, 1e-14);
}

TEST(Sphere, UnitVectorRoundTrip) {
  for (cplx z : {cplx(0.3, -0.2), cplx(5.0, 7.0), cplx(-1.0, 0.0), cplx(0.0, 0.0)}) {
    const auto p = SpherePoint::from_complex(z);
    const auto q = SpherePoint::from_unit_vector(p.to_unit_vector());
    EXPECT_LT(sph_dist(p, q), 1e-13);
  }
  EXPECT_TRUE(SpherePoint::from_unit_vector({0.0, 0.0, 1.0}).is_infinity());
}

TEST(Sphere, ChartsAgree) {
  const cplx z{2.5, -1.5};
  const auto p = SpherePoint::from_chart(Chart::Reciprocal, 1.0 / z);
  EXPECT_LT(std::abs(p.to_complex() - z), 1e-12);
  EXPECT_NEAR(sph_dist(p, SpherePoint::from_complex(z)), 0.0, 1e-15);
}
