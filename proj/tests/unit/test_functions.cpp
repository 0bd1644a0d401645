#include <gtest/gtest.h>

#include "corrdyn/error.hpp"
#include "corrdyn/functions.hpp"

using namespace corrdyn;

TEST(Functions, Builtins) {
  const auto z = SpherePoint::from_complex({0.5, -2.0});
  const double n = 1.0 + 0.25 + 4.0;
  EXPECT_DOUBLE_EQ(SphereFunction::parse("zero")(z), 0.0);
  EXPECT_DOUBLE_EQ(SphereFunction::parse("const:0.7")(z), 0.7);
  EXPECT_NEAR(SphereFunction::parse("re")(z), 1.0 / n, 1e-15);
  EXPECT_NEAR(SphereFunction::parse("im")(z), -4.0 / n, 1e-15);
  EXPECT_NEAR(SphereFunction::parse("log_abs")(z), std::log(std::abs(cplx(0.5, -2.0))), 1e-15);
}

TEST(Functions, ReAgreesWithRealPartOnCircle) {
  const auto z = SpherePoint::from_complex(std::polar(1.0, 0.8));
  EXPECT_NEAR(SphereFunction::parse("re")(z), std::cos(0.8), 1e-15);
}

TEST(Functions, LogAbsClamped) {
  const auto f = SphereFunction::parse("log_abs");
  EXPECT_DOUBLE_EQ(f(SpherePoint::from_complex(0.0)), -10.0);
  EXPECT_DOUBLE_EQ(f(SpherePoint::infinity()), 10.0);
}

TEST(Functions, ConstantFlag) {
  EXPECT_EQ(SphereFunction::constant(0.0).name(), "zero");
  EXPECT_EQ(SphereFunction::parse("const:2.5").constant_value().value(), 2.5);
  EXPECT_FALSE(SphereFunction::parse("re").constant_value().has_value());
}

TEST(Functions, Tabulated) {
  const SphereGrid g(3, 4);
  std::vector<double> v(12);
  for (int i = 0; i < 12; ++i) v[i] = i;
  const auto f = SphereFunction::tabulated(g, v);
  for (int c = 0; c < 12; ++c) EXPECT_DOUBLE_EQ(f(g.center(c)), c);
  EXPECT_THROW(SphereFunction::tabulated(g, {1.0, 2.0}), Error);
}

TEST(Functions, UnknownNameRejected) {
  try {
    SphereFunction::parse("sin");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ParseError);
  }
}
