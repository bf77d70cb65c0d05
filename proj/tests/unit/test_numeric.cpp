#include <gtest/gtest.h>

#include <cmath>

#include "spalloc/error.hpp"
#include "spalloc/numeric.hpp"

using namespace spalloc;

TEST(GoldenSection, FindsInteriorMaximumOfParabola) {
  const Extremum e = golden_section_max([](double x) { return -(x - 0.3) * (x - 0.3) + 2.0; }, 0.0, 1.0);
  EXPECT_NEAR(e.x, 0.3, 1e-6);
  EXPECT_NEAR(e.value, 2.0, 1e-12);
}

TEST(GoldenSection, ReturnsEndpointForMonotoneFunction) {
  const Extremum up = golden_section_max([](double x) { return x; }, 0.0, 1.0);
  EXPECT_DOUBLE_EQ(up.x, 1.0);
  const Extremum down = golden_section_max([](double x) { return -x; }, 0.0, 1.0);
  EXPECT_DOUBLE_EQ(down.x, 0.0);
}

TEST(GoldenSection, LogConcaveProduct) {
  // x (1 - x)^2 peaks at 1/3
  const Extremum e = golden_section_max([](double x) { return std::log(x) + 2.0 * std::log(1.0 - x); }, 0.0, 1.0);
  EXPECT_NEAR(e.x, 1.0 / 3.0, 1e-6);
}

TEST(Bisect, FindsRoot) {
  EXPECT_NEAR(bisect([](double x) { return x * x - 2.0; }, 0.0, 2.0, 1e-14), std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(bisect([](double x) { return 1.0 - x; }, 0.0, 3.0, 1e-14), 1.0, 1e-12);
}

TEST(Bisect, RejectsUnbracketedRoot) {
  EXPECT_THROW(bisect([](double x) { return x * x + 1.0; }, -1.0, 1.0), NumericalError);
}

TEST(AdaptiveSimpson, MatchesKnownIntegrals) {
  EXPECT_NEAR(adaptive_simpson([](double x) { return std::sin(x); }, 0.0, M_PI), 2.0, 1e-9);
  EXPECT_NEAR(adaptive_simpson([](double x) { return 1.0 / x; }, 1.0, std::exp(1.0)), 1.0, 1e-9);
  EXPECT_NEAR(adaptive_simpson([](double x) { return std::abs(x - 0.4); }, 0.0, 1.0), 0.08 + 0.18, 1e-9);
}
