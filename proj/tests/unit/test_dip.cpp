#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "spalloc/dip.hpp"
#include "spalloc/error.hpp"
#include "spalloc/numeric.hpp"
#include "spalloc/two_item.hpp"
#include "support/oracles.hpp"

using namespace spalloc;

using namespace spalloc::oracle;

TEST(CumulativeCost, Examples) {
  const PriceSchedule even = even_split_schedule(2);
  EXPECT_DOUBLE_EQ(cumulative_cost(even, 0, 0.5), 0.0);
  EXPECT_EQ(cumulative_cost(even, 0, 0.6), std::numeric_limits<double>::infinity());
  PriceSchedule rect;
  rect.per_item.emplace_back(std::vector<double>{0.0, 0.2, 0.7, 1.0},
                             std::vector<Piece>{Piece::constant(0.0), Piece::constant(1.5), Piece::infinite()});
  EXPECT_NEAR(cumulative_cost(rect, 0, 0.6) - cumulative_cost(rect, 0, 0.2), 1.5 * 0.4, 1e-15);
  EXPECT_THROW(cumulative_cost(rect, 1, 0.5), InputError);
  EXPECT_THROW(cumulative_cost(rect, 0, 1.5), InputError);
}

TEST(OptimalPurchase, EvenSplitBuysHalfOfEverything) {
  const Purchase p = optimal_purchase(UtilityVector({0.2, 0.5, 0.3}), even_split_schedule(3));
  for (double q : p.quantities) EXPECT_DOUBLE_EQ(q, 0.5);
  EXPECT_DOUBLE_EQ(p.spent, 0.0);
}

TEST(OptimalPurchase, ZeroWeightItemNotBoughtAtPositivePrice) {
  PriceSchedule s;
  for (int j = 0; j < 2; ++j)
    s.per_item.emplace_back(std::vector<double>{0.0, 1.0}, std::vector<Piece>{Piece::constant(0.5)});
  const Purchase p = optimal_purchase(UtilityVector({1.0, 0.0}), s);
  EXPECT_NEAR(p.quantities[0], 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(p.quantities[1], 0.0);
  EXPECT_NEAR(p.spent, 0.5, 1e-12);
}

TEST(OptimalPurchase, MatchesKnapsackOracle) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> t(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const PriceSchedule s = random_schedule(rng);
    const UtilityVector u = UtilityVector::of_two(t(rng));
    const Purchase p = optimal_purchase(u, s);
    const double got = u[0] * p.quantities[0] + u[1] * p.quantities[1];
    const double oracle = knapsack_oracle(u, s);
    EXPECT_LE(p.spent, 1.0 + 1e-9);
    EXPECT_GE(got, oracle - 1e-9) << "schedule " << k;
    EXPECT_NEAR(got, oracle, 1e-3) << "schedule " << k;
  }
}

TEST(FiveSixthsSchedule, ConstantHasClosedForm) {
  EXPECT_NEAR(five_sixths_price_constant(), 1.0 / (1.0 - std::log(2.5) / 3.0), 1e-15);
  const PriceSchedule s = five_sixths_price_schedule(0.3);
  const double tau = 0.5 - f_five_sixths(0.3);
  EXPECT_NEAR(s.per_item[0](tau + 0.05), five_sixths_price_constant(), 1e-12);
}

TEST(FiveSixthsSchedule, ShapeAndBudget) {
  for (int k = 0; k <= 20; ++k) {
    const double t2 = k / 20.0;
    const PriceSchedule s = five_sixths_price_schedule(t2);
    EXPECT_NO_THROW(s.validate());
    const auto& p = s.per_item[0];
    const double tau = 0.5 - f_five_sixths(t2);
    if (tau > 1e-9) EXPECT_EQ(p(tau * 0.999), 0.0);
    EXPECT_GT(p(tau + 1e-9), 0.0);
    EXPECT_NEAR(upper_finite(p), std::min(1.0, 0.5 + tau), 1e-15);
    EXPECT_NEAR(upper_finite(p), 1.0 - f_five_sixths(t2), 1e-15);
    if (0.5 + tau < 1.0 - 1e-6) EXPECT_TRUE(std::isinf(p(0.5 + tau + 1e-6)));
    EXPECT_NEAR(p.integral(0.0, upper_finite(p)), 1.0, 1e-9);
    // budget integral by quadrature, independent of the closed-form primitive
    double quad = 0.0;
    const auto& bp = p.breakpoints();
    for (std::size_t i = 0; i + 1 < bp.size() && bp[i] < upper_finite(p); ++i) {
      const double hi = std::min(bp[i + 1], upper_finite(p));
      if (hi > bp[i]) quad += adaptive_simpson([&](double y) { return p(y); }, bp[i], hi - 1e-13, 1e-12);
    }
    EXPECT_NEAR(quad, 1.0, 1e-8);
  }
}

TEST(FiveSixthsSchedule, InverseMatchesClosedForm) {
  for (double t2 : {0.0, 0.15, 0.3, 0.5, 0.77, 1.0}) {
    const double ft = f_five_sixths(t2);
    const double tau = 0.5 - ft;
    const double lo = f_five_sixths(0.5) + tau, hi = 0.5 + tau;
    for (int k = 0; k <= 10; ++k) {
      const double y = lo + (hi - lo) * k / 10.0;
      const double z = five_sixths_g(t2, y);
      EXPECT_NEAR(z, std::exp(6.0 * (1.0 - ft - y)) / 5.0, 1e-12);
      EXPECT_GE(z, 0.2 - 1e-15);
      EXPECT_LE(z, 0.5 + 1e-15);
      if (hi <= 1.0 && y < hi) {
        const double c = five_sixths_price_constant();
        EXPECT_NEAR(five_sixths_price_schedule(t2).per_item[0](y), c / z - c, 1e-9);
      }
    }
  }
}

TEST(FiveSixthsSchedule, PurchaseMatchesMechanism) {
  const auto m = five_sixths_mechanism();
  for (int i = 0; i <= 20; ++i) {
    for (int j = 0; j <= 20; ++j) {
      const double t1 = i / 20.0, t2 = j / 20.0;
      const Purchase p = optimal_purchase(UtilityVector::of_two(t1), five_sixths_price_schedule(t2));
      EXPECT_NEAR(p.quantities[0], m.a(t1, t2), 1e-6);
      EXPECT_NEAR(p.quantities[1], m.a_other(t1, t2), 1e-6);
      EXPECT_LE(p.spent, 1.0 + 1e-9);
    }
  }
}

TEST(FiveSixthsSchedule, TruthfulPurchaseIsBestResponse) {
  for (int j = 0; j <= 20; j += 4) {
    const PriceSchedule s = five_sixths_price_schedule(j / 20.0);
    std::vector<Purchase> by_report;
    for (int r = 0; r <= 100; ++r) by_report.push_back(optimal_purchase(UtilityVector::of_two(r / 100.0), s));
    for (int i = 0; i <= 100; i += 5) {
      const UtilityVector u = UtilityVector::of_two(i / 100.0);
      const double honest = u[0] * by_report[i].quantities[0] + u[1] * by_report[i].quantities[1];
      for (const auto& lie : by_report) EXPECT_GE(honest, u[0] * lie.quantities[0] + u[1] * lie.quantities[1] - 1e-8);
    }
  }
}

TEST(PriceSchedule, ValidateRejectsDecreasingPrices) {
  PriceSchedule s;
  s.per_item.emplace_back(std::vector<double>{0.0, 1.0}, std::vector<Piece>{Piece::affine(2.0, -1.0)});
  EXPECT_THROW(s.validate(), InputError);
  PriceSchedule short_domain;
  short_domain.per_item.emplace_back(std::vector<double>{0.0, 0.5}, std::vector<Piece>{Piece::constant(1.0)});
  EXPECT_THROW(short_domain.validate(), InputError);
}
