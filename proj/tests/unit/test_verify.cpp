#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "spalloc/error.hpp"
#include "spalloc/lp/solve.hpp"
#include "spalloc/multi_item.hpp"
#include "spalloc/verify.hpp"

using namespace spalloc;

namespace {

// Best (or worst) utility of agent 1 with type t1 over full allocations whose welfare
// against an opponent of type t2 reaches h times the first best.
double utility_lp(double t1, double t2, double h, lp::Sense sense) {
  lp::LPInstance inst;
  const int x1 = inst.add_variable("x1", 0.0, 1.0);
  const int x2 = inst.add_variable("x2", 0.0, 1.0);
  const double fb = std::max(t1, t2) + std::max(1.0 - t1, 1.0 - t2);
  const lp::Term sw[] = {{x1, t1 - t2}, {x2, (1.0 - t1) - (1.0 - t2)}};
  inst.add_row("comp_req", sw, lp::Relation::greater_equal, h * fb - 1.0, lp::RowTag::competitiveness);
  const lp::Term obj[] = {{x1, t1}, {x2, 1.0 - t1}};
  inst.set_objective(sense, obj);
  const lp::LPSolution sol = lp::solve(inst);
  EXPECT_EQ(sol.status, lp::SolveStatus::optimal);
  return sol.objective_value;
}

MechanismHandle first_best_by_bids() {
  return {[](const UtilityVector& b1, const UtilityVector& b2) { return first_best(b1, b2).allocation; },
          "first-best-by-bids"};
}

}  // namespace

TEST(SpDirect, FiveSixthsPasses) {
  const SPReport r = check_sp_direct(five_sixths_mechanism().handle(), 50, 1e-9);
  EXPECT_TRUE(r.passed);
  EXPECT_LE(r.max_regret, 1e-9);
  EXPECT_EQ(r.checks, 2L * 51 * 51 * 51);
}

TEST(SpDirect, DictatorFailsWithPositiveRegret) {
  const SPReport r = check_sp_direct(dictator_fixture().handle(), 50, 1e-9);
  EXPECT_FALSE(r.passed);
  EXPECT_GT(r.max_regret, 0.1);
  ASSERT_EQ(r.true_bid.size(), 2u);
  EXPECT_NE(r.true_bid[0], r.misreport[0]);
}

TEST(SpDirect, WorkerCountDoesNotChangeReport) {
  SPOptions one, four;
  four.workers = 4;
  const auto mech = dictator_fixture().handle();
  EXPECT_EQ(to_json(check_sp_direct(mech, 40, 1e-9, one)), to_json(check_sp_direct(mech, 40, 1e-9, four)));
}

TEST(SpSampled, PartialAllocationPassesOnThreeItems) {
  SPOptions opt;
  opt.items = 3;
  opt.samples = 20000;
  opt.misreports_per_type = 500;
  const SPReport r = check_sp_direct(pa_mechanism(0.421), 100, 1e-9, opt);
  EXPECT_TRUE(r.passed) << to_json(r);
}

TEST(SpSampled, FirstBestByBidsFails) {
  SPOptions opt;
  opt.items = 3;
  opt.samples = 5000;
  opt.misreports_per_type = 250;
  EXPECT_FALSE(check_sp_direct(first_best_by_bids(), 100, 1e-9, opt).passed);
}

TEST(SpSampled, SeedAndWorkersGiveIdenticalReports) {
  SPOptions a;
  a.items = 3;
  a.samples = 4000;
  a.misreports_per_type = 200;
  SPOptions b = a;
  b.workers = 3;
  const auto mech = first_best_by_bids();
  EXPECT_EQ(to_json(check_sp_direct(mech, 50, 1e-9, a)), to_json(check_sp_direct(mech, 50, 1e-9, b)));
  SPOptions c = a;
  c.seed = a.seed + 1;
  EXPECT_NE(to_json(check_sp_direct(mech, 50, 1e-9, a)), to_json(check_sp_direct(mech, 50, 1e-9, c)));
}

TEST(Rochet, PassesAndFails) {
  EXPECT_TRUE(check_rochet(five_sixths_mechanism(), 100, 1e-9).passed);
  EXPECT_TRUE(check_rochet(constant_mechanism(0.5), 50, 1e-12).passed);
  const SPReport bad = check_rochet(dictator_fixture(), 50, 1e-9);
  EXPECT_FALSE(bad.passed);
  EXPECT_GT(bad.max_regret, 0.0);
}

TEST(SufficientCondition, FiveSixthsPasses) {
  const auto m = five_sixths_mechanism();
  EXPECT_TRUE(check_sufficient_condition(m, m.breakpoints(), 1e-6).passed);
}

TEST(SufficientCondition, LinearShareFails) {
  const SymmetricTwoItemMechanism linear([](double b1, double) { return b1; }, "linear");
  EXPECT_FALSE(check_sufficient_condition(linear, {}, 1e-6).passed);
}

TEST(SufficientCondition, DecreasingShareFails) {
  const SymmetricTwoItemMechanism dec([](double b1, double) { return 1.0 - b1; }, "decreasing");
  const SPReport r = check_sufficient_condition(dec, {}, 1e-6);
  EXPECT_FALSE(r.passed);
}

TEST(SufficientCondition, JumpAtBreakpointFails) {
  const SymmetricTwoItemMechanism step([](double b1, double) { return b1 < 0.5 ? 0.25 : 0.75; }, "step");
  EXPECT_FALSE(check_sufficient_condition(step, {0.5}, 1e-6).passed);
}

TEST(MeasureRatio, EvenSplitIsOneHalf) {
  const RatioReport r = measure_ratio(even_split_mechanism(), 20);
  EXPECT_DOUBLE_EQ(r.min_ratio, 0.5);
  EXPECT_EQ(r.argmin_bid1[0], 1.0);
  EXPECT_EQ(r.argmin_bid2[0], 0.0);
  EXPECT_EQ(r.points, 21L * 21);
}

TEST(MeasureRatio, FiveSixthsMinimumOnBand) {
  RatioOptions opt;
  opt.workers = 3;
  const RatioReport r = measure_ratio(five_sixths_mechanism().handle(), 200, opt);
  EXPECT_NEAR(r.min_ratio, 5.0 / 6.0, 1e-12);
  EXPECT_GE(r.argmin_bid1[0], 0.2 - 1e-12);
  EXPECT_LE(r.argmin_bid1[0], 0.5 + 1e-12);
  EXPECT_EQ(r.argmin_bid2[0], 0.0);
  EXPECT_EQ(to_json(r), to_json(measure_ratio(five_sixths_mechanism().handle(), 200)));
}

TEST(MeasureRatio, SampledForMoreItems) {
  RatioOptions opt;
  opt.items = 4;
  opt.samples = 3000;
  const RatioReport r = measure_ratio(pa_mechanism(1.0), 50, opt);
  EXPECT_GT(r.min_ratio, 0.0);
  EXPECT_LE(r.min_ratio, 1.0);
  EXPECT_EQ(r.argmin_bid1.size(), 4u);
}

TEST(BoundClosedForms, MatchLpOracle) {
  for (double h : {10.0 / 11.0 + 1e-9, 0.93, 0.9523, 0.97, 1.0}) {
    for (int k = 0; k <= 40; ++k) {
      const double t1 = k / 40.0;
      if (std::abs(t1 - 0.1) > 1e-12) {
        EXPECT_NEAR(u_upper(t1, OpponentCase::opponent_0_1, h), utility_lp(t1, 0.1, h, lp::Sense::maximize), 1e-9)
            << "h=" << h << " t1=" << t1;
        EXPECT_NEAR(l_lower(t1, h), utility_lp(t1, 0.1, h, lp::Sense::minimize), 1e-9) << "h=" << h << " t1=" << t1;
      }
      if (k > 0) {
        EXPECT_NEAR(u_upper(t1, OpponentCase::opponent_0, h), utility_lp(t1, 0.0, h, lp::Sense::maximize), 1e-9)
            << "h=" << h << " t1=" << t1;
      }
    }
  }
}

TEST(BoundClosedForms, KnownValuesAndDomain) {
  EXPECT_NEAR(l_lower(0.0, 0.9523), 0.4753, 5e-5);
  EXPECT_DOUBLE_EQ(u_upper(0.0, OpponentCase::opponent_0, 0.95), 1.0);
  EXPECT_THROW(u_upper(0.5, OpponentCase::opponent_0_1, 0.9), InputError);
  EXPECT_THROW(l_lower(1.2, 0.95), InputError);
}

TEST(BoundCertificate, ReferenceCertificateIsTight) {
  const CertificateCheck c = evaluate_certificate({0.9523, 0.6979, 0.26, 0.32});
  EXPECT_TRUE(c.valid);
  EXPECT_GT(c.slack_a, 0.0);
  EXPECT_LT(c.slack_a, 1e-3);
  EXPECT_GT(c.slack_b, 0.0);
  EXPECT_LT(c.slack_b, 1e-3);
  EXPECT_FALSE(check_bound_certificate({0.94, 0.6979, 0.26, 0.32}));
  EXPECT_FALSE(check_bound_certificate({0.9523, 0.69, 0.26, 0.32}));
}

TEST(BoundCertificate, SearchFindsReferenceLevel) {
  const CertificateSearchResult r = search_best_certificate();
  ASSERT_TRUE(r.found);
  EXPECT_LE(r.cert.h, 0.9523 + 1e-12);
  EXPECT_TRUE(check_bound_certificate(r.cert));
  CertificateSearch below;
  below.h_hi = 0.95;
  EXPECT_FALSE(search_best_certificate(below).found);
}

TEST(Reports, JsonShape) {
  const auto sp = nlohmann::json::parse(to_json(check_sp_direct(dictator_fixture().handle(), 10, 1e-9)));
  EXPECT_FALSE(sp["passed"].get<bool>());
  EXPECT_TRUE(sp["worst_case"].contains("t1"));
  EXPECT_TRUE(sp["worst_case"].contains("misreport"));
  EXPECT_TRUE(sp["worst_case"].contains("t2"));
  const auto ratio = nlohmann::json::parse(to_json(measure_ratio(even_split_mechanism(), 10)));
  EXPECT_EQ(ratio["grid_n"].get<int>(), 10);
  EXPECT_TRUE(ratio["argmin"].contains("t2"));
}
