#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>

#include "spalloc/error.hpp"
#include "spalloc/lp/io.hpp"
#include "spalloc/lp/solve.hpp"

using namespace spalloc;
using namespace spalloc::lp;

namespace {

struct Dense {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;  // a x <= b
  Eigen::VectorXd c;  // maximize c x
  double box = 10.0;
};

LPInstance to_instance(const Dense& d) {
  LPInstance lp;
  const int n = static_cast<int>(d.c.size());
  for (int j = 0; j < n; ++j) lp.add_variable("x" + std::to_string(j), 0.0, d.box);
  for (int i = 0; i < d.a.rows(); ++i) {
    std::vector<Term> t;
    for (int j = 0; j < n; ++j) t.push_back({j, d.a(i, j)});
    lp.add_row("feas_" + std::to_string(i), t, Relation::less_equal, d.b(i), RowTag::feasibility);
  }
  std::vector<Term> obj;
  for (int j = 0; j < n; ++j) obj.push_back({j, d.c(j)});
  lp.set_objective(Sense::maximize, obj);
  return lp;
}

// Best feasible vertex over all choices of n active constraints among rows and box faces.
double vertex_oracle(const Dense& d) {
  const int n = static_cast<int>(d.c.size());
  const int m = static_cast<int>(d.a.rows());
  Eigen::MatrixXd all(m + 2 * n, n);
  Eigen::VectorXd rhs(m + 2 * n);
  all.topRows(m) = d.a;
  rhs.head(m) = d.b;
  for (int j = 0; j < n; ++j) {
    all.row(m + 2 * j).setZero();
    all(m + 2 * j, j) = 1.0;
    rhs(m + 2 * j) = d.box;
    all.row(m + 2 * j + 1).setZero();
    all(m + 2 * j + 1, j) = -1.0;
    rhs(m + 2 * j + 1) = 0.0;
  }
  const int total = m + 2 * n;
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> pick(n);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == n) {
      Eigen::MatrixXd s(n, n);
      Eigen::VectorXd r(n);
      for (int k = 0; k < n; ++k) {
        s.row(k) = all.row(pick[k]);
        r(k) = rhs(pick[k]);
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(s);
      if (!lu.isInvertible()) return;
      const Eigen::VectorXd x = lu.solve(r);
      if (((all * x - rhs).array() > 1e-9).any()) return;
      best = std::max(best, d.c.dot(x));
      return;
    }
    for (int k = start; k < total; ++k) {
      pick[depth] = k;
      rec(k + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

bool scipy_available() { return std::system("python3 -c 'import scipy.optimize' >/dev/null 2>&1") == 0; }

}  // namespace

TEST(Simplex, TextbookMaximization) {
  LPInstance lp;
  const int x = lp.add_variable("x");
  const int y = lp.add_variable("y");
  const Term r1[] = {{x, 1}};
  const Term r2[] = {{y, 2}};
  const Term r3[] = {{x, 3}, {y, 2}};
  lp.add_row("feas_a", r1, Relation::less_equal, 4, RowTag::feasibility);
  lp.add_row("feas_b", r2, Relation::less_equal, 12, RowTag::feasibility);
  lp.add_row("feas_c", r3, Relation::less_equal, 18, RowTag::feasibility);
  const Term obj[] = {{x, 3}, {y, 5}};
  lp.set_objective(Sense::maximize, obj);
  const LPSolution sol = solve(lp);
  ASSERT_EQ(sol.status, SolveStatus::optimal);
  EXPECT_NEAR(sol.objective_value, 36.0, 1e-9);
  EXPECT_NEAR(*sol.value("x"), 2.0, 1e-9);
  EXPECT_NEAR(*sol.value("y"), 6.0, 1e-9);
  EXPECT_LE(sol.max_row_violation, 1e-9);
}

TEST(Simplex, EqualityFreeVariableAndMinimize) {
  LPInstance lp;
  const int x = lp.add_variable("x", -kInfinity, kInfinity);
  const int y = lp.add_variable("y", 1.0, 3.0);
  const Term e[] = {{x, 1}, {y, 1}};
  lp.add_row("full_0", e, Relation::equal, 2.0, RowTag::fullness);
  const Term obj[] = {{x, 1}, {y, 3}};
  lp.set_objective(Sense::minimize, obj);
  const LPSolution sol = solve(lp);
  ASSERT_EQ(sol.status, SolveStatus::optimal);
  EXPECT_NEAR(*sol.value("y"), 1.0, 1e-9);
  EXPECT_NEAR(*sol.value("x"), 1.0, 1e-9);
  EXPECT_NEAR(sol.objective_value, 4.0, 1e-9);
}

TEST(Simplex, DetectsInfeasibleAndUnbounded) {
  LPInstance inf;
  const int x = inf.add_variable("x");
  const int y = inf.add_variable("y");
  const Term t[] = {{x, 1}, {y, 1}};
  inf.add_row("feas_lo", t, Relation::less_equal, 1, RowTag::feasibility);
  inf.add_row("feas_hi", t, Relation::greater_equal, 2, RowTag::feasibility);
  inf.set_objective(Sense::maximize, t);
  EXPECT_EQ(solve(inf).status, SolveStatus::infeasible);

  LPInstance unb;
  const int a = unb.add_variable("a");
  const int b = unb.add_variable("b");
  const Term r[] = {{a, 1}, {b, -1}};
  unb.add_row("feas_0", r, Relation::less_equal, 1, RowTag::feasibility);
  const Term obj[] = {{a, 1}};
  unb.set_objective(Sense::maximize, obj);
  EXPECT_EQ(solve(unb).status, SolveStatus::unbounded);
}

TEST(Simplex, RandomLpsMatchVertexOracleOnBothRoutes) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const EmbeddedSimplex primal({}, Route::primal);
  const EmbeddedSimplex dual({}, Route::dual);
  for (int k = 0; k < 40; ++k) {
    Dense d;
    const int n = 3, m = 4 + k % 4;
    d.a.resize(m, n);
    d.b.resize(m);
    d.c.resize(n);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) d.a(i, j) = u(rng);
      d.b(i) = 1.0 + 2.0 * std::abs(u(rng));  // x = 0 stays feasible
    }
    for (int j = 0; j < n; ++j) d.c(j) = u(rng);
    const LPInstance lp = to_instance(d);
    const double oracle = vertex_oracle(d);
    for (const SolverBackend* b : {static_cast<const SolverBackend*>(&primal), static_cast<const SolverBackend*>(&dual)}) {
      const LPSolution sol = solve(lp, *b);
      ASSERT_EQ(sol.status, SolveStatus::optimal) << b->name() << " lp " << k;
      EXPECT_NEAR(sol.objective_value, oracle, 1e-8) << b->name() << " lp " << k;
    }
  }
}

TEST(Recheck, ReportsWorstRow) {
  LPInstance lp;
  const int x = lp.add_variable("x", 0.0, 1.0);
  const Term t[] = {{x, 2}};
  lp.add_row("feas_a", t, Relation::less_equal, 1, RowTag::feasibility);
  lp.add_row("feas_b", t, Relation::greater_equal, 0.5, RowTag::feasibility);
  const double at[] = {0.8};
  const Violation v = recheck(lp, at);
  EXPECT_NEAR(v.max_row, 0.6, 1e-15);
  EXPECT_EQ(v.worst_row, 0);
  const double out[] = {1.5};
  EXPECT_NEAR(recheck(lp, out).max_bound, 0.5, 1e-15);
}

TEST(Instance, MergesDuplicatesAndValidates) {
  LPInstance lp;
  const int x = lp.add_variable("x");
  const Term t[] = {{x, 1}, {x, 2}};
  lp.add_row("sp_0", t, Relation::less_equal, 1, RowTag::sp);
  ASSERT_EQ(lp.row_terms(0).size(), 1u);
  EXPECT_DOUBLE_EQ(lp.row_terms(0)[0].coef, 3.0);
  EXPECT_EQ(lp.count_rows(RowTag::sp), 1u);
  EXPECT_THROW(lp.add_variable("x"), InputError);
  EXPECT_NO_THROW(lp.validate());
  LPInstance inverted = lp;
  inverted.add_variable("bad", 2.0, 1.0);
  EXPECT_THROW(inverted.validate(), InputError);
  LPInstance ghosted = lp;
  const Term ghost[] = {{7, 1.0}};
  ghosted.add_row("sp_1", ghost, Relation::less_equal, 0, RowTag::sp);
  EXPECT_THROW(ghosted.validate(), InputError);
}

TEST(LpFile, RoundTripPreservesStructure) {
  LPInstance lp;
  const int a = lp.add_variable("a", -kInfinity, kInfinity);
  const int b = lp.add_variable("b", -2.5, 4.0);
  const int c = lp.add_variable("c");
  const Term r1[] = {{a, -1.0}, {b, 0.1}, {c, -1e-17}};
  const Term r2[] = {{c, 1.0 / 3.0}};
  lp.add_row("sp_x", r1, Relation::greater_equal, -0.25, RowTag::sp);
  lp.add_row("comp_y", r2, Relation::equal, 1.0, RowTag::competitiveness);
  lp.add_row("feas_empty", {}, Relation::less_equal, 0.0, RowTag::feasibility);
  lp.add_row("odd", r2, Relation::less_equal, 2.0, RowTag::nonnegativity);
  const Term obj[] = {{a, -2.0}, {c, 1.0}};
  lp.set_objective(Sense::minimize, obj);
  std::stringstream ss;
  write_lp(lp, ss);
  const LPInstance back = read_lp(ss);
  EXPECT_FALSE(structurally_equal(lp, back));  // only the untagged row name changes
  LPInstance renamed;
  for (const auto& v : lp.variables()) renamed.add_variable(v.name, v.lower, v.upper);
  for (int i = 0; i < lp.num_rows(); ++i) {
    const auto& r = lp.row(i);
    renamed.add_row(i == 3 ? "nonneg_odd" : r.name, lp.row_terms(i), r.rel, r.rhs, r.tag);
  }
  renamed.set_objective(lp.sense(), lp.objective());
  EXPECT_TRUE(structurally_equal(renamed, back));
  EXPECT_EQ(back.row(3).tag, RowTag::nonnegativity);
  EXPECT_EQ(back.row(3).name, "nonneg_odd");
  std::stringstream again, twice;
  write_lp(back, again);
  write_lp(read_lp(again), twice);
  std::stringstream first;
  write_lp(lp, first);
  EXPECT_EQ(first.str(), twice.str());
}

TEST(LpFile, RejectsMalformedInput) {
  std::stringstream no_end("Maximize\n obj: 1 x\nSubject To\n sp_a: 1 x <= 1\n");
  EXPECT_THROW(read_lp(no_end), InputError);
  std::stringstream untagged("Maximize\n obj: 1 x\nSubject To\n weird: 1 x <= 1\nEnd\n");
  EXPECT_THROW(read_lp(untagged), InputError);
}

TEST(SolutionJson, RoundTrip) {
  LPInstance lp;
  const int x = lp.add_variable("x");
  lp.add_variable("y");
  const Term t[] = {{x, 1}};
  lp.add_row("feas_0", t, Relation::less_equal, 2, RowTag::feasibility);
  lp.set_objective(Sense::maximize, t);
  const LPSolution sol = solve(lp);
  const std::string text = solution_json(sol);
  const auto j = nlohmann::json::parse(text);
  EXPECT_EQ(j["status"], "optimal");
  EXPECT_DOUBLE_EQ(j["objective"].get<double>(), 2.0);
  EXPECT_FALSE(j["nonzeros"].contains("y"));
  const LPSolution back = parse_solution_json(text, lp);
  EXPECT_EQ(back.status, SolveStatus::optimal);
  EXPECT_DOUBLE_EQ(back.values[0], 2.0);
  EXPECT_THROW(parse_solution_json(R"({"status":"optimal","objective":1,"nonzeros":{"zz":1}})", lp), InputError);
}

TEST(Backends, FactoryAndEnvironment) {
  EXPECT_EQ(make_backend("embedded")->name().rfind("embedded", 0), 0u);
  EXPECT_THROW(make_backend("cplex"), InputError);
  setenv(kBackendEnvVar, "embedded-dual", 1);
  EXPECT_EQ(default_backend_id(), "embedded-dual");
  unsetenv(kBackendEnvVar);
  EXPECT_EQ(default_backend_id(), "embedded");
}

TEST(Backends, ExternalHighsAgreesWithEmbedded) {
  if (!scipy_available()) GTEST_SKIP() << "scipy not importable";
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const ExternalSolver highs("python3 " SPALLOC_SOURCE_DIR "/tools/highs_adapter.py");
  for (int k = 0; k < 5; ++k) {
    Dense d;
    d.a.resize(6, 4);
    d.b.resize(6);
    d.c.resize(4);
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 4; ++j) d.a(i, j) = u(rng);
      d.b(i) = 1.0 + std::abs(u(rng));
    }
    for (int j = 0; j < 4; ++j) d.c(j) = u(rng);
    const LPInstance lp = to_instance(d);
    EXPECT_NEAR(solve(lp, highs).objective_value, solve(lp).objective_value, 1e-7);
  }
}

TEST(Backends, ExternalFailureIsReported) {
  const ExternalSolver broken("false");
  LPInstance lp;
  const int x = lp.add_variable("x", 0.0, 1.0);
  const Term t[] = {{x, 1}};
  lp.set_objective(Sense::maximize, t);
  EXPECT_THROW(solve(lp, broken), NumericalError);
}
