#include "spalloc/lp/solve.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "spalloc/error.hpp"
#include "spalloc/lp/io.hpp"

namespace spalloc::lp {
namespace {

using Triplet = Eigen::Triplet<double>;

struct SignedVar {
  enum Kind { nonneg, free, nonpos } kind = free;
};

// min cost'x route through [G, -I](x, r) = 0 with r carrying the row bounds.
LPSolution solve_primal_route(const LPInstance& lp, const SimplexOptions& opt) {
  const int n = lp.num_variables();
  const int m = lp.num_rows();
  const double sign = lp.sense() == Sense::maximize ? -1.0 : 1.0;

  ComputationalForm form;
  std::vector<Triplet> trip;
  trip.reserve(lp.num_nonzeros() + static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    for (const Term& t : lp.row_terms(i)) trip.emplace_back(i, t.var, t.coef);
    trip.emplace_back(i, n + i, -1.0);
  }
  form.matrix.resize(m, n + m);
  form.matrix.setFromTriplets(trip.begin(), trip.end());
  form.matrix.makeCompressed();
  form.cost.assign(n + m, 0.0);
  for (const Term& t : lp.objective()) form.cost[t.var] += sign * t.coef;
  form.lower.resize(n + m);
  form.upper.resize(n + m);
  for (int j = 0; j < n; ++j) {
    form.lower[j] = lp.variable(j).lower;
    form.upper[j] = lp.variable(j).upper;
  }
  for (int i = 0; i < m; ++i) {
    const auto& row = lp.row(i);
    form.lower[n + i] = row.rel == Relation::less_equal ? -kInfinity : row.rhs;
    form.upper[n + i] = row.rel == Relation::greater_equal ? kInfinity : row.rhs;
  }
  form.rhs.assign(m, 0.0);

  const EngineResult res = run_simplex(form, opt);
  LPSolution sol;
  sol.iterations = res.iterations;
  if (res.status == EngineStatus::iteration_limit) throw NumericalError("simplex iteration limit reached");
  sol.status = res.status == EngineStatus::optimal    ? SolveStatus::optimal
               : res.status == EngineStatus::unbounded ? SolveStatus::unbounded
                                                       : SolveStatus::infeasible;
  sol.values.assign(res.z.begin(), res.z.begin() + n);
  return sol;
}

// Solves the dual  max h'y  s.t. G'y (<=,=,>=) c  as an engine problem whose
// row multipliers are the negated primal values.
EngineResult run_dual_form(const LPInstance& lp, const std::vector<double>& min_cost, const SimplexOptions& opt,
                           int& extra_rows_out) {
  const int n = lp.num_variables();
  const int m = lp.num_rows();

  // Bounds other than >= 0, <= 0 or free become explicit rows.
  struct BoundRow {
    int var;
    Relation rel;
    double rhs;
  };
  std::vector<SignedVar> kinds(n);
  std::vector<BoundRow> bound_rows;
  for (int j = 0; j < n; ++j) {
    const auto& v = lp.variable(j);
    if (v.lower == 0.0 && v.upper == kInfinity) {
      kinds[j].kind = SignedVar::nonneg;
    } else if (v.lower == -kInfinity && v.upper == 0.0) {
      kinds[j].kind = SignedVar::nonpos;
    } else {
      kinds[j].kind = SignedVar::free;
      if (std::isfinite(v.lower)) bound_rows.push_back({j, Relation::greater_equal, v.lower});
      if (std::isfinite(v.upper)) bound_rows.push_back({j, Relation::less_equal, v.upper});
    }
  }
  const int rows_total = m + static_cast<int>(bound_rows.size());
  extra_rows_out = static_cast<int>(bound_rows.size());

  ComputationalForm form;
  std::vector<Triplet> trip;
  trip.reserve(lp.num_nonzeros() + bound_rows.size() + static_cast<std::size_t>(n));
  for (int i = 0; i < m; ++i) {
    for (const Term& t : lp.row_terms(i)) trip.emplace_back(t.var, i, t.coef);
  }
  for (std::size_t k = 0; k < bound_rows.size(); ++k) trip.emplace_back(bound_rows[k].var, m + static_cast<int>(k), 1.0);
  for (int j = 0; j < n; ++j) trip.emplace_back(j, rows_total + j, -1.0);
  form.matrix.resize(n, rows_total + n);
  form.matrix.setFromTriplets(trip.begin(), trip.end());
  form.matrix.makeCompressed();

  form.cost.assign(rows_total + n, 0.0);
  form.lower.resize(rows_total + n);
  form.upper.resize(rows_total + n);
  auto set_row = [&](int col, Relation rel, double rhs) {
    form.cost[col] = -rhs;
    switch (rel) {
      case Relation::greater_equal: form.lower[col] = 0.0; form.upper[col] = kInfinity; break;
      case Relation::less_equal: form.lower[col] = -kInfinity; form.upper[col] = 0.0; break;
      case Relation::equal: form.lower[col] = -kInfinity; form.upper[col] = kInfinity; break;
    }
  };
  for (int i = 0; i < m; ++i) set_row(i, lp.row(i).rel, lp.row(i).rhs);
  for (std::size_t k = 0; k < bound_rows.size(); ++k)
    set_row(m + static_cast<int>(k), bound_rows[k].rel, bound_rows[k].rhs);
  for (int j = 0; j < n; ++j) {
    const int col = rows_total + j;
    switch (kinds[j].kind) {
      case SignedVar::nonneg: form.lower[col] = -kInfinity; form.upper[col] = min_cost[j]; break;
      case SignedVar::free: form.lower[col] = min_cost[j]; form.upper[col] = min_cost[j]; break;
      case SignedVar::nonpos: form.lower[col] = min_cost[j]; form.upper[col] = kInfinity; break;
    }
  }
  form.rhs.assign(n, 0.0);
  return run_simplex(form, opt);
}

LPSolution solve_dual_route(const LPInstance& lp, const SimplexOptions& opt) {
  const int n = lp.num_variables();
  const double sign = lp.sense() == Sense::maximize ? -1.0 : 1.0;
  std::vector<double> min_cost(n, 0.0);
  for (const Term& t : lp.objective()) min_cost[t.var] += sign * t.coef;

  int extra = 0;
  const EngineResult res = run_dual_form(lp, min_cost, opt, extra);
  if (res.status == EngineStatus::iteration_limit) throw NumericalError("simplex iteration limit reached");
  LPSolution sol;
  sol.iterations = res.iterations;
  if (res.status == EngineStatus::optimal) {
    sol.status = SolveStatus::optimal;
    sol.values.resize(n);
    for (int j = 0; j < n; ++j) sol.values[j] = -res.row_duals[j];
  } else if (res.status == EngineStatus::unbounded) {
    sol.status = SolveStatus::infeasible;
  } else {
    // Dual infeasible: the primal is unbounded when it is feasible at all.
    const std::vector<double> zero(n, 0.0);
    const EngineResult probe = run_dual_form(lp, zero, opt, extra);
    sol.status = probe.status == EngineStatus::optimal ? SolveStatus::unbounded : SolveStatus::infeasible;
  }
  return sol;
}

}  // namespace

std::string EmbeddedSimplex::name() const {
  switch (route_) {
    case Route::primal: return "embedded-primal";
    case Route::dual: return "embedded-dual";
    case Route::automatic: break;
  }
  return "embedded";
}

LPSolution EmbeddedSimplex::solve_unchecked(const LPInstance& lp) const {
  Route route = route_;
  if (route == Route::automatic) route = lp.num_rows() > lp.num_variables() ? Route::dual : Route::primal;
  LPSolution sol = route == Route::dual ? solve_dual_route(lp, options_) : solve_primal_route(lp, options_);
  sol.backend = name();
  return sol;
}

LPSolution ExternalSolver::solve_unchecked(const LPInstance& lp) const {
  namespace fs = std::filesystem;
  std::random_device rd;
  const fs::path dir = fs::temp_directory_path() / ("spalloc_lp_" + std::to_string(rd()));
  fs::create_directories(dir);
  const fs::path in = dir / "problem.lp";
  const fs::path out = dir / "solution.json";
  export_lp(lp, in);
  const std::string cmd = command_ + " '" + in.string() + "' '" + out.string() + "'";
  const int rc = std::system(cmd.c_str());
  if (rc != 0) {
    fs::remove_all(dir);
    throw NumericalError("external solver exited with status " + std::to_string(rc));
  }
  std::ifstream is(out);
  if (!is) {
    fs::remove_all(dir);
    throw NumericalError("external solver wrote no solution file");
  }
  std::stringstream buf;
  buf << is.rdbuf();
  LPSolution sol = parse_solution_json(buf.str(), lp);
  sol.backend = name();
  fs::remove_all(dir);
  return sol;
}

std::unique_ptr<SolverBackend> make_backend(std::string_view id) {
  if (id == "embedded") return std::make_unique<EmbeddedSimplex>();
  if (id == "embedded-primal") return std::make_unique<EmbeddedSimplex>(SimplexOptions{}, Route::primal);
  if (id == "embedded-dual") return std::make_unique<EmbeddedSimplex>(SimplexOptions{}, Route::dual);
  constexpr std::string_view prefix = "external:";
  if (id.starts_with(prefix) && id.size() > prefix.size()) {
    return std::make_unique<ExternalSolver>(std::string(id.substr(prefix.size())));
  }
  throw InputError("unknown LP backend: " + std::string(id));
}

std::string default_backend_id() {
  const char* env = std::getenv(kBackendEnvVar);
  return env && *env ? std::string(env) : std::string("embedded");
}

LPSolution solve(const LPInstance& lp, const SolverBackend& backend) {
  lp.validate();
  LPSolution sol = backend.solve_unchecked(lp);
  sol.names.clear();
  sol.names.reserve(lp.num_variables());
  for (const auto& v : lp.variables()) sol.names.push_back(v.name);
  if (sol.status != SolveStatus::optimal) {
    sol.values.clear();
    return sol;
  }
  if (static_cast<int>(sol.values.size()) != lp.num_variables()) {
    throw NumericalError("backend returned a solution of the wrong size");
  }
  const Violation v = recheck(lp, sol.values);
  sol.max_row_violation = v.max_row;
  sol.max_bound_violation = v.max_bound;
  if (v.max_row > kRecheckTolerance || v.max_bound > kRecheckTolerance) {
    throw NumericalError("solution from " + backend.name() + " fails the row re-check (max row violation " +
                         std::to_string(v.max_row) + (v.worst_row >= 0 ? " at " + lp.row(v.worst_row).name : "") +
                         ", bound violation " + std::to_string(v.max_bound) + ")");
  }
  sol.objective_value = evaluate_objective(lp, sol.values);
  return sol;
}

LPSolution solve(const LPInstance& lp) { return solve(lp, *make_backend(default_backend_id())); }

}  // namespace spalloc::lp
