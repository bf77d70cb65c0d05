#include "spalloc/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "spalloc/error.hpp"
#include "spalloc/lp/solve.hpp"

namespace spalloc {

UtilityVector::UtilityVector(std::vector<double> entries) : entries_(std::move(entries)) {
  if (entries_.size() < 2) throw InputError("utility vectors need at least two items");
  double sum = 0.0;
  for (double v : entries_) {
    if (!(v >= 0.0)) throw InputError("utility entries must be nonnegative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kNormalizationTolerance) {
    throw InputError("utility vector sums to " + std::to_string(sum) + ", not 1");
  }
}

UtilityVector UtilityVector::of_two(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw InputError("two-item parameter must lie in [0, 1]");
  return UtilityVector({t, 1.0 - t});
}

double UtilityVector::dot(std::span<const double> shares) const {
  if (shares.size() != entries_.size()) throw InputError("dimension mismatch between utility and bundle");
  double s = 0.0;
  for (std::size_t j = 0; j < entries_.size(); ++j) s += entries_[j] * shares[j];
  return s;
}

Allocation::Allocation(std::size_t m) : shares_{std::vector<double>(m, 0.0), std::vector<double>(m, 0.0)} {}

Allocation::Allocation(std::vector<double> agent0, std::vector<double> agent1)
    : shares_{std::move(agent0), std::move(agent1)} {
  if (shares_[0].size() != shares_[1].size()) throw InputError("allocation rows differ in length");
}

double Allocation::utility(int agent, const UtilityVector& u) const { return u.dot(shares_[agent]); }

double Allocation::feasibility_violation() const {
  double worst = 0.0;
  for (std::size_t j = 0; j < items(); ++j) {
    for (int i = 0; i < 2; ++i) {
      worst = std::max({worst, -shares_[i][j], shares_[i][j] - 1.0});
    }
    worst = std::max(worst, shares_[0][j] + shares_[1][j] - 1.0);
  }
  return worst;
}

void Allocation::validate() const {
  if (feasibility_violation() > kFeasibilityTolerance) {
    throw InputError("allocation is infeasible by " + std::to_string(feasibility_violation()));
  }
}

Allocation MechanismHandle::operator()(const UtilityVector& b1, const UtilityVector& b2) const {
  if (b1.size() != b2.size()) throw InputError("bids have different dimensions");
  return evaluator_(b1, b2);
}

MechanismHandle even_split_mechanism() {
  return {[](const UtilityVector& b1, const UtilityVector&) {
            return Allocation(std::vector<double>(b1.size(), 0.5), std::vector<double>(b1.size(), 0.5));
          },
          "even-split"};
}

double social_welfare(const MechanismHandle& mech, const UtilityVector& u1, const UtilityVector& u2) {
  const Allocation a = mech(u1, u2);
  return a.utility(0, u1) + a.utility(1, u2);
}

FirstBest first_best(const UtilityVector& u1, const UtilityVector& u2) {
  if (u1.size() != u2.size()) throw InputError("bids have different dimensions");
  FirstBest fb{0.0, Allocation(u1.size())};
  for (std::size_t j = 0; j < u1.size(); ++j) {
    const int winner = u1[j] >= u2[j] ? 0 : 1;
    fb.allocation.set_share(winner, j, 1.0);
    fb.value += std::max(u1[j], u2[j]);
  }
  return fb;
}

double competitive_ratio_at(const MechanismHandle& mech, const UtilityVector& u1, const UtilityVector& u2) {
  return social_welfare(mech, u1, u2) / first_best(u1, u2).value;
}

MechanismHandle average_mechanisms(const std::vector<std::pair<double, MechanismHandle>>& parts) {
  if (parts.empty()) throw InputError("average of zero mechanisms");
  double total = 0.0;
  std::string label = "avg(";
  for (const auto& [w, m] : parts) {
    if (!(w > 0.0)) throw InputError("mechanism weights must be positive");
    total += w;
    if (label.size() > 4) label += ",";
    label += std::to_string(w) + "*" + m.label();
  }
  label += ")";
  if (std::abs(total - 1.0) > kNormalizationTolerance) {
    throw InputError("mechanism weights sum to " + std::to_string(total) + ", not 1");
  }
  return {[parts](const UtilityVector& b1, const UtilityVector& b2) {
            Allocation out(b1.size());
            for (const auto& [w, m] : parts) {
              const Allocation a = m(b1, b2);
              for (int i = 0; i < 2; ++i)
                for (std::size_t j = 0; j < b1.size(); ++j) out.bundle(i)[j] += w * a.share(i, j);
            }
            return out;
          },
          label};
}

std::vector<std::size_t> ratio_order(const UtilityVector& u1, const UtilityVector& u2) {
  std::vector<std::size_t> order(u1.size());
  std::iota(order.begin(), order.end(), 0);
  // Rank 0: u2j = 0 (ratio +inf, includes 0/0); rank 1: finite positive ratio; rank 2: u1j = 0 < u2j.
  auto rank = [&](std::size_t j) { return u2[j] == 0.0 ? 0 : (u1[j] == 0.0 ? 2 : 1); };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const int ra = rank(a);
    const int rb = rank(b);
    if (ra != rb) return ra < rb;
    if (ra != 1) return false;
    // u1a/u2a > u1b/u2b without division
    return u1[a] * u2[b] > u1[b] * u2[a];
  });
  return order;
}

double pareto_frontier_closed_form(const UtilityVector& u1, const UtilityVector& u2, double r1) {
  if (u1.size() != u2.size()) throw InputError("bids have different dimensions");
  if (r1 > 1.0) return -std::numeric_limits<double>::infinity();
  double need = std::max(r1, 0.0);
  double r2 = 0.0;
  for (std::size_t j : ratio_order(u1, u2)) {
    if (need <= 0.0) {
      r2 += u2[j];
      continue;
    }
    if (u1[j] <= need) {
      need -= u1[j];
      continue;
    }
    r2 += u2[j] * (1.0 - need / u1[j]);
    need = 0.0;
  }
  return r2;
}

double pareto_frontier_lp(const UtilityVector& u1, const UtilityVector& u2, double r1) {
  if (u1.size() != u2.size()) throw InputError("bids have different dimensions");
  const std::size_t m = u1.size();
  lp::LPInstance inst;
  std::vector<lp::Term> own, other, obj;
  for (std::size_t j = 0; j < m; ++j) {
    const int a = inst.add_variable("x1_" + std::to_string(j), 0.0, 1.0);
    const int b = inst.add_variable("x2_" + std::to_string(j), 0.0, 1.0);
    own.push_back({a, u1[j]});
    obj.push_back({b, u2[j]});
    const lp::Term item[] = {{a, 1.0}, {b, 1.0}};
    inst.add_row("feas_item_" + std::to_string(j), item, lp::Relation::less_equal, 1.0, lp::RowTag::feasibility);
  }
  inst.add_row("feas_agent1", own, lp::Relation::greater_equal, std::max(r1, 0.0), lp::RowTag::feasibility);
  inst.set_objective(lp::Sense::maximize, obj);
  const lp::LPSolution sol = lp::solve(inst, lp::EmbeddedSimplex{});
  if (sol.status == lp::SolveStatus::infeasible) return -std::numeric_limits<double>::infinity();
  if (sol.status != lp::SolveStatus::optimal) throw NumericalError("frontier LP did not solve");
  return sol.objective_value;
}

namespace {

bool contains_with(const UtilityVector& u1, const UtilityVector& u2, UtilityPoint p, double tol,
                   double (*frontier)(const UtilityVector&, const UtilityVector&, double)) {
  if (p.r1 < -tol || p.r2 < -tol) return false;
  const double s1 = std::max(p.r1 - tol, 0.0);
  const double s2 = std::max(p.r2 - tol, 0.0);
  if (s1 > 1.0 || s2 > 1.0) return false;
  return s2 <= frontier(u1, u2, s1);
}

}  // namespace

bool aur_contains_closed_form(const UtilityVector& u1, const UtilityVector& u2, UtilityPoint p, double tol) {
  return contains_with(u1, u2, p, tol, &pareto_frontier_closed_form);
}

bool aur_contains_lp(const UtilityVector& u1, const UtilityVector& u2, UtilityPoint p, double tol) {
  return contains_with(u1, u2, p, tol, &pareto_frontier_lp);
}

bool aur_contains(const UtilityVector& u1, const UtilityVector& u2, UtilityPoint p, double tol) {
  if (u1.size() != u2.size()) throw InputError("bids have different dimensions");
  return u1.size() == 2 ? aur_contains_closed_form(u1, u2, p, tol) : aur_contains_lp(u1, u2, p, tol);
}

}  // namespace spalloc
