#include "spalloc/dip.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spalloc/error.hpp"
#include "spalloc/numeric.hpp"
#include "spalloc/two_item.hpp"

namespace spalloc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Largest y with price(y) <= level, scanning pieces left to right.
double quantity_at_level(const PiecewiseFunction& p, double level) {
  const auto& bp = p.breakpoints();
  const auto& pieces = p.pieces();
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    const Piece& piece = pieces[k];
    const double lo = bp[k];
    const double hi = bp[k + 1];
    if (hi <= lo) continue;
    if (piece.kind == Piece::Kind::infinite) return lo;
    if (piece.value(hi) <= level) continue;
    if (piece.value(lo) > level) return lo;
    return bisect([&](double y) { return piece.value(y) - level; }, lo, hi, 1e-14);
  }
  return p.upper();
}

double spend(const PriceSchedule& s, const std::vector<double>& x) {
  double total = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) total += s.per_item[j].integral(0.0, x[j]);
  return total;
}

// Quantities whose marginal utility per unit price is at least lambda; lambda = 0 buys every finite-price unit.
std::vector<double> quantities_at(const UtilityVector& u, const PriceSchedule& s, double lambda) {
  std::vector<double> x(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double level = u[j] == 0.0 ? 0.0 : (lambda == 0.0 ? kInf : u[j] / lambda);
    x[j] = quantity_at_level(s.per_item[j], level);
  }
  return x;
}

}  // namespace

void PriceSchedule::validate() const {
  if (per_item.empty()) throw InputError("price schedule has no items");
  for (const auto& p : per_item) {
    if (p.lower() > 0.0 || p.upper() < 1.0) throw InputError("item prices must cover [0, 1]");
    for (std::size_t k = 0; k < p.pieces().size(); ++k) {
      const Piece& piece = p.pieces()[k];
      if (piece.kind == Piece::Kind::infinite) continue;
      if (piece.value(p.breakpoints()[k]) < 0.0) throw InputError("prices must be nonnegative");
    }
    if (p.min_sampled_increment() < -1e-12) throw InputError("prices must be nondecreasing");
  }
}

double cumulative_cost(const PriceSchedule& sched, std::size_t item, double x) {
  if (item >= sched.per_item.size()) throw InputError("item index out of range");
  if (!(x >= 0.0 && x <= 1.0)) throw InputError("quantity must lie in [0, 1]");
  return sched.per_item[item].integral(0.0, x);
}

Purchase optimal_purchase(const UtilityVector& u, const PriceSchedule& sched) {
  if (u.size() != sched.per_item.size()) throw InputError("schedule and utility differ in item count");
  Purchase out;
  // Everything obtainable at finite price, with the free parts.
  const std::vector<double> all = quantities_at(u, sched, 0.0);
  if (spend(sched, all) <= 1.0) {
    out.quantities = all;
    out.spent = spend(sched, all);
    return out;
  }
  // Bisection on the utility-per-price threshold, in log space.
  double lo = -60.0;
  double hi = 60.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (spend(sched, quantities_at(u, sched, std::exp(mid))) > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  std::vector<double> x = quantities_at(u, sched, std::exp(hi));
  const std::vector<double> x_more = quantities_at(u, sched, std::exp(lo));
  double budget = 1.0 - spend(sched, x);
  // Leftover budget buys the tied segments in index order.
  for (std::size_t j = 0; j < u.size() && budget > 0.0; ++j) {
    if (x_more[j] <= x[j]) continue;
    const auto& p = sched.per_item[j];
    const double base = p.integral(0.0, x[j]);
    const double full = p.integral(x[j], x_more[j]);
    if (full <= budget) {
      budget -= full;
      x[j] = x_more[j];
      continue;
    }
    const double start = x[j];
    x[j] = bisect([&](double y) { return p.integral(0.0, y) - base - budget; }, start, x_more[j], 1e-15);
    budget = 0.0;
  }
  out.quantities = x;
  out.spent = spend(sched, x);
  return out;
}

PriceSchedule even_split_schedule(std::size_t m) {
  PriceSchedule s;
  for (std::size_t j = 0; j < m; ++j) {
    s.per_item.emplace_back(std::vector<double>{0.0, 0.5, 1.0}, std::vector<Piece>{Piece::constant(0.0), Piece::infinite()});
  }
  return s;
}

double five_sixths_price_constant() { return 1.0 / (1.0 - std::log(2.5) / 3.0); }

double five_sixths_g(double t2, double y) {
  const double ft2 = f_five_sixths(t2);
  return bisect([&](double z) { return f_five_sixths(1.0 - z) - ft2 + 0.5 - y; }, 0.2, 0.5, 1e-15);
}

namespace {

// Price for item 1 against opponent parameter t, with C = 1 then rescaled.
PiecewiseFunction item_schedule(double t) {
  const double tau = 0.5 - f_five_sixths(t);
  const double f_half = f_five_sixths(0.5);
  const double b1 = tau;
  const double b2 = f_half + tau;
  const double b3 = 0.5 + tau;
  if (!(0.0 <= b1 && b1 <= b2 && b2 <= b3 && b3 <= 1.0 + 1e-15)) {
    throw NumericalError("five-sixths schedule breakpoints are not ordered at t2 = " + std::to_string(t));
  }
  auto make = [&](double c) {
    const double ft = f_five_sixths(t);
    // Solves f(1 - z) - f(t) + 1/2 = y on the branch 1 - z in [1/2, 4/5].
    auto g = [ft, b2, b3](double y) { return std::exp(6.0 * (1.0 - ft - std::clamp(y, b2, b3))) / 5.0; };
    auto price = [c, g](double y) { return c / g(y) - c; };
    // d/dy (C / (6 g(y))) = C / g(y) along the schedule, so this is an antiderivative of the price.
    auto primitive = [c, g](double y) { return c / (6.0 * g(y)) - c * y; };
    return PiecewiseFunction({0.0, b1, b2, std::min(b3, 1.0), 1.0},
                             {Piece::constant(0.0), Piece::constant(c), Piece::custom(price, primitive), Piece::infinite()});
  };
  const double budget_at_unit = make(1.0).integral(0.0, std::min(b3, 1.0));
  return make(1.0 / budget_at_unit);
}

}  // namespace

PriceSchedule five_sixths_price_schedule(double t2) {
  if (!(t2 >= 0.0 && t2 <= 1.0)) throw InputError("t2 must lie in [0, 1]");
  PriceSchedule s;
  s.per_item.push_back(item_schedule(t2));
  s.per_item.push_back(item_schedule(1.0 - t2));
  return s;
}

MechanismHandle dip_five_sixths_mechanism() {
  return {[](const UtilityVector& b1, const UtilityVector& b2) {
            if (b1.size() != 2) throw InputError("the five-sixths DIP mechanism is defined for two items");
            const Purchase p1 = optimal_purchase(b1, five_sixths_price_schedule(b2[0]));
            const Purchase p2 = optimal_purchase(b2, five_sixths_price_schedule(b1[0]));
            return Allocation(p1.quantities, p2.quantities);
          },
          "dip-five-sixths"};
}

}  // namespace spalloc
