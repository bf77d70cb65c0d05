#pragma once

#include <vector>

#include "spalloc/core.hpp"
#include "spalloc/piecewise.hpp"

namespace spalloc {

/// Marginal price of each item against the quantity already bought.
/// +inf segments are Piece::infinite() pieces.
struct PriceSchedule {
  std::vector<PiecewiseFunction> per_item;

  /// Throws InputError unless every item is priced on [0, 1], nonnegative and nondecreasing.
  void validate() const;
};

struct Purchase {
  std::vector<double> quantities;
  double spent = 0.0;
};

/// Integral of the marginal price of `item` over [0, x]; +inf past the start of an infinite segment.
double cumulative_cost(const PriceSchedule& sched, std::size_t item, double x);

/// Budget-1 purchase maximizing u . x. Zero-price segments are always taken;
/// priced quantity goes to the best utility per unit price first, ties to the
/// lower-indexed item.
Purchase optimal_purchase(const UtilityVector& u, const PriceSchedule& sched);

/// Free up to 1/2 of every item, +inf afterwards.
PriceSchedule even_split_schedule(std::size_t m);

/// 1 / (1 - ln(5/2) / 3): the constant price making the five-sixths schedule spend exactly one unit.
double five_sixths_price_constant();

/// Agent 1's schedule against an opponent report t2 (item 2 uses 1 - t2):
///   0 on [0, tau], C up to f(1/2) + tau, C/g(y) - C up to 1/2 + tau, +inf after,
/// with tau = 1/2 - f(t2) and g(y) the z in [1/5, 1/2] with f(1 - z) - f(t2) + 1/2 = y.
PriceSchedule five_sixths_price_schedule(double t2);

/// g(y) for the schedule against t2, by bisection on z in [1/5, 1/2].
double five_sixths_g(double t2, double y);

/// Two-item mechanism where each agent buys against the schedule built from the other's report.
MechanismHandle dip_five_sixths_mechanism();

}  // namespace spalloc
