#pragma once

#include <functional>
#include <string>
#include <vector>

#include "spalloc/core.hpp"
#include "spalloc/piecewise.hpp"
#include "spalloc/qr_tables.hpp"

namespace spalloc {

/// Two-item mechanism given by one scalar function A(b1, s): the share of
/// item 1 that goes to a bidder reporting b1 against an opponent report s.
///
/// The opponent report first passes through `opponent_map` (identity unless
/// the mechanism rounds), and the full allocation is
///   A11 = A(b1, T(b2)),  A12 = A(1 - b1, 1 - T(b2)),
///   A21 = A(b2, T(b1)),  A22 = A(1 - b2, 1 - T(b1)).
class SymmetricTwoItemMechanism {
 public:
  using Fn = std::function<double(double, double)>;
  using Map = std::function<double(double)>;

  SymmetricTwoItemMechanism(Fn a_fn, std::string label, Map opponent_map = {},
                            std::vector<double> breakpoints = {});

  /// A11: share of item 1 for agent 1.
  [[nodiscard]] double a(double b1, double b2) const { return a_fn_(b1, opponent(b2)); }
  /// A12: share of item 2 for agent 1.
  [[nodiscard]] double a_other(double b1, double b2) const { return a_fn_(1.0 - b1, 1.0 - opponent(b2)); }
  /// The underlying A(b1, s) with no opponent map applied.
  [[nodiscard]] double core(double b1, double s) const { return a_fn_(b1, s); }
  [[nodiscard]] double opponent(double b2) const { return map_ ? map_(b2) : b2; }
  [[nodiscard]] bool rounds_opponent() const { return static_cast<bool>(map_); }

  [[nodiscard]] Allocation allocation(double b1, double b2) const;
  [[nodiscard]] MechanismHandle handle() const;
  [[nodiscard]] const std::string& label() const { return label_; }
  /// Points in b1 where A may fail to be differentiable.
  [[nodiscard]] const std::vector<double>& breakpoints() const { return breakpoints_; }

 private:
  Fn a_fn_;
  std::string label_;
  Map map_;
  std::vector<double> breakpoints_;
};

/// b1 * A11 + (1 - b1) * A12: agent 1's truthful utility with type b1 against report b2.
double u_hat(const SymmetricTwoItemMechanism& mech, double b1, double b2);

PiecewiseFunction five_sixths_f();
/// 0 on [0, 1/5]; 5/6 - 1/(6t) - ln(5t)/6 on [1/5, 1/2]; 1/2 - ln(5 - 5t)/6 on [1/2, 4/5]; 1/2 on [4/5, 1].
double f_five_sixths(double t);

/// A(b1, b2) = f(b1) - f(b2) + 1/2.
SymmetricTwoItemMechanism five_sixths_mechanism();

SymmetricTwoItemMechanism constant_mechanism(double value = 0.5);

/// First-best by reported bids: item 1 goes to the higher b, ties split evenly. Not strategyproof.
SymmetricTwoItemMechanism dictator_fixture();

/// Default building blocks of the partial family: f1(t) = t on [0, 1/2], f2(t) = ln(2t) - t + 1/2 on [1/2, 1].
PiecewiseFunction partial_f1();
PiecewiseFunction partial_f2();

/// Largest |t f1'(t) - (1 - t) f2'(1 - t)| over t = k/samples in [0, 1/2], with its location.
struct CouplingCheck {
  double max_violation;
  double at;
};
CouplingCheck coupling_violation(const PiecewiseFunction& f1, const PiecewiseFunction& f2, int samples = 1000);

/// Nearest multiple of 1/n, halfway points rounded down.
double round_to_grid(double t, int n);

/// Rounding mechanism built from Q/R tables:
///   A(t1, s) = Q(s) f1(t1) + R(s)                          for t1 <= 1/2
///   A(t1, s) = Q(s) f1(1/2) + R(s) + Q(1 - s) f2(t1)       for t1 > 1/2
/// with the opponent report rounded to the table grid first.
/// Throws InputError when f1/f2 violate their domain, anchoring or coupling conditions.
SymmetricTwoItemMechanism partial_family_mechanism(const PiecewiseFunction& f1, const PiecewiseFunction& f2,
                                                   const QRTables& qr);

}  // namespace spalloc
