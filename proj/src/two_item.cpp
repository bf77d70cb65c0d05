#include "spalloc/two_item.hpp"

#include <cmath>
#include <memory>

#include "spalloc/error.hpp"

namespace spalloc {

SymmetricTwoItemMechanism::SymmetricTwoItemMechanism(Fn a_fn, std::string label, Map opponent_map,
                                                     std::vector<double> breakpoints)
    : a_fn_(std::move(a_fn)),
      label_(std::move(label)),
      map_(std::move(opponent_map)),
      breakpoints_(std::move(breakpoints)) {}

Allocation SymmetricTwoItemMechanism::allocation(double b1, double b2) const {
  return Allocation({a(b1, b2), a_other(b1, b2)}, {a(b2, b1), a_other(b2, b1)});
}

MechanismHandle SymmetricTwoItemMechanism::handle() const {
  auto self = std::make_shared<const SymmetricTwoItemMechanism>(*this);
  return {[self](const UtilityVector& b1, const UtilityVector& b2) {
            if (b1.size() != 2) throw InputError("two-item mechanism evaluated on " + std::to_string(b1.size()) + " items");
            return self->allocation(b1[0], b2[0]);
          },
          label_};
}

double u_hat(const SymmetricTwoItemMechanism& mech, double b1, double b2) {
  return b1 * mech.a(b1, b2) + (1.0 - b1) * mech.a_other(b1, b2);
}

PiecewiseFunction five_sixths_f() {
  return PiecewiseFunction({0.0, 0.2, 0.5, 0.8, 1.0},
                           {Piece::constant(0.0), Piece::log_family(5.0 / 6.0, 0.0, -1.0 / 6.0, -1.0 / 6.0, 5.0, 0.0),
                            Piece::log_family(0.5, 0.0, 0.0, -1.0 / 6.0, -5.0, 1.0), Piece::constant(0.5)});
}

double f_five_sixths(double t) {
  static const PiecewiseFunction f = five_sixths_f();
  return f(t);
}

SymmetricTwoItemMechanism five_sixths_mechanism() {
  return {[](double b1, double b2) { return f_five_sixths(b1) - f_five_sixths(b2) + 0.5; }, "five-sixths", {},
          {0.2, 0.8}};
}

SymmetricTwoItemMechanism constant_mechanism(double value) {
  return {[value](double, double) { return value; }, "constant"};
}

SymmetricTwoItemMechanism dictator_fixture() {
  return {[](double b1, double b2) { return b1 > b2 ? 1.0 : (b1 < b2 ? 0.0 : 0.5); }, "dictator-fixture"};
}

PiecewiseFunction partial_f1() { return PiecewiseFunction({0.0, 0.5}, {Piece::affine(0.0, 1.0)}); }

PiecewiseFunction partial_f2() {
  return PiecewiseFunction({0.5, 1.0}, {Piece::log_family(0.5, -1.0, 0.0, 1.0, 2.0, 0.0)});
}

CouplingCheck coupling_violation(const PiecewiseFunction& f1, const PiecewiseFunction& f2, int samples) {
  CouplingCheck out{0.0, 0.0};
  for (int k = 0; k <= samples; ++k) {
    const double t = 0.5 * k / samples;
    const double v = std::abs(t * f1.derivative(t) - (1.0 - t) * f2.derivative(1.0 - t));
    if (v > out.max_violation) out = {v, t};
  }
  return out;
}

double round_to_grid(double t, int n) { return std::ceil(t * n - 0.5) / n; }

SymmetricTwoItemMechanism partial_family_mechanism(const PiecewiseFunction& f1, const PiecewiseFunction& f2,
                                                   const QRTables& qr) {
  qr.validate();
  if (f1.lower() > 0.0 || f1.upper() < 0.5) throw InputError("f1 must be defined on [0, 1/2]");
  if (f2.lower() > 0.5 || f2.upper() < 1.0) throw InputError("f2 must be defined on [1/2, 1]");
  if (std::abs(f1(0.0)) > 1e-12) throw InputError("f1(0) must be 0");
  if (std::abs(f2(0.5)) > 1e-12) throw InputError("f2(1/2) must be 0");
  const CouplingCheck c = coupling_violation(f1, f2);
  if (c.max_violation > 1e-8) {
    throw InputError("coupling t f1'(t) = (1-t) f2'(1-t) fails by " + std::to_string(c.max_violation) + " at t = " +
                     std::to_string(c.at));
  }
  const int n = qr.n;
  auto tables = std::make_shared<const QRTables>(qr);
  const double f1_half = f1(0.5);
  auto fn = [tables, f1, f2, f1_half, n](double t1, double s) {
    const auto j = static_cast<int>(std::lround(s * n));
    if (t1 <= 0.5) return tables->q_values[j] * f1(t1) + tables->r_values[j];
    return tables->q_values[j] * f1_half + tables->r_values[j] + tables->q_values[n - j] * f2(t1);
  };
  return {fn, "partial-qr", [n](double t) { return round_to_grid(t, n); }, {0.5}};
}

}  // namespace spalloc
