#include "spalloc/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spalloc/error.hpp"
#include "spalloc/numeric.hpp"

namespace spalloc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double closed_form_primitive(const Piece& p, double t) {
  double v = p.a * t + 0.5 * p.b * t * t;
  const double u = t - p.s;
  if (p.c != 0.0) v += p.c * std::log(std::abs(u));
  if (p.e != 0.0) v += p.e * (u * std::log(p.d * u) - u);
  return v;
}

}  // namespace

Piece Piece::constant(double value) { return affine(value, 0.0); }

Piece Piece::affine(double intercept, double slope) {
  Piece p;
  p.a = intercept;
  p.b = slope;
  return p;
}

Piece Piece::log_family(double a, double b, double c, double e, double d, double s) {
  Piece p;
  p.a = a;
  p.b = b;
  p.c = c;
  p.e = e;
  p.d = d;
  p.s = s;
  return p;
}

Piece Piece::table(std::vector<double> xs, std::vector<double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) throw InputError("table piece needs at least two matching samples");
  if (!std::is_sorted(xs.begin(), xs.end())) throw InputError("table piece abscissae must be sorted");
  Piece p;
  p.kind = Kind::table;
  p.xs = std::move(xs);
  p.ys = std::move(ys);
  return p;
}

Piece Piece::custom(std::function<double(double)> fn, std::function<double(double)> antiderivative) {
  Piece p;
  p.kind = Kind::custom;
  p.fn = std::move(fn);
  p.antiderivative = std::move(antiderivative);
  return p;
}

Piece Piece::infinite() {
  Piece p;
  p.kind = Kind::infinite;
  return p;
}

double Piece::value(double t) const {
  switch (kind) {
    case Kind::closed_form: {
      double v = a + b * t;
      const double u = t - s;
      if (c != 0.0) v += c / u;
      if (e != 0.0) v += e * std::log(d * u);
      return v;
    }
    case Kind::table: {
      if (t <= xs.front()) return ys.front();
      if (t >= xs.back()) return ys.back();
      const auto k = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), t) - xs.begin());
      const double w = (t - xs[k - 1]) / (xs[k] - xs[k - 1]);
      return ys[k - 1] + w * (ys[k] - ys[k - 1]);
    }
    case Kind::custom:
      return fn(t);
    case Kind::infinite:
      return kInf;
  }
  return 0.0;
}

double Piece::derivative(double t) const {
  switch (kind) {
    case Kind::closed_form: {
      double v = b;
      const double u = t - s;
      if (c != 0.0) v -= c / (u * u);
      if (e != 0.0) v += e / u;
      return v;
    }
    case Kind::table: {
      auto k = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), t) - xs.begin());
      k = std::clamp<std::size_t>(k, 1, xs.size() - 1);
      return (ys[k] - ys[k - 1]) / (xs[k] - xs[k - 1]);
    }
    case Kind::custom: {
      const double h = 1e-6;
      return (fn(t + h) - fn(t - h)) / (2 * h);
    }
    case Kind::infinite:
      return 0.0;
  }
  return 0.0;
}

double Piece::integral(double x0, double x1) const {
  if (x1 <= x0) return 0.0;
  switch (kind) {
    case Kind::closed_form:
      if (c == 0.0 && e == 0.0) return a * (x1 - x0) + 0.5 * b * (x1 * x1 - x0 * x0);
      return closed_form_primitive(*this, x1) - closed_form_primitive(*this, x0);
    case Kind::table: {
      double total = 0.0;
      double lo = x0;
      for (double x : xs) {
        if (x <= lo) continue;
        if (x >= x1) break;
        total += 0.5 * (value(lo) + value(x)) * (x - lo);
        lo = x;
      }
      return total + 0.5 * (value(lo) + value(x1)) * (x1 - lo);
    }
    case Kind::custom:
      if (antiderivative) return antiderivative(x1) - antiderivative(x0);
      return adaptive_simpson(fn, x0, x1, 1e-12);
    case Kind::infinite:
      return kInf;
  }
  return 0.0;
}

PiecewiseFunction::PiecewiseFunction(std::vector<double> breakpoints, std::vector<Piece> pieces)
    : breakpoints_(std::move(breakpoints)), pieces_(std::move(pieces)) {
  if (breakpoints_.size() < 2 || pieces_.size() + 1 != breakpoints_.size()) {
    throw InputError("piecewise function needs one more breakpoint than pieces");
  }
  for (std::size_t k = 1; k < breakpoints_.size(); ++k) {
    if (!(breakpoints_[k] >= breakpoints_[k - 1])) throw InputError("breakpoints must be nondecreasing");
  }
}

int PiecewiseFunction::piece_index(double t) const {
  if (t < lower() || t > upper()) {
    throw InputError("argument " + std::to_string(t) + " outside [" + std::to_string(lower()) + ", " +
                     std::to_string(upper()) + "]");
  }
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
  int k = static_cast<int>(it - breakpoints_.begin()) - 1;
  k = std::min(k, static_cast<int>(pieces_.size()) - 1);
  // Skip zero-width pieces at the right end.
  while (k > 0 && breakpoints_[k] == breakpoints_[k + 1] && t >= breakpoints_[k]) --k;
  return k;
}

double PiecewiseFunction::operator()(double t) const { return pieces_[piece_index(t)].value(t); }

double PiecewiseFunction::derivative(double t) const { return pieces_[piece_index(t)].derivative(t); }

double PiecewiseFunction::integral(double x0, double x1) const {
  if (x1 < x0) return -integral(x1, x0);
  x0 = std::max(x0, lower());
  x1 = std::min(x1, upper());
  double total = 0.0;
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    const double lo = std::max(x0, breakpoints_[k]);
    const double hi = std::min(x1, breakpoints_[k + 1]);
    if (hi <= lo) continue;
    const double part = pieces_[k].integral(lo, hi);
    if (part == kInf) return kInf;
    total += part;
  }
  return total;
}

double PiecewiseFunction::min_sampled_increment(int samples) const {
  double prev = (*this)(lower());
  double worst = kInf;
  for (int k = 1; k <= samples; ++k) {
    const double t = k == samples ? upper() : lower() + (upper() - lower()) * k / samples;
    const double v = (*this)(t);
    if (std::isfinite(prev) || std::isfinite(v)) {
      const double inc = (prev == kInf && v == kInf) ? 0.0 : v - prev;
      worst = std::min(worst, inc);
    }
    prev = v;
  }
  return worst;
}

double PiecewiseFunction::max_interior_jump() const {
  double worst = 0.0;
  for (std::size_t k = 1; k < pieces_.size(); ++k) {
    const double x = breakpoints_[k];
    const double left = pieces_[k - 1].value(x);
    const double right = pieces_[k].value(x);
    if (std::isfinite(left) && std::isfinite(right)) worst = std::max(worst, std::abs(left - right));
  }
  return worst;
}

}  // namespace spalloc
