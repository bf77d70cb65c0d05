#include "spalloc/numeric.hpp"

#include <cmath>
#include <stdexcept>

#include "spalloc/error.hpp"

namespace spalloc {

Extremum golden_section_max(const std::function<double(double)>& f, double lo, double hi, double tol) {
  if (hi < lo) std::swap(lo, hi);
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  const double f_lo = f(lo);
  const double f_hi = f(hi);
  double a = lo;
  double b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  Extremum best{0.5 * (a + b), f(0.5 * (a + b))};
  if (f_lo > best.value) best = {lo, f_lo};
  if (f_hi > best.value) best = {hi, f_hi};
  return best;
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double tol) {
  double f_lo = f(lo);
  const double f_hi = f(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if ((f_lo > 0) == (f_hi > 0)) throw NumericalError("bisect: root is not bracketed");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f_mid = f(mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid > 0) == (f_lo > 0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

namespace {

double simpson_step(const std::function<double(double)>& f, double a, double fa, double b, double fb, double m,
                    double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double lo, double hi, double tol, int max_depth) {
  if (hi == lo) return 0.0;
  const double m = 0.5 * (lo + hi);
  const double fa = f(lo);
  const double fb = f(hi);
  const double fm = f(m);
  const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, lo, fa, hi, fb, m, fm, whole, tol, max_depth);
}

}  // namespace spalloc
