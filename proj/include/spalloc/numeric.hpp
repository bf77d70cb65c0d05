#pragma once

#include <functional>
#include <utility>

namespace spalloc {

struct Extremum {
  double x;
  double value;
};

/// Golden-section search for the maximum of a unimodal function on [lo, hi].
/// Stops when the bracket is narrower than `tol`; the endpoints are compared too.
Extremum golden_section_max(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-12);

/// Root of a monotone function on [lo, hi] by bisection. `f(lo)` and `f(hi)`
/// must have opposite signs (or one of them be zero).
double bisect(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-12);

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
double adaptive_simpson(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-10,
                        int max_depth = 48);

}  // namespace spalloc
