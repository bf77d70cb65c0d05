#pragma once

#include <string>

#include "spalloc/lp/instance.hpp"
#include "spalloc/piecewise.hpp"
#include "spalloc/qr_tables.hpp"

namespace spalloc::lp {

enum class GcVariant { full, partial };

/// Upper-bound LP over symmetric two-item mechanisms on the grid {0, 1/n, ..., 1}.
///
/// Variables A_i_j = A(i/n, j/n) >= 0 and a free `lambda`; maximizes lambda.
/// Rows:
///   sp_i_ip_j   truthful utility at (i, j) beats reporting ip (only |i - ip| = 1 when pruned)
///   comp_i_j    SW(i, j) >= (1 + |i - j|/n) lambda, for i <= j
///   full_i_j    A(i, j) + A(j, i) = 1 (<= 1 for the partial variant), for i <= j
LPInstance build_gc_lp(int n, GcVariant variant, bool prune);

std::string gc_variable(int i, int j);

/// Mechanism-synthesis LP in the unknown tables Q(k/n), R(k/n) >= 0 and lambda:
///   A(t1, t2) = Q(t2) f1(t1) + R(t2)                             for t1 <= 1/2
///   A(t1, t2) = Q(t2) f1(1/2) + R(t2) + Q(1 - t2) f2(t1)           otherwise
/// Rows feas_i_j: A(i, j) + A(j, i) <= 1 - delta, and comp_i_j as in build_gc_lp.
LPInstance build_qr_lp(int n, double delta, const PiecewiseFunction& f1, const PiecewiseFunction& f2);

/// Headroom used for reduced-resolution runs: 2.92 / (2n).
double default_qr_delta(int n);

/// Packages Q, R and lambda from an optimal solution of build_qr_lp(n, delta, ...).
QRTables extract_qr_tables(const LPSolution& sol, int n, double delta);

}  // namespace spalloc::lp
