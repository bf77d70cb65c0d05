#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "spalloc/core.hpp"
#include "spalloc/dip.hpp"

namespace spalloc::oracle {

inline UtilityVector random_utility(std::mt19937_64& rng, int m) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> v(m);
  double sum = 0.0;
  for (double& x : v) sum += (x = e(rng));
  for (double& x : v) x /= sum;
  return UtilityVector(v);
}

// max u1(a) u2(1 - a)^c over shares a_j = lo_j + idx_j * step, idx_j in 0..k, clipped to [0, 1].
inline double box_product(const UtilityVector& u1, const UtilityVector& u2, double c, const std::vector<double>& lo,
                          double step, int k, std::vector<double>* argmax = nullptr) {
  const int m = static_cast<int>(u1.size());
  std::vector<int> idx(m, 0);
  double best = -1.0;
  while (true) {
    double v1 = 0.0, v2 = 0.0;
    std::vector<double> a(m);
    for (int j = 0; j < m; ++j) {
      a[j] = std::clamp(lo[j] + idx[j] * step, 0.0, 1.0);
      v1 += u1[j] * a[j];
      v2 += u2[j] * (1.0 - a[j]);
    }
    const double val = v1 * std::pow(v2, c);
    if (val > best) {
      best = val;
      if (argmax) *argmax = a;
    }
    int j = 0;
    while (j < m && ++idx[j] > k) idx[j++] = 0;
    if (j == m) break;
  }
  return best;
}

// Plain grid with spacing 1/k.
inline double grid_product(const UtilityVector& u1, const UtilityVector& u2, double c, int k) {
  return box_product(u1, u2, c, std::vector<double>(u1.size(), 0.0), 1.0 / k, k);
}

// Grid with spacing 1/k, then repeated finer grids around the incumbent. The
// objective is log-concave in the shares, so the zoom cannot leave the optimum's basin.
inline double zoomed_grid_product(const UtilityVector& u1, const UtilityVector& u2, double c, int k, int rounds) {
  std::vector<double> best_a;
  double step = 1.0 / k;
  double best = box_product(u1, u2, c, std::vector<double>(u1.size(), 0.0), step, k, &best_a);
  for (int r = 0; r < rounds; ++r) {
    std::vector<double> lo(best_a.size());
    for (std::size_t j = 0; j < lo.size(); ++j) lo[j] = best_a[j] - 2.0 * step;
    step *= 4.0 / k;
    std::vector<double> a;
    const double v = box_product(u1, u2, c, lo, step, k, &a);
    if (v > best) {
      best = v;
      best_a = a;
    }
  }
  return best;
}

inline double upper_finite(const PiecewiseFunction& p) {
  const auto& bp = p.breakpoints();
  for (std::size_t k = 0; k < p.pieces().size(); ++k)
    if (p.pieces()[k].kind == Piece::Kind::infinite) return bp[k];
  return p.upper();
}

inline PriceSchedule random_schedule(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PriceSchedule s;
  for (int j = 0; j < 2; ++j) {
    std::vector<double> cuts{u(rng), u(rng), u(rng)};
    std::sort(cuts.begin(), cuts.end());
    const double free_end = u(rng) < 0.3 ? 0.0 : 0.4 * cuts[0];
    const double p1 = 0.3 + 3.0 * u(rng);
    const double slope = 6.0 * u(rng);
    const double p2 = p1 + slope * (cuts[1] - free_end);
    std::vector<double> bp{0.0, free_end, cuts[1], cuts[2], 1.0};
    std::vector<Piece> pieces{Piece::constant(0.0), Piece::affine(p1 - slope * free_end, slope), Piece::constant(p2 + 1.0),
                              u(rng) < 0.5 ? Piece::infinite() : Piece::constant(p2 + 5.0)};
    s.per_item.emplace_back(bp, pieces);
  }
  s.validate();
  return s;
}

// Largest x with cost(0, x) <= budget for one item, by bisection on the cumulative cost.
inline double affordable(const PiecewiseFunction& p, double budget) {
  const double cap = upper_finite(p);
  if (p.integral(0.0, cap) <= budget) return cap;
  double lo = 0.0, hi = cap;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (p.integral(0.0, mid) <= budget ? lo : hi) = mid;
  }
  return lo;
}

// One quantity on the 1/steps grid, the other as large as the remaining budget allows.
inline double knapsack_oracle(const UtilityVector& u, const PriceSchedule& s, int steps = 500) {
  double best = 0.0;
  for (int first = 0; first < 2; ++first) {
    const int other = 1 - first;
    const auto& pf = s.per_item[first];
    for (int k = 0; k <= steps; ++k) {
      const double x = static_cast<double>(k) / steps;
      const double cost = pf.integral(0.0, x);
      if (cost > 1.0) break;
      const double y = affordable(s.per_item[other], 1.0 - cost);
      best = std::max(best, u[first] * x + u[other] * y);
    }
  }
  return best;
}

}  // namespace spalloc::oracle
