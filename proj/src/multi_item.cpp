#include "spalloc/multi_item.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <thread>
#include <vector>

#include "spalloc/error.hpp"
#include "spalloc/numeric.hpp"

namespace spalloc {
namespace {

constexpr double kGoldenTol = 1e-12;

// Best r1 * r2^c on the segment from `end` to u*; no range checks.
double segment_max(double e1, double e2, double s1, double s2, double c) {
  auto f = [&](double lam) {
    const double r1 = (1.0 - lam) * e1 + lam * s1;
    const double r2 = (1.0 - lam) * e2 + lam * s2;
    if (r1 <= 0.0 || r2 <= 0.0) return 0.0;
    return r1 * std::pow(r2, c);
  };
  return golden_section_max(f, 0.0, 1.0, kGoldenTol).value;
}

double segment_bound_unchecked(UtilityPoint u, double c) {
  return std::max(segment_max(1.0, 0.0, u.r1, u.r2, c), segment_max(0.0, 1.0, u.r1, u.r2, c));
}

double combined_welfare_bound(UtilityPoint u, double c, const std::array<double, 3>& w) {
  const double wc = segment_bound_unchecked(u, c);
  const double wi = segment_bound_unchecked(u, 1.0 / c);
  const double w1 = segment_bound_unchecked(u, 1.0);
  return w[0] * (wc + std::pow(wc, 1.0 / c)) + w[1] * (wi + std::pow(wi, c)) + w[2] * std::max(2.0 * w1, 1.0);
}

void check_exponent(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw InputError("exponent c must be positive and finite");
}

}  // namespace

PAResult solve_weighted_product(const UtilityVector& u1, const UtilityVector& u2, double c) {
  check_exponent(c);
  if (u1.size() != u2.size()) throw InputError("bids have different dimensions");
  const std::size_t m = u1.size();
  const std::vector<std::size_t> order = ratio_order(u1, u2);

  // prefix1[k]: agent 1 value of the first k items; suffix2[k]: agent 2 value of items k.. in order.
  std::vector<double> prefix1(m + 1, 0.0), suffix2(m + 1, 0.0);
  for (std::size_t k = 0; k < m; ++k) prefix1[k + 1] = prefix1[k] + u1[order[k]];
  for (std::size_t k = m; k-- > 0;) suffix2[k] = suffix2[k + 1] + u2[order[k]];

  double best_log = -std::numeric_limits<double>::infinity();
  std::size_t best_k = 0;
  double best_x = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double p1 = prefix1[k];
    const double p2 = suffix2[k + 1];
    const double a = u1[order[k]];
    const double b = u2[order[k]];
    auto g = [&](double x) {
      const double v1 = p1 + x * a;
      const double v2 = p2 + (1.0 - x) * b;
      if (v1 <= 0.0 || v2 <= 0.0) return -std::numeric_limits<double>::infinity();
      return std::log(v1) + c * std::log(v2);
    };
    const Extremum e = golden_section_max(g, 0.0, 1.0, kGoldenTol);
    if (e.value > best_log) {
      best_log = e.value;
      best_k = k;
      best_x = e.x;
    }
  }
  if (!std::isfinite(best_log)) throw InputError("weighted product is zero for every split");

  PAResult res;
  res.c = c;
  res.base_allocation = Allocation(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double x = k < best_k ? 1.0 : (k == best_k ? best_x : 0.0);
    res.base_allocation.set_share(0, order[k], x);
    res.base_allocation.set_share(1, order[k], 1.0 - x);
  }
  const double v1 = res.base_allocation.utility(0, u1);
  const double v2 = res.base_allocation.utility(1, u2);
  const double scale1 = std::pow(v2, c);
  const double scale2 = std::pow(v1, 1.0 / c);
  res.w_value = v1 * scale1;
  res.scaled_allocation = res.base_allocation;
  for (std::size_t j = 0; j < m; ++j) {
    res.scaled_allocation.bundle(0)[j] *= scale1;
    res.scaled_allocation.bundle(1)[j] *= scale2;
  }
  return res;
}

MechanismHandle pa_mechanism(double c) {
  check_exponent(c);
  char label[48];
  std::snprintf(label, sizeof label, "pa:%g", c);
  return {[c](const UtilityVector& b1, const UtilityVector& b2) {
            return solve_weighted_product(b1, b2, c).scaled_allocation;
          },
          label};
}

MechanismHandle pa_max_mechanism() {
  return {[](const UtilityVector& b1, const UtilityVector& b2) {
            PAResult r = solve_weighted_product(b1, b2, 1.0);
            const double sw_pa = r.scaled_allocation.utility(0, b1) + r.scaled_allocation.utility(1, b2);
            if (sw_pa > 1.0) return r.scaled_allocation;
            return Allocation(std::vector<double>(b1.size(), 0.5), std::vector<double>(b1.size(), 0.5));
          },
          "pa-max"};
}

MechanismHandle averaged_pa_mechanism() {
  const double c = kAveragedPaExponent;
  const auto& w = kAveragedPaWeights;
  return average_mechanisms({{w[0], pa_mechanism(c)}, {w[1], pa_mechanism(1.0 / c)}, {w[2], pa_max_mechanism()}});
}

double aur_segment_bound(UtilityPoint u, double c) {
  check_exponent(c);
  const double tol = 1e-12;
  const double sum = u.r1 + u.r2;
  if (u.r1 < -tol || u.r2 < -tol || u.r1 > 1.0 + tol || u.r2 > 1.0 + tol || sum < 1.0 - tol || sum > 2.0 + tol) {
    throw InputError("u* must satisfy 0 <= r <= 1 and 1 <= r1 + r2 <= 2");
  }
  return segment_bound_unchecked(u, c);
}

double pa_point_bound(UtilityPoint u, double c, const std::array<double, 3>& weights) {
  check_exponent(c);
  return combined_welfare_bound(u, c, weights) / (u.r1 + u.r2);
}

PACertificate pa_ratio_certificate(double c, const std::array<double, 3>& weights, double grid_step, int workers,
                                   const std::optional<std::filesystem::path>& csv_out) {
  check_exponent(c);
  const double k_real = 1.0 / grid_step;
  const auto k = static_cast<int>(std::lround(k_real));
  if (!(grid_step > 0.0) || k < 1 || std::abs(k_real - k) > 1e-9 * k) {
    throw InputError("grid_step must be 1/k for a positive integer k");
  }
  workers = std::max(1, workers);

  // bound[i][j - (k - i)] for the points with i + j >= k
  std::vector<std::vector<double>> bounds(k + 1);
  auto run_rows = [&](int w) {
    for (int i = w; i <= k; i += workers) {
      bounds[i].resize(i + 1);
      for (int j = k - i; j <= k; ++j) {
        bounds[i][j - (k - i)] = pa_point_bound({static_cast<double>(i) / k, static_cast<double>(j) / k}, c, weights);
      }
    }
  };
  if (workers == 1) {
    run_rows(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run_rows, w);
    for (auto& t : pool) t.join();
  }

  PACertificate cert;
  cert.grid_min = std::numeric_limits<double>::infinity();
  std::ofstream csv;
  if (csv_out) {
    csv.open(*csv_out);
    if (!csv) throw std::runtime_error("cannot write " + csv_out->string());
    csv << "u1,u2,bound\n";
    csv.precision(17);
  }
  for (int i = 0; i <= k; ++i) {
    for (int j = k - i; j <= k; ++j) {
      const double b = bounds[i][j - (k - i)];
      ++cert.points;
      if (b < cert.grid_min) {
        cert.grid_min = b;
        cert.argmin = {static_cast<double>(i) / k, static_cast<double>(j) / k};
      }
      if (csv_out) csv << static_cast<double>(i) / k << ',' << static_cast<double>(j) / k << ',' << b << '\n';
    }
  }
  cert.corrected = cert.grid_min * (1.0 - 2.0 * grid_step);
  return cert;
}

namespace {

struct Cell {
  double a1, a2, h;
};

void refine_cell(const Cell& cell, double c, const std::array<double, 3>& w, double target, double min_step,
                 CertifiedBound& out) {
  const double corner_sum = cell.a1 + cell.a2;
  if (corner_sum + 2.0 * cell.h < 1.0) return;  // entirely below the region
  ++out.cells;
  const UtilityPoint corner{cell.a1, cell.a2};
  const double b = combined_welfare_bound(corner, c, w) / (corner_sum + 2.0 * cell.h);
  if (b >= target || cell.h <= min_step * (1.0 + 1e-9)) {
    if (b < out.bound) {
      out.bound = b;
      out.worst_cell = corner;
      out.worst_cell_size = cell.h;
    }
    return;
  }
  const double h = 0.5 * cell.h;
  for (int di = 0; di < 2; ++di)
    for (int dj = 0; dj < 2; ++dj) refine_cell({cell.a1 + di * h, cell.a2 + dj * h, h}, c, w, target, min_step, out);
}

}  // namespace

CertifiedBound pa_certified_bound(double c, const std::array<double, 3>& weights, double grid_step, double target,
                                  double min_step, int workers) {
  check_exponent(c);
  const auto k = static_cast<int>(std::lround(1.0 / grid_step));
  if (k < 1 || !(min_step > 0.0)) throw InputError("grid_step and min_step must be positive");
  workers = std::max(1, workers);
  std::vector<CertifiedBound> partial(workers);
  for (auto& p : partial) p.bound = std::numeric_limits<double>::infinity();
  auto run_rows = [&](int wk) {
    for (int i = wk; i < k; i += workers) {
      for (int j = 0; j < k; ++j) {
        refine_cell({static_cast<double>(i) / k, static_cast<double>(j) / k, 1.0 / k}, c, weights, target, min_step,
                    partial[wk]);
      }
    }
  };
  if (workers == 1) {
    run_rows(0);
  } else {
    std::vector<std::thread> pool;
    for (int wk = 0; wk < workers; ++wk) pool.emplace_back(run_rows, wk);
    for (auto& t : pool) t.join();
  }
  CertifiedBound out;
  out.bound = std::numeric_limits<double>::infinity();
  for (const auto& p : partial) {
    out.cells += p.cells;
    const bool better = p.bound < out.bound ||
                        (p.bound == out.bound && std::make_pair(p.worst_cell.r1, p.worst_cell.r2) <
                                                     std::make_pair(out.worst_cell.r1, out.worst_cell.r2));
    if (better) {
      out.bound = p.bound;
      out.worst_cell = p.worst_cell;
      out.worst_cell_size = p.worst_cell_size;
    }
  }
  return out;
}

}  // namespace spalloc
