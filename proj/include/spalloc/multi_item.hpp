#pragma once

#include <array>
#include <filesystem>
#include <optional>

#include "spalloc/core.hpp"

namespace spalloc {

struct PAResult {
  Allocation base_allocation;
  double w_value = 0.0;
  Allocation scaled_allocation;
  double c = 1.0;
};

/// Maximizes u1(a1) * u2(a2)^c over full splits. Items are ordered by
/// ratio_order(); for each candidate split item the split fraction is found
/// by golden-section search, and the best candidate wins.
PAResult solve_weighted_product(const UtilityVector& u1, const UtilityVector& u2, double c);

/// Agent 1 keeps a u2(a2)^c fraction of a1, agent 2 a u1(a1)^(1/c) fraction of a2.
MechanismHandle pa_mechanism(double c);

/// PA_1 or the even split, whichever has higher reported welfare; ties go to the even split.
MechanismHandle pa_max_mechanism();

inline constexpr double kAveragedPaExponent = 0.421;
inline constexpr std::array<double, 3> kAveragedPaWeights = {1029.0 / 4000.0, 1029.0 / 4000.0, 971.0 / 2000.0};

/// 1029/4000 PA_0.421 + 1029/4000 PA_(1/0.421) + 971/2000 PA_max.
MechanismHandle averaged_pa_mechanism();

/// max of r1 * r2^c along the segments (1,0)-u* and (0,1)-u*.
/// u* must satisfy 0 <= r <= 1 and 1 <= r1 + r2 <= 2 (within 1e-12).
double aur_segment_bound(UtilityPoint u_star, double c);

struct PACertificate {
  double grid_min = 0.0;
  UtilityPoint argmin;
  double corrected = 0.0;  // grid_min * (1 - 2 * grid_step)
  long points = 0;
};

/// Lower bound on the averaged mechanism's ratio at one point u* of the first-best frontier.
double pa_point_bound(UtilityPoint u_star, double c, const std::array<double, 3>& weights);

/// Minimum of pa_point_bound over grid points with coordinates in multiples of
/// grid_step and 1 <= r1 + r2. `workers` shards rows of the grid; the result does
/// not depend on it. Optionally writes `u1,u2,bound` rows to csv_out.
PACertificate pa_ratio_certificate(double c, const std::array<double, 3>& weights, double grid_step, int workers = 1,
                                   const std::optional<std::filesystem::path>& csv_out = std::nullopt);

struct CertifiedBound {
  double bound = 0.0;
  UtilityPoint worst_cell;  // lower corner of the limiting cell
  double worst_cell_size = 0.0;
  long cells = 0;
};

/// Bound valid for every real u* in the region: each grid cell is bounded by its
/// lower corner's point bound over (corner sum + 2 * cell size), and cells whose
/// bound is below `target` are split in four until `min_step` is reached.
CertifiedBound pa_certified_bound(double c, const std::array<double, 3>& weights, double grid_step, double target,
                                  double min_step, int workers = 1);

}  // namespace spalloc
