#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spalloc/core.hpp"
#include "spalloc/two_item.hpp"

namespace spalloc {

struct SPReport {
  bool passed = true;
  double max_regret = 0.0;
  // Bid vectors of the worst case; for two items only the first entries matter.
  std::vector<double> true_bid;
  std::vector<double> misreport;
  std::vector<double> opponent_bid;
  int agent = 0;
  long checks = 0;
};

struct SPOptions {
  int items = 2;
  // 0 on two items: every (true, misreport, opponent) triple of the grid.
  // Otherwise the number of sampled triples, split into groups of misreports_per_type.
  long samples = 0;
  int misreports_per_type = 1000;
  std::uint64_t seed = 20240601;
  int workers = 1;
};

/// Largest gain any tested misreport gives either agent; passed iff it is at most tol.
SPReport check_sp_direct(const MechanismHandle& mech, int grid_n, double tol, const SPOptions& options = {});

/// For each opponent value on the grid: discrete convexity of u_hat in b1 and the
/// subgradient inequality u_hat(b1) >= u_hat(t1) + z(t1) (b1 - t1) with z = A11 - A12.
SPReport check_rochet(const SymmetricTwoItemMechanism& mech, int grid_n, double tol);

/// t1 dA/db1(t1, t2) = (1 - t1) dA/db1(1 - t1, 1 - t2) by central differences
/// (step 1e-6) away from 1e-3 neighbourhoods of the breakpoints, plus monotonicity
/// and continuity of A in b1.
SPReport check_sufficient_condition(const SymmetricTwoItemMechanism& mech, const std::vector<double>& breakpoints,
                                    double tol, int grid_n = 200);

struct RatioReport {
  double min_ratio = 1.0;
  std::vector<double> argmin_bid1;
  std::vector<double> argmin_bid2;
  int grid_n = 0;
  long points = 0;
};

struct RatioOptions {
  int items = 2;
  long samples = 100000;  // used when items > 2
  std::uint64_t seed = 20240601;
  int workers = 1;
};

/// Minimum competitive ratio over the two-item bid grid (multiples of 1/grid_n),
/// or over sampled simplex-grid pairs for more items. Ties go to the first point
/// with t2 ascending, then t1 ascending.
RatioReport measure_ratio(const MechanismHandle& mech, int grid_n, const RatioOptions& options = {});

enum class OpponentCase { opponent_0_1, opponent_0 };

/// Largest / smallest utility agent 1 can get at (t1, opponent) when the pair must
/// reach h times the first-best welfare. h must lie in [10/11, 1].
double u_upper(double t1, OpponentCase c, double h);
double l_lower(double t1, double h);

struct BoundCertificate {
  double h = 0.0;
  double q_star = 0.0;
  double t1_prime = 0.0;
  double t1_double_prime = 0.0;
};

struct CertificateCheck {
  bool valid = false;
  double slack_a = 0.0;  // q*(1 - t1') - U_h(t1', 0.1)
  double slack_b = 0.0;  // 1.1h - q* + (11h - 10)(t1'' - 0.1) - U_h(t1'', 0)
};

CertificateCheck evaluate_certificate(const BoundCertificate& cert);
/// Both strict inequalities hold (zero slack tolerance).
bool check_bound_certificate(const BoundCertificate& cert);

struct CertificateSearch {
  double h_lo = 0.93;
  double h_hi = 0.99;
  double h_step = 1e-4;
  double q_lo = 0.0;
  double q_hi = 1.0;
  double t_step = 1e-3;  // grid for t1' in [0, 1) and t1'' in [0.1, 1]
};

struct CertificateSearchResult {
  bool found = false;
  BoundCertificate cert;
  CertificateCheck check;
};

/// Smallest h on the h grid for which a certificate exists, with the q* at the
/// middle of the admissible interval and the best t1', t1'' found on the grid.
CertificateSearchResult search_best_certificate(const CertificateSearch& params = {});

std::string to_json(const SPReport& r);
std::string to_json(const RatioReport& r);
std::string to_json(const BoundCertificate& cert, const CertificateCheck& check);

}  // namespace spalloc
