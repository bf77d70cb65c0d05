#pragma once

#include <Eigen/SparseCore>
#include <cstdint>
#include <vector>

namespace spalloc::lp {

/// min cost'z  s.t.  matrix z = rhs,  lower <= z <= upper.
struct ComputationalForm {
  Eigen::SparseMatrix<double> matrix;  // column-major
  std::vector<double> cost;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> rhs;
};

enum class Pricing { dantzig, devex };

struct SimplexOptions {
  double primal_tol = 1e-9;
  double dual_tol = 1e-9;
  double pivot_tol = 1e-7;
  int refactor_interval = 100;
  long max_iterations = 50'000'000;
  // Random expansion of finite bounds applied during the solve and removed
  // before the final clean-up pass. Zero disables it.
  double perturbation = 1e-7;
  Pricing pricing = Pricing::devex;
  std::uint64_t seed = 20240601;
  bool verbose = false;
};

enum class EngineStatus { optimal, infeasible, unbounded, iteration_limit };

struct EngineResult {
  EngineStatus status = EngineStatus::infeasible;
  std::vector<double> z;          // one entry per column of the form
  std::vector<double> row_duals;  // y with reduced costs d = cost - matrix' y
  double objective = 0.0;
  long iterations = 0;
};

EngineResult run_simplex(const ComputationalForm& form, const SimplexOptions& options = {});

}  // namespace spalloc::lp
