#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "spalloc/lp/instance.hpp"
#include "spalloc/lp/simplex.hpp"

namespace spalloc::lp {

// Row re-check threshold applied to every optimal solution.
inline constexpr double kRecheckTolerance = 1e-7;

class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  [[nodiscard]] virtual std::string name() const = 0;
  // Solution without the independent re-check; use lp::solve() instead.
  [[nodiscard]] virtual LPSolution solve_unchecked(const LPInstance& lp) const = 0;
};

enum class Route {
  automatic,  // dualize when rows outnumber variables
  primal,
  dual,
};

/// In-process bounded revised simplex.
class EmbeddedSimplex final : public SolverBackend {
 public:
  explicit EmbeddedSimplex(SimplexOptions options = {}, Route route = Route::automatic)
      : options_(options), route_(route) {}
  [[nodiscard]] std::string name() const override;
  [[nodiscard]] LPSolution solve_unchecked(const LPInstance& lp) const override;

 private:
  SimplexOptions options_;
  Route route_;
};

/// Hands the instance to an external program as an LP file:
///   <command> <input.lp> <output.json>
/// The program writes the solution JSON format (status, objective, nonzeros).
class ExternalSolver final : public SolverBackend {
 public:
  explicit ExternalSolver(std::string command) : command_(std::move(command)) {}
  [[nodiscard]] std::string name() const override { return "external:" + command_; }
  [[nodiscard]] LPSolution solve_unchecked(const LPInstance& lp) const override;

 private:
  std::string command_;
};

/// "embedded", "embedded-primal", "embedded-dual" or "external:<command>".
std::unique_ptr<SolverBackend> make_backend(std::string_view id);

/// Environment variable naming the default backend (same syntax as make_backend).
inline constexpr const char* kBackendEnvVar = "SPALLOC_LP_BACKEND";
std::string default_backend_id();

/// Solves and re-verifies every row and bound at kRecheckTolerance. Throws
/// NumericalError when an "optimal" answer fails the re-check.
LPSolution solve(const LPInstance& lp, const SolverBackend& backend);
LPSolution solve(const LPInstance& lp);

}  // namespace spalloc::lp
