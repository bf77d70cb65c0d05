#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace spalloc::lp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Relation { less_equal, equal, greater_equal };

// Which constraint family a row came from. Every row carries one.
enum class RowTag { sp, competitiveness, fullness, feasibility, nonnegativity };

enum class Sense { maximize, minimize };

enum class SolveStatus { optimal, infeasible, unbounded };

std::string_view to_string(Relation rel);
std::string_view to_string(RowTag tag);
std::string_view to_string(SolveStatus status);
std::optional<RowTag> parse_row_tag(std::string_view text);

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = kInfinity;
};

struct Term {
  int var;
  double coef;
};

struct RowInfo {
  std::string name;
  Relation rel;
  double rhs;
  RowTag tag;
};

/// Linear program with named variables and tagged rows.
///
/// Coefficients are stored row-wise in one contiguous CSR block; duplicate
/// variables inside a row are merged when the row is added.
class LPInstance {
 public:
  int add_variable(std::string name, double lower = 0.0, double upper = kInfinity);
  int add_row(std::string name, std::span<const Term> terms, Relation rel, double rhs, RowTag tag);

  void set_objective(Sense sense, std::span<const Term> terms);

  [[nodiscard]] int num_variables() const { return static_cast<int>(variables_.size()); }
  [[nodiscard]] int num_rows() const { return static_cast<int>(rows_.size()); }
  [[nodiscard]] std::size_t num_nonzeros() const { return terms_.size(); }

  [[nodiscard]] const Variable& variable(int j) const { return variables_[j]; }
  [[nodiscard]] const std::vector<Variable>& variables() const { return variables_; }
  [[nodiscard]] const RowInfo& row(int i) const { return rows_[i]; }
  [[nodiscard]] std::span<const Term> row_terms(int i) const;
  [[nodiscard]] Sense sense() const { return sense_; }
  [[nodiscard]] const std::vector<Term>& objective() const { return objective_; }

  [[nodiscard]] std::optional<int> find_variable(std::string_view name) const;
  [[nodiscard]] std::size_t count_rows(RowTag tag) const;

  /// Throws if a row references an undeclared variable or a bound pair is inverted.
  void validate() const;

 private:
  std::vector<Variable> variables_;
  std::unordered_map<std::string, int> index_;
  std::vector<RowInfo> rows_;
  std::vector<std::size_t> row_start_{0};
  std::vector<Term> terms_;
  Sense sense_ = Sense::maximize;
  std::vector<Term> objective_;
};

bool structurally_equal(const LPInstance& a, const LPInstance& b);

struct LPSolution {
  SolveStatus status = SolveStatus::infeasible;
  double objective_value = 0.0;
  std::vector<std::string> names;
  std::vector<double> values;
  // Filled by the independent re-check in solve().
  double max_row_violation = 0.0;
  double max_bound_violation = 0.0;
  long iterations = 0;
  std::string backend;

  [[nodiscard]] std::optional<double> value(std::string_view name) const;
};

struct Violation {
  double max_row = 0.0;
  double max_bound = 0.0;
  int worst_row = -1;
};

/// Evaluates every row and bound of `lp` at `x` without reference to any solver state.
Violation recheck(const LPInstance& lp, std::span<const double> x);

double evaluate_objective(const LPInstance& lp, std::span<const double> x);

}  // namespace spalloc::lp
