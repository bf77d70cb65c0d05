#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace spalloc {

inline constexpr double kNormalizationTolerance = 1e-12;
inline constexpr double kFeasibilityTolerance = 1e-12;

/// Normalized linear utility (or bid) vector: m >= 2 nonnegative entries summing to 1.
class UtilityVector {
 public:
  /// Throws InputError unless the entries are nonnegative and sum to 1 within 1e-12.
  explicit UtilityVector(std::vector<double> entries);
  /// The two-item vector (t, 1 - t).
  static UtilityVector of_two(double t);

  [[nodiscard]] std::size_t size() const { return entries_.size(); }
  [[nodiscard]] double operator[](std::size_t j) const { return entries_[j]; }
  [[nodiscard]] const std::vector<double>& entries() const { return entries_; }
  [[nodiscard]] double dot(std::span<const double> shares) const;

 private:
  std::vector<double> entries_;
};

/// Fractions of each of m items held by agents 0 and 1.
class Allocation {
 public:
  explicit Allocation(std::size_t m = 2);
  Allocation(std::vector<double> agent0, std::vector<double> agent1);

  [[nodiscard]] std::size_t items() const { return shares_[0].size(); }
  [[nodiscard]] double share(int agent, std::size_t item) const { return shares_[agent][item]; }
  void set_share(int agent, std::size_t item, double value) { shares_[agent][item] = value; }
  [[nodiscard]] const std::vector<double>& bundle(int agent) const { return shares_[agent]; }
  [[nodiscard]] std::vector<double>& bundle(int agent) { return shares_[agent]; }

  [[nodiscard]] double utility(int agent, const UtilityVector& u) const;
  /// Largest amount by which a share leaves [0, 1] or an item is over-allocated.
  [[nodiscard]] double feasibility_violation() const;
  /// Throws InputError if feasibility_violation() exceeds 1e-12.
  void validate() const;

 private:
  std::array<std::vector<double>, 2> shares_;
};

struct UtilityPoint {
  double r1 = 0.0;
  double r2 = 0.0;
};

/// A deterministic two-agent mechanism over bid vectors.
class MechanismHandle {
 public:
  using Evaluator = std::function<Allocation(const UtilityVector&, const UtilityVector&)>;

  MechanismHandle() = default;
  MechanismHandle(Evaluator evaluator, std::string label)
      : evaluator_(std::move(evaluator)), label_(std::move(label)) {}

  Allocation operator()(const UtilityVector& b1, const UtilityVector& b2) const;
  [[nodiscard]] const std::string& label() const { return label_; }
  [[nodiscard]] explicit operator bool() const { return static_cast<bool>(evaluator_); }

 private:
  Evaluator evaluator_;
  std::string label_;
};

MechanismHandle even_split_mechanism();

/// u1 . A_1 + u2 . A_2 under truthful bids.
double social_welfare(const MechanismHandle& mech, const UtilityVector& u1, const UtilityVector& u2);

struct FirstBest {
  double value;
  Allocation allocation;
};

/// Each item goes wholly to the agent valuing it more; ties go to agent 1 (index 0).
FirstBest first_best(const UtilityVector& u1, const UtilityVector& u2);

double competitive_ratio_at(const MechanismHandle& mech, const UtilityVector& u1, const UtilityVector& u2);

/// Share-wise convex combination. Weights must be positive and sum to 1 within 1e-12.
MechanismHandle average_mechanisms(const std::vector<std::pair<double, MechanismHandle>>& parts);

/// Item order used for threshold splits: ratio u1j/u2j descending, u2j = 0 first,
/// u1j = 0 < u2j last, ties by index.
std::vector<std::size_t> ratio_order(const UtilityVector& u1, const UtilityVector& u2);

/// Largest utility agent 2 can attain while agent 1 attains at least r1 (r1 in [0, 1]).
double pareto_frontier_closed_form(const UtilityVector& u1, const UtilityVector& u2, double r1);
double pareto_frontier_lp(const UtilityVector& u1, const UtilityVector& u2, double r1);

/// True iff some feasible allocation gives each agent at least r_i - tol.
/// m = 2 uses the closed-form frontier, larger m a feasibility LP.
bool aur_contains(const UtilityVector& u1, const UtilityVector& u2, UtilityPoint p, double tol = 1e-12);
bool aur_contains_closed_form(const UtilityVector& u1, const UtilityVector& u2, UtilityPoint p, double tol = 1e-12);
bool aur_contains_lp(const UtilityVector& u1, const UtilityVector& u2, UtilityPoint p, double tol = 1e-12);

}  // namespace spalloc
