#include "spalloc/lp/instance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spalloc/error.hpp"

namespace spalloc::lp {

std::string_view to_string(Relation rel) {
  switch (rel) {
    case Relation::less_equal: return "<=";
    case Relation::equal: return "=";
    case Relation::greater_equal: return ">=";
  }
  return "?";
}

std::string_view to_string(RowTag tag) {
  switch (tag) {
    case RowTag::sp: return "sp";
    case RowTag::competitiveness: return "comp";
    case RowTag::fullness: return "full";
    case RowTag::feasibility: return "feas";
    case RowTag::nonnegativity: return "nonneg";
  }
  return "?";
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
  }
  return "?";
}

std::optional<RowTag> parse_row_tag(std::string_view text) {
  for (RowTag tag : {RowTag::sp, RowTag::competitiveness, RowTag::fullness, RowTag::feasibility,
                     RowTag::nonnegativity}) {
    if (text == to_string(tag)) return tag;
  }
  return std::nullopt;
}

int LPInstance::add_variable(std::string name, double lower, double upper) {
  if (index_.contains(name)) throw InputError("duplicate variable name: " + name);
  const int j = num_variables();
  index_.emplace(name, j);
  variables_.push_back(Variable{std::move(name), lower, upper});
  return j;
}

int LPInstance::add_row(std::string name, std::span<const Term> terms, Relation rel, double rhs,
                        RowTag tag) {
  const std::size_t begin = terms_.size();
  terms_.insert(terms_.end(), terms.begin(), terms.end());
  auto first = terms_.begin() + static_cast<std::ptrdiff_t>(begin);
  std::sort(first, terms_.end(), [](const Term& a, const Term& b) { return a.var < b.var; });
  // merge duplicates in place
  auto out = first;
  for (auto it = first; it != terms_.end(); ++it) {
    if (out != first && (out - 1)->var == it->var) {
      (out - 1)->coef += it->coef;
    } else {
      *out++ = *it;
    }
  }
  terms_.erase(std::remove_if(first, out, [](const Term& t) { return t.coef == 0.0; }), terms_.end());
  row_start_.push_back(terms_.size());
  rows_.push_back(RowInfo{std::move(name), rel, rhs, tag});
  return num_rows() - 1;
}

void LPInstance::set_objective(Sense sense, std::span<const Term> terms) {
  sense_ = sense;
  objective_.assign(terms.begin(), terms.end());
}

std::span<const Term> LPInstance::row_terms(int i) const {
  return std::span<const Term>(terms_.data() + row_start_[i], row_start_[i + 1] - row_start_[i]);
}

std::optional<int> LPInstance::find_variable(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t LPInstance::count_rows(RowTag tag) const {
  return static_cast<std::size_t>(
      std::count_if(rows_.begin(), rows_.end(), [tag](const RowInfo& r) { return r.tag == tag; }));
}

void LPInstance::validate() const {
  const int n = num_variables();
  for (const auto& v : variables_) {
    if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower > v.upper) {
      throw InputError("variable " + v.name + " has inverted bounds");
    }
  }
  for (int i = 0; i < num_rows(); ++i) {
    for (const Term& t : row_terms(i)) {
      if (t.var < 0 || t.var >= n) throw InputError("row " + rows_[i].name + " references an undeclared variable");
      if (!std::isfinite(t.coef)) throw InputError("row " + rows_[i].name + " has a non-finite coefficient");
    }
    if (std::isnan(rows_[i].rhs)) throw InputError("row " + rows_[i].name + " has a NaN right-hand side");
  }
  for (const Term& t : objective_) {
    if (t.var < 0 || t.var >= n) throw InputError("objective references an undeclared variable");
  }
}

bool structurally_equal(const LPInstance& a, const LPInstance& b) {
  if (a.num_variables() != b.num_variables() || a.num_rows() != b.num_rows()) return false;
  if (a.sense() != b.sense()) return false;
  for (int j = 0; j < a.num_variables(); ++j) {
    const auto& va = a.variable(j);
    const auto& vb = b.variable(j);
    if (va.name != vb.name || va.lower != vb.lower || va.upper != vb.upper) return false;
  }
  auto same_terms = [](std::span<const Term> x, std::span<const Term> y) {
    return std::equal(x.begin(), x.end(), y.begin(), y.end(),
                      [](const Term& p, const Term& q) { return p.var == q.var && p.coef == q.coef; });
  };
  if (!same_terms(a.objective(), b.objective())) return false;
  for (int i = 0; i < a.num_rows(); ++i) {
    const auto& ra = a.row(i);
    const auto& rb = b.row(i);
    if (ra.name != rb.name || ra.rel != rb.rel || ra.rhs != rb.rhs || ra.tag != rb.tag) return false;
    if (!same_terms(a.row_terms(i), b.row_terms(i))) return false;
  }
  return true;
}

std::optional<double> LPSolution::value(std::string_view name) const {
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (names[j] == name) return values[j];
  }
  return std::nullopt;
}

Violation recheck(const LPInstance& lp, std::span<const double> x) {
  Violation v;
  for (int i = 0; i < lp.num_rows(); ++i) {
    double activity = 0.0;
    for (const Term& t : lp.row_terms(i)) activity += t.coef * x[t.var];
    const auto& row = lp.row(i);
    double viol = 0.0;
    switch (row.rel) {
      case Relation::less_equal: viol = activity - row.rhs; break;
      case Relation::greater_equal: viol = row.rhs - activity; break;
      case Relation::equal: viol = std::abs(activity - row.rhs); break;
    }
    if (viol > v.max_row) {
      v.max_row = viol;
      v.worst_row = i;
    }
  }
  for (int j = 0; j < lp.num_variables(); ++j) {
    const auto& var = lp.variable(j);
    v.max_bound = std::max({v.max_bound, var.lower - x[j], x[j] - var.upper});
  }
  return v;
}

double evaluate_objective(const LPInstance& lp, std::span<const double> x) {
  double value = 0.0;
  for (const Term& t : lp.objective()) value += t.coef * x[t.var];
  return value;
}

}  // namespace spalloc::lp
