#include "spalloc/lp/simplex.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <random>

#include "spalloc/error.hpp"

namespace spalloc::lp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDriftTolerance = 1e-7;

enum class State : std::uint8_t { basic, at_lower, at_upper, at_zero, frozen };

// Product-form update: column `pos` of the identity replaced by alpha.
struct Eta {
  int pos;
  double pivot;
  std::vector<int> idx;
  std::vector<double> val;
};

struct RatioResult {
  enum Kind { pivot, bound_flip, unbounded } kind = unbounded;
  int row = -1;
  double theta = 0.0;
  bool leaves_at_upper = false;
};

class RevisedSimplex {
 public:
  RevisedSimplex(const ComputationalForm& form, const SimplexOptions& opt);
  EngineResult run();

 private:
  using SpMat = Eigen::SparseMatrix<double>;

  void crash();
  void refactor();
  void repair_basis();
  void compute_basic_values();
  void ftran(Eigen::VectorXd& v) const;
  void btran(Eigen::VectorXd& v) const;
  void compute_reduced_costs(bool phase_one);
  bool phase_one_costs(Eigen::VectorXd& cb) const;
  int choose_entering() const;
  RatioResult ratio_test(int q, double dir, const Eigen::VectorXd& alpha, bool phase_one) const;
  void pivot_row(int r, Eigen::VectorXd& rho, std::vector<double>& row_alpha);
  EngineStatus iterate(bool phase_one);
  void perturb_bounds();
  void restore_bounds();
  void place_nonbasic(int j);
  [[nodiscard]] bool has_primal_infeasibility(double tol) const;

  const SimplexOptions& opt_;
  int m_ = 0;
  int n_ = 0;  // structural columns
  int total_ = 0;
  SpMat a_;
  std::vector<double> cost_, lower_, upper_, orig_lower_, orig_upper_, rhs_;
  std::vector<double> x_;
  std::vector<double> d_;
  std::vector<double> weight_;
  std::vector<State> state_;
  std::vector<int> basis_;
  std::vector<int> pos_;
  mutable Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu_;
  std::vector<Eta> etas_;
  long iterations_ = 0;
  long drift_refactors_ = 0;
  long repairs_ = 0;
};

RevisedSimplex::RevisedSimplex(const ComputationalForm& form, const SimplexOptions& opt)
    : opt_(opt), m_(static_cast<int>(form.matrix.rows())), n_(static_cast<int>(form.matrix.cols())) {
  if (static_cast<int>(form.cost.size()) != n_ || static_cast<int>(form.lower.size()) != n_ ||
      static_cast<int>(form.upper.size()) != n_ || static_cast<int>(form.rhs.size()) != m_) {
    throw InputError("computational form has inconsistent dimensions");
  }
  a_ = form.matrix;
  a_.makeCompressed();
  cost_ = form.cost;
  lower_ = form.lower;
  upper_ = form.upper;
  rhs_ = form.rhs;
}

void RevisedSimplex::place_nonbasic(int j) {
  if (lower_[j] == upper_[j]) {
    state_[j] = State::at_lower;
    x_[j] = lower_[j];
  } else if (std::isfinite(lower_[j])) {
    state_[j] = State::at_lower;
    x_[j] = lower_[j];
  } else if (std::isfinite(upper_[j])) {
    state_[j] = State::at_upper;
    x_[j] = upper_[j];
  } else {
    state_[j] = State::at_zero;
    x_[j] = 0.0;
  }
}

// Singleton columns become the starting basis; rows without one get an
// artificial column fixed at zero that phase one drives out.
void RevisedSimplex::crash() {
  std::vector<int> singleton_for_row(m_, -1);
  for (int j = 0; j < n_; ++j) {
    if (a_.outerIndexPtr()[j + 1] - a_.outerIndexPtr()[j] != 1) continue;
    SpMat::InnerIterator it(a_, j);
    if (std::abs(it.value()) < 1e-12) continue;
    const int i = static_cast<int>(it.row());
    if (singleton_for_row[i] < 0) singleton_for_row[i] = j;
  }
  std::vector<Eigen::Triplet<double>> extra;
  int next = n_;
  for (int i = 0; i < m_; ++i) {
    if (singleton_for_row[i] < 0) {
      extra.emplace_back(i, next - n_, 1.0);
      singleton_for_row[i] = next++;
    }
  }
  total_ = next;
  if (total_ > n_) {
    SpMat art(m_, total_ - n_);
    art.setFromTriplets(extra.begin(), extra.end());
    SpMat grown(m_, total_);
    grown.reserve(a_.nonZeros() + art.nonZeros());
    std::vector<Eigen::Triplet<double>> all;
    all.reserve(a_.nonZeros() + art.nonZeros());
    for (int j = 0; j < n_; ++j)
      for (SpMat::InnerIterator it(a_, j); it; ++it) all.emplace_back(it.row(), j, it.value());
    for (int j = 0; j < art.cols(); ++j)
      for (SpMat::InnerIterator it(art, j); it; ++it) all.emplace_back(it.row(), n_ + j, it.value());
    grown.setFromTriplets(all.begin(), all.end());
    grown.makeCompressed();
    a_ = std::move(grown);
    for (int j = n_; j < total_; ++j) {
      cost_.push_back(0.0);
      lower_.push_back(0.0);
      upper_.push_back(0.0);
    }
  }
  orig_lower_ = lower_;
  orig_upper_ = upper_;
  x_.assign(total_, 0.0);
  d_.assign(total_, 0.0);
  weight_.assign(total_, 1.0);
  state_.assign(total_, State::at_lower);
  pos_.assign(total_, -1);
  basis_.assign(m_, -1);
  for (int j = 0; j < total_; ++j) place_nonbasic(j);
  for (int i = 0; i < m_; ++i) {
    const int j = singleton_for_row[i];
    basis_[i] = j;
    pos_[j] = i;
    state_[j] = State::basic;
  }
}

void RevisedSimplex::refactor() {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(m_) * 4);
  for (int p = 0; p < m_; ++p) {
    for (SpMat::InnerIterator it(a_, basis_[p]); it; ++it) trip.emplace_back(it.row(), p, it.value());
  }
  SpMat b(m_, m_);
  b.setFromTriplets(trip.begin(), trip.end());
  b.makeCompressed();
  lu_.analyzePattern(b);
  lu_.factorize(b);
  etas_.clear();
  if (lu_.info() == Eigen::Success) return;
  repair_basis();
  trip.clear();
  for (int p = 0; p < m_; ++p) {
    for (SpMat::InnerIterator it(a_, basis_[p]); it; ++it) trip.emplace_back(it.row(), p, it.value());
  }
  b.setFromTriplets(trip.begin(), trip.end());
  b.makeCompressed();
  lu_.analyzePattern(b);
  lu_.factorize(b);
  if (lu_.info() != Eigen::Success) throw NumericalError("simplex basis factorization failed: " + lu_.lastErrorMessage());
}

// Swaps dependent basis columns for new artificial unit columns on the rows
// they leave uncovered. Phase one then drives the artificials out again.
void RevisedSimplex::repair_basis() {
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(m_, m_);
  for (int p = 0; p < m_; ++p) {
    for (SpMat::InnerIterator it(a_, basis_[p]); it; ++it) dense(it.row(), p) = it.value();
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(dense);
  lu.setThreshold(1e-11);
  const int rank = static_cast<int>(lu.rank());
  if (rank == m_) return;
  ++repairs_;
  std::vector<bool> keep(m_, false);
  for (int k = 0; k < rank; ++k) keep[lu.permutationQ().indices()[k]] = true;
  std::vector<int> free_rows;
  for (int k = rank; k < m_; ++k) free_rows.push_back(lu.permutationP().indices()[k]);

  std::vector<Eigen::Triplet<double>> all;
  all.reserve(a_.nonZeros() + free_rows.size());
  for (int j = 0; j < total_; ++j)
    for (SpMat::InnerIterator it(a_, j); it; ++it) all.emplace_back(it.row(), j, it.value());
  std::size_t next_row = 0;
  for (int p = 0; p < m_; ++p) {
    if (keep[p]) continue;
    const int old = basis_[p];
    const int art = total_++;
    all.emplace_back(free_rows[next_row++], art, 1.0);
    for (auto* v : {&cost_, &lower_, &upper_, &orig_lower_, &orig_upper_, &x_, &d_}) v->push_back(0.0);
    weight_.push_back(1.0);
    state_.push_back(State::basic);
    pos_.push_back(p);
    basis_[p] = art;
    pos_[old] = -1;
    place_nonbasic(old);
    if (old >= n_) state_[old] = State::frozen;
  }
  SpMat grown(m_, total_);
  grown.setFromTriplets(all.begin(), all.end());
  grown.makeCompressed();
  a_ = std::move(grown);
}

void RevisedSimplex::ftran(Eigen::VectorXd& v) const {
  v = lu_.solve(v);
  for (const Eta& e : etas_) {
    const double t = v[e.pos] / e.pivot;
    if (t != 0.0) {
      for (std::size_t k = 0; k < e.idx.size(); ++k) v[e.idx[k]] -= e.val[k] * t;
    }
    v[e.pos] = t;
  }
}

void RevisedSimplex::btran(Eigen::VectorXd& v) const {
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double s = v[it->pos];
    for (std::size_t k = 0; k < it->idx.size(); ++k) s -= it->val[k] * v[it->idx[k]];
    v[it->pos] = s / it->pivot;
  }
  v = lu_.transpose().solve(v);
}

void RevisedSimplex::compute_basic_values() {
  Eigen::VectorXd r = Eigen::Map<const Eigen::VectorXd>(rhs_.data(), m_);
  for (int j = 0; j < total_; ++j) {
    if (state_[j] == State::basic || x_[j] == 0.0) continue;
    for (SpMat::InnerIterator it(a_, j); it; ++it) r[it.row()] -= it.value() * x_[j];
  }
  ftran(r);
  for (int p = 0; p < m_; ++p) x_[basis_[p]] = r[p];
}

bool RevisedSimplex::phase_one_costs(Eigen::VectorXd& cb) const {
  cb.setZero(m_);
  bool any = false;
  for (int p = 0; p < m_; ++p) {
    const int j = basis_[p];
    if (x_[j] < lower_[j] - opt_.primal_tol) {
      cb[p] = -1.0;
      any = true;
    } else if (x_[j] > upper_[j] + opt_.primal_tol) {
      cb[p] = 1.0;
      any = true;
    }
  }
  return any;
}

bool RevisedSimplex::has_primal_infeasibility(double tol) const {
  for (int p = 0; p < m_; ++p) {
    const int j = basis_[p];
    if (x_[j] < lower_[j] - tol || x_[j] > upper_[j] + tol) return true;
  }
  return false;
}

void RevisedSimplex::compute_reduced_costs(bool phase_one) {
  Eigen::VectorXd y(m_);
  if (phase_one) {
    phase_one_costs(y);
  } else {
    for (int p = 0; p < m_; ++p) y[p] = cost_[basis_[p]];
  }
  btran(y);
  const int* outer = a_.outerIndexPtr();
  const int* inner = a_.innerIndexPtr();
  const double* val = a_.valuePtr();
  for (int j = 0; j < total_; ++j) {
    if (state_[j] == State::basic) {
      d_[j] = 0.0;
      continue;
    }
    double s = phase_one ? 0.0 : cost_[j];
    for (int k = outer[j]; k < outer[j + 1]; ++k) s -= val[k] * y[inner[k]];
    d_[j] = s;
  }
}

int RevisedSimplex::choose_entering() const {
  int best = -1;
  double best_score = 0.0;
  const double tol = opt_.dual_tol;
  for (int j = 0; j < total_; ++j) {
    double infeas = 0.0;
    switch (state_[j]) {
      case State::basic:
      case State::frozen: continue;
      case State::at_lower:
        if (lower_[j] == upper_[j]) continue;
        infeas = d_[j] < -tol ? -d_[j] : 0.0;
        break;
      case State::at_upper:
        if (lower_[j] == upper_[j]) continue;
        infeas = d_[j] > tol ? d_[j] : 0.0;
        break;
      case State::at_zero: infeas = std::abs(d_[j]) > tol ? std::abs(d_[j]) : 0.0; break;
    }
    if (infeas == 0.0) continue;
    const double score = infeas * infeas / weight_[j];
    if (score > best_score) {
      best_score = score;
      best = j;
    }
  }
  return best;
}

// Two-pass Harris test. In phase one, basic variables outside their bounds
// block only when they reach the bound they are moving toward.
RatioResult RevisedSimplex::ratio_test(int q, double dir, const Eigen::VectorXd& alpha,
                                       bool phase_one) const {
  const double ptol = opt_.primal_tol;
  double theta_max = kInf;
  for (int p = 0; p < m_; ++p) {
    const double a = alpha[p];
    if (std::abs(a) <= opt_.pivot_tol) continue;
    const int j = basis_[p];
    const double rate = -dir * a;
    const double xv = x_[j];
    if (phase_one && xv < lower_[j] - ptol) {
      if (rate > 0) theta_max = std::min(theta_max, (lower_[j] - xv + ptol) / rate);
      continue;
    }
    if (phase_one && xv > upper_[j] + ptol) {
      if (rate < 0) theta_max = std::min(theta_max, (xv - upper_[j] + ptol) / -rate);
      continue;
    }
    if (rate < 0 && std::isfinite(lower_[j])) {
      theta_max = std::min(theta_max, (xv - lower_[j] + ptol) / -rate);
    } else if (rate > 0 && std::isfinite(upper_[j])) {
      theta_max = std::min(theta_max, (upper_[j] - xv + ptol) / rate);
    }
  }
  const double own_range = upper_[q] - lower_[q];
  RatioResult res;
  if (std::isfinite(own_range) && own_range <= theta_max) {
    res.kind = RatioResult::bound_flip;
    res.theta = own_range;
    return res;
  }
  if (!std::isfinite(theta_max)) return res;  // unbounded

  double best_abs = 0.0;
  for (int p = 0; p < m_; ++p) {
    const double a = alpha[p];
    if (std::abs(a) <= opt_.pivot_tol) continue;
    const int j = basis_[p];
    const double rate = -dir * a;
    const double xv = x_[j];
    double ratio = kInf;
    bool to_upper = false;
    if (phase_one && xv < lower_[j] - ptol) {
      if (rate > 0) ratio = (lower_[j] - xv) / rate;
    } else if (phase_one && xv > upper_[j] + ptol) {
      if (rate < 0) {
        ratio = (xv - upper_[j]) / -rate;
        to_upper = true;
      }
    } else if (rate < 0 && std::isfinite(lower_[j])) {
      ratio = (xv - lower_[j]) / -rate;
    } else if (rate > 0 && std::isfinite(upper_[j])) {
      ratio = (upper_[j] - xv) / rate;
      to_upper = true;
    }
    if (ratio <= theta_max && std::abs(a) > best_abs) {
      best_abs = std::abs(a);
      res.kind = RatioResult::pivot;
      res.row = p;
      res.theta = std::max(ratio, 0.0);
      res.leaves_at_upper = to_upper;
    }
  }
  return res;
}

void RevisedSimplex::pivot_row(int r, Eigen::VectorXd& rho, std::vector<double>& row_alpha) {
  rho.setZero(m_);
  rho[r] = 1.0;
  btran(rho);
  row_alpha.assign(total_, 0.0);
  const int* outer = a_.outerIndexPtr();
  const int* inner = a_.innerIndexPtr();
  const double* val = a_.valuePtr();
  for (int j = 0; j < total_; ++j) {
    if (state_[j] == State::basic || state_[j] == State::frozen) continue;
    double s = 0.0;
    for (int k = outer[j]; k < outer[j + 1]; ++k) s += val[k] * rho[inner[k]];
    row_alpha[j] = s;
  }
}

EngineStatus RevisedSimplex::iterate(bool phase_one) {
  Eigen::VectorXd alpha(m_);
  Eigen::VectorXd rho(m_);
  std::vector<double> row_alpha;
  std::fill(weight_.begin(), weight_.end(), 1.0);
  if (!phase_one) compute_reduced_costs(false);

  while (true) {
    if (iterations_ >= opt_.max_iterations) return EngineStatus::iteration_limit;
    if (phase_one) {
      if (!has_primal_infeasibility(opt_.primal_tol)) return EngineStatus::optimal;
      compute_reduced_costs(true);
    }
    const int q = choose_entering();
    if (q < 0) return phase_one ? EngineStatus::infeasible : EngineStatus::optimal;

    alpha.setZero(m_);
    for (SpMat::InnerIterator it(a_, q); it; ++it) alpha[it.row()] = it.value();
    ftran(alpha);
    const double dir = d_[q] < 0 ? 1.0 : -1.0;

    const RatioResult rt = ratio_test(q, dir, alpha, phase_one);
    ++iterations_;
    if (rt.kind == RatioResult::unbounded) {
      if (phase_one) throw NumericalError("phase one ray without a blocking variable");
      return EngineStatus::unbounded;
    }
    const bool need_row = !phase_one || opt_.pricing == Pricing::devex;
    if (rt.kind == RatioResult::pivot && need_row) {
      pivot_row(rt.row, rho, row_alpha);
      // Column and row computations of the pivot disagree: the eta file has drifted.
      const double a = alpha[rt.row];
      if (!etas_.empty() && std::abs(row_alpha[q] - a) > 1e-6 * std::max(1.0, std::abs(a))) {
        ++drift_refactors_;
        refactor();
        compute_basic_values();
        if (!phase_one) {
          if (has_primal_infeasibility(kDriftTolerance)) return EngineStatus::iteration_limit;
          compute_reduced_costs(false);
        }
        continue;
      }
    }
    const double step = dir * rt.theta;
    if (step != 0.0) {
      for (int p = 0; p < m_; ++p) {
        if (alpha[p] != 0.0) x_[basis_[p]] -= step * alpha[p];
      }
    }
    if (rt.kind == RatioResult::bound_flip) {
      if (dir > 0) {
        state_[q] = State::at_upper;
        x_[q] = upper_[q];
      } else {
        state_[q] = State::at_lower;
        x_[q] = lower_[q];
      }
      continue;
    }
    x_[q] += step;

    const int r = rt.row;
    const int leaving = basis_[r];
    const double alpha_r = alpha[r];

    if (!phase_one) {
      const double theta_d = d_[q] / alpha_r;
      for (int j = 0; j < total_; ++j) {
        if (row_alpha[j] != 0.0) d_[j] -= theta_d * row_alpha[j];
      }
      d_[leaving] = -theta_d;
      d_[q] = 0.0;
    }
    if (opt_.pricing == Pricing::devex) {
      const double wq = weight_[q];
      for (int j = 0; j < total_; ++j) {
        if (row_alpha[j] == 0.0) continue;
        const double ratio = row_alpha[j] / alpha_r;
        weight_[j] = std::max(weight_[j], ratio * ratio * wq);
      }
      weight_[leaving] = std::max(wq / (alpha_r * alpha_r), 1.0);
    }

    // leaving variable goes to the bound it reached
    if (rt.leaves_at_upper) {
      state_[leaving] = State::at_upper;
      x_[leaving] = upper_[leaving];
    } else {
      state_[leaving] = State::at_lower;
      x_[leaving] = lower_[leaving];
    }
    if (leaving >= n_) state_[leaving] = State::frozen;  // artificials never return
    pos_[leaving] = -1;
    basis_[r] = q;
    pos_[q] = r;
    state_[q] = State::basic;

    Eta eta;
    eta.pos = r;
    eta.pivot = alpha_r;
    for (int p = 0; p < m_; ++p) {
      if (p != r && std::abs(alpha[p]) > 1e-14) {
        eta.idx.push_back(p);
        eta.val.push_back(alpha[p]);
      }
    }
    etas_.push_back(std::move(eta));

    if (static_cast<int>(etas_.size()) >= opt_.refactor_interval) {
      refactor();
      compute_basic_values();
      if (!phase_one) {
        // Drift well above the working tolerance sends the caller back to phase one.
        if (has_primal_infeasibility(kDriftTolerance)) return EngineStatus::iteration_limit;
        compute_reduced_costs(false);
      }
    }
    if (opt_.verbose && iterations_ % 1000 == 0) {
      double obj = 0.0;
      for (int j = 0; j < total_; ++j) obj += cost_[j] * x_[j];
      std::cerr << "simplex it=" << iterations_ << (phase_one ? " phase1" : " phase2") << " obj=" << obj << " drift_refactors=" << drift_refactors_
                << " repairs=" << repairs_ << '\n';
    }
  }
}

void RevisedSimplex::perturb_bounds() {
  std::mt19937_64 rng(opt_.seed);
  std::uniform_real_distribution<double> unit(1.0, 2.0);
  for (int j = 0; j < n_; ++j) {
    if (orig_lower_[j] == orig_upper_[j]) continue;
    if (std::isfinite(orig_lower_[j])) lower_[j] = orig_lower_[j] - opt_.perturbation * (1.0 + std::abs(orig_lower_[j])) * unit(rng);
    if (std::isfinite(orig_upper_[j])) upper_[j] = orig_upper_[j] + opt_.perturbation * (1.0 + std::abs(orig_upper_[j])) * unit(rng);
    if (state_[j] == State::at_lower) x_[j] = lower_[j];
    if (state_[j] == State::at_upper) x_[j] = upper_[j];
  }
}

void RevisedSimplex::restore_bounds() {
  lower_ = orig_lower_;
  upper_ = orig_upper_;
  for (int j = 0; j < total_; ++j) {
    if (state_[j] == State::at_lower) x_[j] = lower_[j];
    if (state_[j] == State::at_upper) x_[j] = upper_[j];
  }
}

EngineResult RevisedSimplex::run() {
  crash();
  const bool perturbed = opt_.perturbation > 0.0;
  if (perturbed) perturb_bounds();
  refactor();
  compute_basic_values();

  EngineResult result;
  EngineStatus status = EngineStatus::optimal;
  // Each round: phase one until feasible, then phase two. A round ends early
  // when refactoring exposes drift; the final round runs on exact bounds.
  for (int round = 0; round < 50; ++round) {
    status = iterate(true);
    if (status == EngineStatus::infeasible) {
      if (perturbed && lower_ != orig_lower_) {
        restore_bounds();
        compute_basic_values();
        continue;
      }
      break;
    }
    if (status == EngineStatus::iteration_limit && iterations_ >= opt_.max_iterations) break;
    status = iterate(false);
    if (status == EngineStatus::iteration_limit) {
      if (iterations_ >= opt_.max_iterations) break;
      continue;
    }
    if (status == EngineStatus::optimal && perturbed && lower_ != orig_lower_) {
      restore_bounds();
      refactor();
      compute_basic_values();
      continue;
    }
    if (status == EngineStatus::optimal) {
      refactor();
      compute_basic_values();
      if (has_primal_infeasibility(opt_.primal_tol)) continue;
    }
    break;
  }

  result.status = status;
  result.iterations = iterations_;
  result.z.assign(x_.begin(), x_.begin() + n_);
  Eigen::VectorXd y(m_);
  for (int p = 0; p < m_; ++p) y[p] = cost_[basis_[p]];
  btran(y);
  result.row_duals.assign(y.data(), y.data() + m_);
  result.objective = 0.0;
  for (int j = 0; j < n_; ++j) result.objective += cost_[j] * x_[j];
  return result;
}

}  // namespace

EngineResult run_simplex(const ComputationalForm& form, const SimplexOptions& options) {
  RevisedSimplex engine(form, options);
  return engine.run();
}

}  // namespace spalloc::lp
