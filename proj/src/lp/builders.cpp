#include "spalloc/lp/builders.hpp"

#include <cstdlib>

#include "spalloc/error.hpp"

namespace spalloc::lp {

std::string gc_variable(int i, int j) { return "A_" + std::to_string(i) + "_" + std::to_string(j); }

LPInstance build_gc_lp(int n, GcVariant variant, bool prune) {
  if (n < 2) throw InputError("grid resolution n must be at least 2");
  const int N = n + 1;
  LPInstance lp;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) lp.add_variable(gc_variable(i, j), 0.0, kInfinity);
  const int lambda = lp.add_variable("lambda", -kInfinity, kInfinity);
  auto A = [N](int i, int j) { return i * N + j; };
  const Term obj{lambda, 1.0};
  lp.set_objective(Sense::maximize, {&obj, 1});

  std::vector<Term> terms;
  for (int j = 0; j < N; ++j) {
    for (int i = 0; i < N; ++i) {
      const double t = static_cast<double>(i) / n;
      const double s = static_cast<double>(n - i) / n;
      for (int ip = 0; ip < N; ++ip) {
        if (ip == i || (prune && std::abs(ip - i) != 1)) continue;
        terms = {{A(i, j), t}, {A(n - i, n - j), s}, {A(ip, j), -t}, {A(n - ip, n - j), -s}};
        lp.add_row("sp_" + std::to_string(i) + "_" + std::to_string(ip) + "_" + std::to_string(j), terms,
                   Relation::greater_equal, 0.0, RowTag::sp);
      }
    }
  }
  for (int i = 0; i < N; ++i) {
    for (int j = i; j < N; ++j) {
      const double t1 = static_cast<double>(i) / n;
      const double t2 = static_cast<double>(j) / n;
      const double s1 = static_cast<double>(n - i) / n;
      const double s2 = static_cast<double>(n - j) / n;
      terms = {{A(i, j), t1}, {A(n - i, n - j), s1}, {A(j, i), t2}, {A(n - j, n - i), s2},
               {lambda, -(1.0 + static_cast<double>(j - i) / n)}};
      lp.add_row("comp_" + std::to_string(i) + "_" + std::to_string(j), terms, Relation::greater_equal, 0.0,
                 RowTag::competitiveness);
    }
  }
  const Relation full_rel = variant == GcVariant::full ? Relation::equal : Relation::less_equal;
  for (int i = 0; i < N; ++i) {
    for (int j = i; j < N; ++j) {
      terms = {{A(i, j), 1.0}, {A(j, i), 1.0}};
      lp.add_row("full_" + std::to_string(i) + "_" + std::to_string(j), terms, full_rel, 1.0, RowTag::fullness);
    }
  }
  return lp;
}

double default_qr_delta(int n) {
  if (n < 1) throw InputError("grid resolution n must be positive");
  return 2.92 / (2.0 * n);
}

LPInstance build_qr_lp(int n, double delta, const PiecewiseFunction& f1, const PiecewiseFunction& f2) {
  if (n < 2) throw InputError("grid resolution n must be at least 2");
  if (!(delta >= 0.0 && delta < 1.0)) throw InputError("headroom delta must lie in [0, 1)");
  const int N = n + 1;
  LPInstance lp;
  for (int k = 0; k < N; ++k) lp.add_variable("Q_" + std::to_string(k));
  for (int k = 0; k < N; ++k) lp.add_variable("R_" + std::to_string(k));
  const int lambda = lp.add_variable("lambda", -kInfinity, kInfinity);
  const Term obj{lambda, 1.0};
  lp.set_objective(Sense::maximize, {&obj, 1});

  std::vector<double> f1_at(N, 0.0);
  std::vector<double> f2_at(N, 0.0);
  for (int i = 0; i < N; ++i) {
    const double t = static_cast<double>(i) / n;
    if (2 * i <= n) {
      f1_at[i] = f1(t);
    } else {
      f2_at[i] = f2(t);
    }
  }
  const double f1_half = f1(0.5);

  // Appends scale * A(i/n, j/n) to `out`.
  auto add_A = [&](std::vector<Term>& out, int i, int j, double scale) {
    if (2 * i <= n) {
      out.push_back({j, scale * f1_at[i]});
      out.push_back({N + j, scale});
    } else {
      out.push_back({j, scale * f1_half});
      out.push_back({N + j, scale});
      out.push_back({n - j, scale * f2_at[i]});
    }
  };

  std::vector<Term> terms;
  for (int i = 0; i < N; ++i) {
    for (int j = i; j < N; ++j) {
      terms.clear();
      add_A(terms, i, j, 1.0);
      add_A(terms, j, i, 1.0);
      lp.add_row("feas_" + std::to_string(i) + "_" + std::to_string(j), terms, Relation::less_equal, 1.0 - delta,
                 RowTag::feasibility);
    }
  }
  for (int i = 0; i < N; ++i) {
    for (int j = i; j < N; ++j) {
      terms.clear();
      add_A(terms, i, j, static_cast<double>(i) / n);
      add_A(terms, n - i, n - j, static_cast<double>(n - i) / n);
      add_A(terms, j, i, static_cast<double>(j) / n);
      add_A(terms, n - j, n - i, static_cast<double>(n - j) / n);
      terms.push_back({lambda, -(1.0 + static_cast<double>(j - i) / n)});
      lp.add_row("comp_" + std::to_string(i) + "_" + std::to_string(j), terms, Relation::greater_equal, 0.0,
                 RowTag::competitiveness);
    }
  }
  return lp;
}

QRTables extract_qr_tables(const LPSolution& sol, int n, double delta) {
  if (sol.status != SolveStatus::optimal) {
    throw InputError("cannot extract QR tables from a " + std::string(to_string(sol.status)) + " solution");
  }
  QRTables t;
  t.n = n;
  t.delta = delta;
  t.q_values.resize(n + 1);
  t.r_values.resize(n + 1);
  for (int k = 0; k <= n; ++k) {
    const auto q = sol.value("Q_" + std::to_string(k));
    const auto r = sol.value("R_" + std::to_string(k));
    if (!q || !r) throw InputError("solution lacks Q/R variables for n = " + std::to_string(n));
    // Values within the re-check tolerance below zero are solver noise.
    t.q_values[k] = std::max(0.0, *q);
    t.r_values[k] = std::max(0.0, *r);
  }
  const auto lam = sol.value("lambda");
  if (!lam) throw InputError("solution lacks lambda");
  t.lambda = *lam;
  return t;
}

}  // namespace spalloc::lp
