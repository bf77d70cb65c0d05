#include "spalloc/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <random>
#include <thread>

#include "spalloc/error.hpp"

namespace spalloc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Runs body(k) for k in [0, count) with rows interleaved over `workers` threads.
template <typename Body>
void parallel_rows(int count, int workers, Body body) {
  workers = std::max(1, std::min(workers, count));
  if (workers == 1) {
    for (int k = 0; k < count; ++k) body(k);
    return;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int k = w; k < count; k += workers) body(k);
    });
  }
  for (auto& t : pool) t.join();
}

struct Worst {
  double value = -kInf;
  std::vector<double> truth, lie, other;
  int agent = 0;
};

void keep_worse(Worst& acc, const Worst& w) {
  if (w.value > acc.value) acc = w;
}

SPReport finish(const Worst& w, double tol, long checks) {
  SPReport r;
  r.max_regret = std::max(0.0, w.value);
  r.passed = r.max_regret <= tol;
  r.true_bid = w.truth;
  r.misreport = w.lie;
  r.opponent_bid = w.other;
  r.agent = w.agent;
  r.checks = checks;
  return r;
}

std::vector<double> pair_of(double t) { return {t, 1.0 - t}; }

SPReport sp_two_item_grid(const MechanismHandle& mech, int n, double tol, int workers) {
  const int N = n + 1;
  std::vector<UtilityVector> bids;
  bids.reserve(N);
  for (int i = 0; i < N; ++i) bids.push_back(UtilityVector::of_two(static_cast<double>(i) / n));

  // bundle[agent][report * N + opponent] = (share of item 1, share of item 2)
  std::array<std::vector<std::array<double, 2>>, 2> bundle;
  bundle[0].resize(static_cast<std::size_t>(N) * N);
  bundle[1].resize(static_cast<std::size_t>(N) * N);
  parallel_rows(N, workers, [&](int b) {
    for (int s = 0; s < N; ++s) {
      const Allocation a1 = mech(bids[b], bids[s]);
      const Allocation a2 = mech(bids[s], bids[b]);
      bundle[0][b * N + s] = {a1.share(0, 0), a1.share(0, 1)};
      bundle[1][b * N + s] = {a2.share(1, 0), a2.share(1, 1)};
    }
  });

  std::vector<Worst> per_row(static_cast<std::size_t>(2) * N);
  parallel_rows(2 * N, workers, [&](int row) {
    const int agent = row / N;
    const int s = row % N;
    Worst w;
    for (int t = 0; t < N; ++t) {
      const double tt = static_cast<double>(t) / n;
      const auto& truth = bundle[agent][t * N + s];
      const double honest = tt * truth[0] + (1.0 - tt) * truth[1];
      for (int b = 0; b < N; ++b) {
        const auto& x = bundle[agent][b * N + s];
        const double gain = tt * x[0] + (1.0 - tt) * x[1] - honest;
        if (gain > w.value) {
          w.value = gain;
          w.truth = pair_of(tt);
          w.lie = pair_of(static_cast<double>(b) / n);
          w.other = pair_of(static_cast<double>(s) / n);
          w.agent = agent;
        }
      }
    }
    per_row[row] = std::move(w);
  });
  Worst worst;
  for (const auto& w : per_row) keep_worse(worst, w);
  return finish(worst, tol, 2L * N * N * N);
}

std::vector<double> simplex_grid_point(std::mt19937_64& rng, int m, int n) {
  std::uniform_int_distribution<int> cut(0, n);
  std::vector<int> cuts(m - 1);
  for (int& c : cuts) c = cut(rng);
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> p(m);
  int prev = 0;
  for (int j = 0; j < m - 1; ++j) {
    p[j] = static_cast<double>(cuts[j] - prev) / n;
    prev = cuts[j];
  }
  p[m - 1] = static_cast<double>(n - prev) / n;
  return p;
}

// Structured misreports first, then uniform simplex-grid draws up to `count`.
std::vector<std::vector<double>> misreports_for(const std::vector<double>& u, const std::vector<double>& v, int count,
                                                int n, std::mt19937_64& rng) {
  const int m = static_cast<int>(u.size());
  std::vector<std::vector<double>> out;
  std::vector<int> perm(m);
  for (int j = 0; j < m; ++j) perm[j] = j;
  int permutations = 0;
  while (std::next_permutation(perm.begin(), perm.end()) && permutations < 120) {
    std::vector<double> p(m);
    for (int j = 0; j < m; ++j) p[j] = u[perm[j]];
    out.push_back(std::move(p));
    ++permutations;
  }
  for (int j = 0; j < m; ++j) {
    std::vector<double> e(m, 0.0);
    e[j] = 1.0;
    out.push_back(std::move(e));
  }
  for (int k = 1; k <= 10; ++k) {
    const double alpha = k / 10.0;
    std::vector<double> p(m);
    for (int j = 0; j < m; ++j) p[j] = (1.0 - alpha) * u[j] + alpha * v[j];
    out.push_back(std::move(p));
  }
  while (static_cast<int>(out.size()) < count) out.push_back(simplex_grid_point(rng, m, n));
  if (static_cast<int>(out.size()) > count) out.resize(count);
  return out;
}

SPReport sp_sampled(const MechanismHandle& mech, int n, double tol, const SPOptions& opt) {
  const int m = opt.items;
  const int per_type = std::max(1, opt.misreports_per_type);
  const long groups = std::max<long>(1, opt.samples / per_type);
  // Draw every group's data up front so results do not depend on the worker count.
  std::mt19937_64 rng(opt.seed);
  struct Group {
    std::vector<double> truth, other;
    std::vector<std::vector<double>> lies;
  };
  std::vector<Group> data(groups);
  for (auto& g : data) {
    g.truth = simplex_grid_point(rng, m, n);
    g.other = simplex_grid_point(rng, m, n);
    g.lies = misreports_for(g.truth, g.other, per_type, n, rng);
  }
  std::vector<Worst> per_group(static_cast<std::size_t>(groups) * 2);
  parallel_rows(static_cast<int>(groups) * 2, opt.workers, [&](int row) {
    const Group& g = data[row / 2];
    const int agent = row % 2;
    const UtilityVector u(g.truth);
    const UtilityVector v(g.other);
    auto utility_of = [&](const UtilityVector& report) {
      const Allocation a = agent == 0 ? mech(report, v) : mech(v, report);
      return a.utility(agent, u);
    };
    const double honest = utility_of(u);
    Worst w;
    for (const auto& lie : g.lies) {
      const double gain = utility_of(UtilityVector(lie)) - honest;
      if (gain > w.value) {
        w.value = gain;
        w.truth = g.truth;
        w.lie = lie;
        w.other = g.other;
        w.agent = agent;
      }
    }
    per_group[row] = std::move(w);
  });
  Worst worst;
  for (const auto& w : per_group) keep_worse(worst, w);
  long checks = 0;
  for (const auto& g : data) checks += 2 * static_cast<long>(g.lies.size());
  return finish(worst, tol, checks);
}

bool near_any(double t, const std::vector<double>& points, double radius) {
  for (double p : points)
    if (std::abs(t - p) < radius) return true;
  return false;
}

}  // namespace

SPReport check_sp_direct(const MechanismHandle& mech, int grid_n, double tol, const SPOptions& options) {
  if (grid_n < 2) throw InputError("grid_n must be at least 2");
  if (options.items < 2) throw InputError("at least two items are required");
  if (options.items == 2 && options.samples == 0) return sp_two_item_grid(mech, grid_n, tol, options.workers);
  return sp_sampled(mech, grid_n, tol, options);
}

SPReport check_rochet(const SymmetricTwoItemMechanism& mech, int grid_n, double tol) {
  if (grid_n < 4) throw InputError("grid_n must be at least 4");
  const int n = grid_n;
  const int N = n + 1;
  Worst worst;
  std::vector<double> uh(N), z(N);
  for (int s = 0; s < N; ++s) {
    const double t2 = static_cast<double>(s) / n;
    for (int i = 0; i < N; ++i) {
      const double t = static_cast<double>(i) / n;
      uh[i] = u_hat(mech, t, t2);
      z[i] = mech.a(t, t2) - mech.a_other(t, t2);
    }
    for (int i = 1; i + 1 < N; ++i) {
      const double v = -(uh[i - 1] - 2.0 * uh[i] + uh[i + 1]);
      if (v > worst.value) {
        worst.value = v;
        worst.truth = pair_of(static_cast<double>(i) / n);
        worst.lie = worst.truth;
        worst.other = pair_of(t2);
      }
    }
    for (int t = 0; t < N; ++t) {
      for (int b = 0; b < N; ++b) {
        // type b reporting t
        const double v = uh[t] + z[t] * (static_cast<double>(b - t) / n) - uh[b];
        if (v > worst.value) {
          worst.value = v;
          worst.truth = pair_of(static_cast<double>(b) / n);
          worst.lie = pair_of(static_cast<double>(t) / n);
          worst.other = pair_of(t2);
        }
      }
    }
  }
  return finish(worst, tol, static_cast<long>(N) * (N + N * N));
}

SPReport check_sufficient_condition(const SymmetricTwoItemMechanism& mech, const std::vector<double>& breakpoints,
                                    double tol, int grid_n) {
  if (grid_n < 2) throw InputError("grid_n must be at least 2");
  const double h = 1e-6;
  const double radius = 1e-3;
  std::vector<double> avoid = breakpoints;
  avoid.push_back(0.0);
  avoid.push_back(1.0);
  for (double b : breakpoints) avoid.push_back(1.0 - b);
  Worst worst;
  long checks = 0;
  auto record = [&](double v, double t1, double t2) {
    ++checks;
    if (v > worst.value) {
      worst.value = v;
      worst.truth = pair_of(t1);
      worst.lie = pair_of(t1);
      worst.other = pair_of(t2);
    }
  };
  for (int k = 0; k <= grid_n; ++k) {
    const double t2 = static_cast<double>(k) / grid_n;
    const double s = mech.opponent(t2);
    for (int i = 0; i <= grid_n; ++i) {
      const double t1 = static_cast<double>(i) / grid_n;
      if (i < grid_n) {
        const double next = static_cast<double>(i + 1) / grid_n;
        record(mech.core(t1, s) - mech.core(next, s), t1, t2);
      }
      if (near_any(t1, avoid, radius)) continue;
      const double d1 = (mech.core(t1 + h, s) - mech.core(t1 - h, s)) / (2 * h);
      const double d2 = (mech.core(1.0 - t1 + h, 1.0 - s) - mech.core(1.0 - t1 - h, 1.0 - s)) / (2 * h);
      record(std::abs(t1 * d1 - (1.0 - t1) * d2), t1, t2);
    }
    for (double b : breakpoints) {
      if (b <= 0.0 || b >= 1.0) continue;
      record(std::abs(mech.core(b + 1e-9, s) - mech.core(b - 1e-9, s)), b, t2);
    }
  }
  return finish(worst, tol, checks);
}

RatioReport measure_ratio(const MechanismHandle& mech, int grid_n, const RatioOptions& options) {
  if (grid_n < 2) throw InputError("grid_n must be at least 2");
  RatioReport rep;
  rep.grid_n = grid_n;
  if (options.items == 2) {
    const int N = grid_n + 1;
    std::vector<double> ratio(static_cast<std::size_t>(N) * N);
    parallel_rows(N, options.workers, [&](int j) {
      const UtilityVector u2 = UtilityVector::of_two(static_cast<double>(j) / grid_n);
      for (int i = 0; i < N; ++i) {
        const UtilityVector u1 = UtilityVector::of_two(static_cast<double>(i) / grid_n);
        ratio[static_cast<std::size_t>(j) * N + i] = competitive_ratio_at(mech, u1, u2);
      }
    });
    const double lo = *std::min_element(ratio.begin(), ratio.end());
    const auto first = std::find_if(ratio.begin(), ratio.end(), [lo](double r) { return r <= lo + 1e-12; });
    const auto k = static_cast<int>(first - ratio.begin());
    rep.min_ratio = lo;
    rep.argmin_bid1 = pair_of(static_cast<double>(k % N) / grid_n);
    rep.argmin_bid2 = pair_of(static_cast<double>(k / N) / grid_n);
    rep.points = static_cast<long>(ratio.size());
    return rep;
  }
  std::mt19937_64 rng(options.seed);
  std::vector<std::pair<std::vector<double>, std::vector<double>>> pts(options.samples);
  for (auto& p : pts) {
    p.first = simplex_grid_point(rng, options.items, grid_n);
    p.second = simplex_grid_point(rng, options.items, grid_n);
  }
  std::vector<double> ratio(pts.size());
  const int chunks = 256;
  parallel_rows(chunks, options.workers, [&](int c) {
    for (std::size_t k = c; k < pts.size(); k += chunks) {
      ratio[k] = competitive_ratio_at(mech, UtilityVector(pts[k].first), UtilityVector(pts[k].second));
    }
  });
  const double lo = *std::min_element(ratio.begin(), ratio.end());
  const auto first = std::find_if(ratio.begin(), ratio.end(), [lo](double r) { return r <= lo + 1e-12; });
  rep.min_ratio = lo;
  rep.argmin_bid1 = pts[first - ratio.begin()].first;
  rep.argmin_bid2 = pts[first - ratio.begin()].second;
  rep.points = static_cast<long>(pts.size());
  return rep;
}

namespace {

void check_h(double h) {
  if (!(h >= 10.0 / 11.0 && h <= 1.0)) {
    throw InputError("h must lie in [10/11, 1] so that 11/10 - 1/h <= 1/h - 9/10");
  }
}

void check_t(double t1) {
  if (!(t1 >= 0.0 && t1 <= 1.0)) throw InputError("t1 must lie in [0, 1]");
}

}  // namespace

double u_upper(double t1, OpponentCase c, double h) {
  check_h(h);
  check_t(t1);
  if (c == OpponentCase::opponent_0) {
    if (t1 == 0.0) return 1.0;
    return std::min(1.0, 1.0 + ((t1 + 1.0) * h - 1.0) / t1 * (t1 - 1.0));
  }
  const double a = 1.1 - 1.0 / h;
  const double b = 1.0 / h - 0.9;
  if (t1 <= a) return 1.0 - ((1.1 - t1) * h - 1.0) / (0.1 - t1) * t1;
  if (t1 <= b) return 1.0;
  return 1.0 + ((t1 + 0.9) * h - 1.0) / (t1 - 0.1) * (t1 - 1.0);
}

double l_lower(double t1, double h) {
  check_h(h);
  check_t(t1);
  const double a = 1.1 - 1.0 / h;
  const double b = 1.0 / h - 0.9;
  if (t1 <= a) return ((1.1 - t1) * h - 1.0) / (0.1 - t1) * (1.0 - t1);
  if (t1 <= b) return 0.0;
  return ((t1 + 0.9) * h - 1.0) / (t1 - 0.1) * t1;
}

CertificateCheck evaluate_certificate(const BoundCertificate& cert) {
  check_h(cert.h);
  if (!(cert.q_star >= 0.0 && cert.q_star <= 1.0)) throw InputError("q* must lie in [0, 1]");
  check_t(cert.t1_prime);
  if (!(cert.t1_double_prime >= 0.1 && cert.t1_double_prime <= 1.0)) throw InputError("t1'' must lie in [0.1, 1]");
  CertificateCheck c;
  const double h = cert.h;
  const double q = cert.q_star;
  c.slack_a = q - q * cert.t1_prime - u_upper(cert.t1_prime, OpponentCase::opponent_0_1, h);
  c.slack_b = 1.1 * h - q + (11.0 * h - 10.0) * (cert.t1_double_prime - 0.1) -
              u_upper(cert.t1_double_prime, OpponentCase::opponent_0, h);
  c.valid = c.slack_a > 0.0 && c.slack_b > 0.0;
  return c;
}

bool check_bound_certificate(const BoundCertificate& cert) { return evaluate_certificate(cert).valid; }

CertificateSearchResult search_best_certificate(const CertificateSearch& p) {
  CertificateSearchResult best;
  if (p.q_lo > p.q_hi || p.h_lo > p.h_hi || !(p.h_step > 0.0) || !(p.t_step > 0.0)) return best;
  const auto t_count = static_cast<int>(std::floor(1.0 / p.t_step + 1e-9));
  const auto h_count = static_cast<int>(std::floor((p.h_hi - p.h_lo) / p.h_step + 1e-9));
  for (int k = 0; k <= h_count; ++k) {
    const double h = p.h_lo + k * p.h_step;
    if (h < 10.0 / 11.0 || h > 1.0) continue;
    // (a) holds for q > U(t1', 0.1) / (1 - t1'); (b) holds for q < 1.1h + (11h - 10)(t1'' - 0.1) - U(t1'', 0).
    double qa = kInf, ta = 0.0;
    for (int i = 0; i < t_count; ++i) {
      const double t = i * p.t_step;
      if (t >= 1.0) break;
      const double v = u_upper(t, OpponentCase::opponent_0_1, h) / (1.0 - t);
      if (v < qa) {
        qa = v;
        ta = t;
      }
    }
    double qb = -kInf, tb = 0.1;
    for (int i = 0; 0.1 + i * p.t_step <= 1.0 + 1e-12; ++i) {
      const double t = std::min(1.0, 0.1 + i * p.t_step);
      const double v = 1.1 * h + (11.0 * h - 10.0) * (t - 0.1) - u_upper(t, OpponentCase::opponent_0, h);
      if (v > qb) {
        qb = v;
        tb = t;
      }
    }
    const double lo = std::max(qa, p.q_lo);
    const double hi = std::min(qb, p.q_hi);
    if (lo > hi) continue;
    BoundCertificate cert{h, 0.5 * (lo + hi), ta, tb};
    if (p.q_lo == p.q_hi) cert.q_star = p.q_lo;
    const CertificateCheck check = evaluate_certificate(cert);
    if (!check.valid) continue;
    best.found = true;
    best.cert = cert;
    best.check = check;
    return best;
  }
  return best;
}

std::string to_json(const SPReport& r) {
  nlohmann::ordered_json j;
  j["passed"] = r.passed;
  j["max_regret"] = r.max_regret;
  nlohmann::ordered_json w;
  if (r.true_bid.size() == 2) {
    w["t1"] = r.true_bid[0];
    w["misreport"] = r.misreport[0];
    w["t2"] = r.opponent_bid[0];
  } else {
    w["t1"] = r.true_bid;
    w["misreport"] = r.misreport;
    w["t2"] = r.opponent_bid;
  }
  w["agent"] = r.agent + 1;
  j["worst_case"] = w;
  j["checks"] = r.checks;
  return j.dump(2);
}

std::string to_json(const RatioReport& r) {
  nlohmann::ordered_json j;
  j["min_ratio"] = r.min_ratio;
  nlohmann::ordered_json a;
  if (r.argmin_bid1.size() == 2) {
    a["t1"] = r.argmin_bid1[0];
    a["t2"] = r.argmin_bid2[0];
  } else {
    a["t1"] = r.argmin_bid1;
    a["t2"] = r.argmin_bid2;
  }
  j["argmin"] = a;
  j["grid_n"] = r.grid_n;
  j["points"] = r.points;
  return j.dump(2);
}

std::string to_json(const BoundCertificate& cert, const CertificateCheck& check) {
  nlohmann::ordered_json j;
  j["valid"] = check.valid;
  j["h"] = cert.h;
  j["q_star"] = cert.q_star;
  j["t1_prime"] = cert.t1_prime;
  j["t1_double_prime"] = cert.t1_double_prime;
  j["slack_a"] = check.slack_a;
  j["slack_b"] = check.slack_b;
  return j.dump(2);
}

}  // namespace spalloc
