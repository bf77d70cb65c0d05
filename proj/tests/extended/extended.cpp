// Long-running checks. Runs every part, or only the parts named on the
// command line: gc400, qr1000, pa2000.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <thread>

#include "spalloc/lp/builders.hpp"
#include "spalloc/lp/solve.hpp"
#include "spalloc/mechanisms.hpp"
#include "spalloc/multi_item.hpp"
#include "spalloc/two_item.hpp"
#include "spalloc/verify.hpp"

using namespace spalloc;

namespace {

int workers() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

bool gc400() {
  const lp::LPSolution sol = lp::solve(lp::build_gc_lp(400, lp::GcVariant::full, true));
  const double lambda = *sol.value("lambda");
  const double eps = lambda - 5.0 / 6.0;
  std::printf("  lambda=%.12f eps=%.3g\n", lambda, eps);
  return sol.status == lp::SolveStatus::optimal && eps >= -1e-9 && eps < 1e-9;
}

bool qr1000() {
  const int n = 1000;
  const QRTables t = solve_default_qr(n, lp::default_qr_delta(n));
  const auto m = partial_family_mechanism(partial_f1(), partial_f2(), t);
  const RatioReport r = measure_ratio(m.handle(), 2000, {.workers = workers()});
  std::printf("  lambda=%.10f ratio=%.10f\n", t.lambda, r.min_ratio);
  return t.lambda > 0.835524 && r.min_ratio >= 0.833689;
}

bool pa2000() {
  const PACertificate c = pa_ratio_certificate(kAveragedPaExponent, kAveragedPaWeights, 1.0 / 2000.0, workers());
  std::printf("  grid_min=%.7f corrected=%.7f points=%ld\n", c.grid_min, c.corrected, c.points);
  return c.grid_min >= 0.67844 && c.corrected >= 0.67776;
}

}  // namespace

int main(int argc, char** argv) {
  const std::pair<const char*, std::function<bool()>> parts[] = {{"gc400", gc400}, {"qr1000", qr1000}, {"pa2000", pa2000}};
  std::set<std::string> wanted(argv + 1, argv + argc);
  int failed = 0;
  for (const auto& [name, run] : parts) {
    if (!wanted.empty() && !wanted.contains(name)) continue;
    const auto start = std::chrono::steady_clock::now();
    bool ok = false;
    try {
      ok = run();
    } catch (const std::exception& e) {
      std::printf("  exception: %s\n", e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] extended %s (%.1fs)\n", ok ? "PASS" : "FAIL", name, secs);
    std::fflush(stdout);
    failed += !ok;
  }
  return failed == 0 ? 0 : 1;
}
