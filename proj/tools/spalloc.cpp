#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "spalloc/dip.hpp"
#include "spalloc/error.hpp"
#include "spalloc/lp/builders.hpp"
#include "spalloc/lp/io.hpp"
#include "spalloc/lp/solve.hpp"
#include "spalloc/mechanisms.hpp"
#include "spalloc/multi_item.hpp"
#include "spalloc/verify.hpp"

using json = nlohmann::ordered_json;
using namespace spalloc;

namespace {

constexpr std::uint64_t kDefaultSeed = 20240601;

struct VerificationFailed {};

// key=value lines, '#' starts a comment. Keys are long option names without dashes.
std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read config file " + path);
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InputError(path + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw InputError(path + ":" + std::to_string(lineno) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

// Appends config entries not already present on the command line, so the command line wins.
std::vector<std::string> merge_config(const std::vector<std::string>& args) {
  std::string config_path;
  std::vector<std::string> rest;
  for (std::size_t k = 0; k < args.size(); ++k) {
    if (args[k] == "--config" && k + 1 < args.size()) {
      config_path = args[++k];
    } else if (args[k].starts_with("--config=")) {
      config_path = args[k].substr(9);
    } else {
      rest.push_back(args[k]);
    }
  }
  if (config_path.empty()) return rest;
  for (const auto& [key, value] : read_config(config_path)) {
    const std::string flag = "--" + key;
    bool given = false;
    for (const auto& a : rest) given = given || a == flag || a.starts_with(flag + "=");
    if (given) continue;
    if (value == "true" || value == "false") {
      if (value == "true") rest.push_back(flag);
    } else {
      rest.push_back(flag + "=" + value);
    }
  }
  return rest;
}

std::vector<double> parse_vector(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InputError("not a number: '" + item + "'");
    }
  }
  return out;
}

json number_or_string(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : "-inf";
}

void print(const std::string& text) { std::cout << text << '\n'; }

struct Globals {
  std::uint64_t seed = kDefaultSeed;
  int workers = 1;
  std::string backend;
  std::string qr_tables;
  int qr_n = 50;
};

NamedMechanism load_mechanism(const std::string& id, const Globals& g) {
  MechanismContext ctx;
  ctx.qr_n = g.qr_n;
  if (!g.qr_tables.empty()) ctx.qr = load_qr_tables(g.qr_tables);
  return make_mechanism(id, ctx);
}

std::unique_ptr<lp::SolverBackend> backend_for(const Globals& g) {
  return lp::make_backend(g.backend.empty() ? lp::default_backend_id() : g.backend);
}

// ---- eval ----

struct EvalArgs {
  std::string mechanism;
  std::optional<double> t1, t2;
  std::string u1, u2;
};

void run_eval(const EvalArgs& a, const Globals& g) {
  const bool scalar = a.t1.has_value() || a.t2.has_value();
  const bool vector = !a.u1.empty() || !a.u2.empty();
  if (scalar == vector) throw InputError("give either --t1/--t2 or --u1/--u2");
  if (scalar && !(a.t1 && a.t2)) throw InputError("--t1 and --t2 go together");
  if (vector && (a.u1.empty() || a.u2.empty())) throw InputError("--u1 and --u2 go together");
  const UtilityVector u1 = scalar ? UtilityVector::of_two(*a.t1) : UtilityVector(parse_vector(a.u1));
  const UtilityVector u2 = scalar ? UtilityVector::of_two(*a.t2) : UtilityVector(parse_vector(a.u2));
  if (u1.size() != u2.size()) throw InputError("--u1 and --u2 have different lengths");
  const NamedMechanism m = load_mechanism(a.mechanism, g);
  if (m.two_items_only && u1.size() != 2) throw InputError(a.mechanism + " is a two-item mechanism");
  const Allocation alloc = m.handle(u1, u2);
  json out;
  out["mechanism"] = a.mechanism;
  out["u1"] = u1.entries();
  out["u2"] = u2.entries();
  out["allocation"] = {{"agent1", alloc.bundle(0)}, {"agent2", alloc.bundle(1)}};
  out["utilities"] = {{"agent1", alloc.utility(0, u1)}, {"agent2", alloc.utility(1, u2)}};
  out["social_welfare"] = alloc.utility(0, u1) + alloc.utility(1, u2);
  out["first_best"] = first_best(u1, u2).value;
  print(out.dump(2));
}

// ---- verify ----

struct VerifyArgs {
  std::string kind;
  std::string mechanism;
  std::optional<int> grid;
  std::optional<double> tol;
  long samples = 0;
  int items = 2;
  int misreports = 1000;
  std::optional<double> min_ratio;
};

void run_verify(const VerifyArgs& a, const Globals& g) {
  const NamedMechanism m = load_mechanism(a.mechanism, g);
  if (m.two_items_only && a.items != 2) throw InputError(a.mechanism + " is a two-item mechanism");
  auto need_symmetric = [&]() -> const SymmetricTwoItemMechanism& {
    if (!m.symmetric) throw InputError(a.kind + " needs a mechanism of the form A(b1, b2); " + a.mechanism + " is not");
    return *m.symmetric;
  };
  bool passed = true;
  if (a.kind == "sp") {
    SPOptions opt;
    opt.items = a.items;
    opt.samples = a.samples;
    opt.misreports_per_type = a.misreports;
    opt.seed = g.seed;
    opt.workers = g.workers;
    const SPReport r = check_sp_direct(m.handle, a.grid.value_or(200), a.tol.value_or(1e-9), opt);
    print(to_json(r));
    passed = r.passed;
  } else if (a.kind == "rochet") {
    const SPReport r = check_rochet(need_symmetric(), a.grid.value_or(200), a.tol.value_or(1e-9));
    print(to_json(r));
    passed = r.passed;
  } else if (a.kind == "sufficient") {
    const auto& sym = need_symmetric();
    const SPReport r = check_sufficient_condition(sym, sym.breakpoints(), a.tol.value_or(1e-6), a.grid.value_or(200));
    print(to_json(r));
    passed = r.passed;
  } else {
    RatioOptions opt;
    opt.items = a.items;
    if (a.samples > 0) opt.samples = a.samples;
    opt.seed = g.seed;
    opt.workers = g.workers;
    const RatioReport r = measure_ratio(m.handle, a.grid.value_or(1000), opt);
    print(to_json(r));
    if (a.min_ratio) passed = r.min_ratio >= *a.min_ratio - a.tol.value_or(1e-9);
  }
  if (!passed) throw VerificationFailed{};
}

// ---- lp ----

struct LpArgs {
  std::string kind = "full";
  int n = 25;
  bool prune = false;
  std::string out;
  std::string in;
  std::string delta = "auto";
  double zero_tol = 1e-12;
};

double resolve_delta(const LpArgs& a) {
  if (a.delta == "auto") return lp::default_qr_delta(a.n);
  const auto v = parse_vector(a.delta);
  if (v.size() != 1 || !(v[0] >= 0.0 && v[0] < 1.0)) throw InputError("--delta must be 'auto' or a number in [0, 1)");
  return v[0];
}

lp::LPInstance build_for(const LpArgs& a) {
  if (a.n < 2) throw InputError("--n must be at least 2");
  if (a.kind == "full") return lp::build_gc_lp(a.n, lp::GcVariant::full, a.prune);
  if (a.kind == "partial") return lp::build_gc_lp(a.n, lp::GcVariant::partial, a.prune);
  return lp::build_qr_lp(a.n, resolve_delta(a), partial_f1(), partial_f2());
}

void run_lp_build(const LpArgs& a) {
  if (a.out.empty()) throw InputError("lp build needs --out");
  const lp::LPInstance inst = build_for(a);
  lp::export_lp(inst, a.out);
  json j;
  j["out"] = a.out;
  j["variables"] = inst.num_variables();
  j["rows"] = inst.num_rows();
  print(j.dump(2));
}

void run_lp_solve(const LpArgs& a, const Globals& g) {
  const lp::LPInstance inst = a.in.empty() ? build_for(a) : lp::import_lp(a.in);
  const auto backend = backend_for(g);
  const lp::LPSolution sol = lp::solve(inst, *backend);
  const std::string text = lp::solution_json(sol, a.zero_tol);
  if (a.out.empty()) {
    print(text);
  } else {
    std::ofstream(a.out) << text << '\n';
    json j;
    j["status"] = lp::to_string(sol.status);
    j["objective"] = number_or_string(sol.objective_value);
    j["out"] = a.out;
    print(j.dump(2));
  }
  if (sol.status != lp::SolveStatus::optimal) throw VerificationFailed{};
}

void run_lp_qr(const LpArgs& a, const Globals& g) {
  const double delta = resolve_delta(a);
  const lp::LPInstance inst = lp::build_qr_lp(a.n, delta, partial_f1(), partial_f2());
  const auto backend = backend_for(g);
  const lp::LPSolution sol = lp::solve(inst, *backend);
  if (sol.status != lp::SolveStatus::optimal) {
    json j;
    j["status"] = lp::to_string(sol.status);
    print(j.dump(2));
    throw VerificationFailed{};
  }
  const QRTables tables = lp::extract_qr_tables(sol, a.n, delta);
  const std::string out = a.out.empty() ? "qr_" + std::to_string(a.n) + ".csv" : a.out;
  save_qr_tables(tables, out);
  json j;
  j["status"] = "optimal";
  j["n"] = a.n;
  j["delta"] = delta;
  j["lambda"] = tables.lambda;
  j["max_q"] = tables.max_q();
  j["ratio_floor"] = tables.lambda - 1.0 / (2.0 * a.n);
  j["csv"] = out;
  j["meta"] = sidecar_path(out).string();
  print(j.dump(2));
}

// ---- bound ----

struct BoundArgs {
  double h = 0.9523, q = 0.6979, t1p = 0.26, t1pp = 0.32;
  CertificateSearch search;
};

void run_bound_check(const BoundArgs& a) {
  const BoundCertificate cert{a.h, a.q, a.t1p, a.t1pp};
  const CertificateCheck c = evaluate_certificate(cert);
  print(to_json(cert, c));
  if (!c.valid) throw VerificationFailed{};
}

void run_bound_search(const BoundArgs& a) {
  const CertificateSearchResult r = search_best_certificate(a.search);
  if (!r.found) {
    print(json{{"found", false}}.dump(2));
    throw VerificationFailed{};
  }
  json j = json::parse(to_json(r.cert, r.check));
  j["found"] = true;
  print(j.dump(2));
}

// ---- dip / pa ----

void run_dip_prices(double t2, int samples, const std::string& out) {
  if (samples < 2) throw InputError("--samples must be at least 2");
  const PriceSchedule s = five_sixths_price_schedule(t2);
  std::ofstream file;
  if (!out.empty()) {
    file.open(out);
    if (!file) throw InputError("cannot write " + out);
  }
  std::ostream& os = out.empty() ? std::cout : file;
  os << "y,item1,item2\n";
  auto fmt = [](double v) {
    if (!std::isfinite(v)) return std::string("inf");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::string(buf);
  };
  for (int k = 0; k < samples; ++k) {
    const double y = static_cast<double>(k) / (samples - 1);
    os << fmt(y) << ',' << fmt(s.per_item[0](y)) << ',' << fmt(s.per_item[1](y)) << '\n';
  }
}

struct PaArgs {
  int grid = 200;
  std::string csv;
  bool certified = false;
  int refine_to = 2000;
  double target = 0.67776;
};

void run_pa_certificate(const PaArgs& a, const Globals& g) {
  if (a.grid < 1) throw InputError("--grid must be positive");
  const double step = 1.0 / a.grid;
  std::optional<std::filesystem::path> csv;
  if (!a.csv.empty()) csv = a.csv;
  const PACertificate c = pa_ratio_certificate(kAveragedPaExponent, kAveragedPaWeights, step, g.workers, csv);
  json j;
  j["grid_step"] = step;
  j["grid_min"] = c.grid_min;
  j["argmin"] = {{"u1", c.argmin.r1}, {"u2", c.argmin.r2}};
  j["corrected"] = c.corrected;
  j["points"] = c.points;
  bool ok = c.corrected >= a.target;
  if (a.certified) {
    const CertifiedBound b =
        pa_certified_bound(kAveragedPaExponent, kAveragedPaWeights, step, a.target, 1.0 / a.refine_to, g.workers);
    j["certified"] = {{"bound", b.bound},
                      {"worst_cell", {{"u1", b.worst_cell.r1}, {"u2", b.worst_cell.r2}}},
                      {"cell_size", b.worst_cell_size},
                      {"cells", b.cells}};
    ok = b.bound >= a.target;
  }
  j["target"] = a.target;
  j["passed"] = ok;
  print(j.dump(2));
  if (!ok) throw VerificationFailed{};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Strategyproof two-agent allocation: mechanisms, verification and LP bounds", "spalloc"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Seed for all sampling")->default_val(kDefaultSeed);
  app.add_option("--workers", g.workers, "Threads for grid loops (results do not depend on it)")
      ->check(CLI::PositiveNumber)
      ->default_val(1);
  app.add_option("--backend", g.backend,
                 "LP backend: embedded, embedded-primal, embedded-dual or external:<command> (default: $" +
                     std::string(lp::kBackendEnvVar) + " or embedded)");
  app.add_option("--qr-tables", g.qr_tables, "Q/R tables CSV for partial-qr (from `lp qr`)")->check(CLI::ExistingFile);
  app.add_option("--qr-n", g.qr_n, "Resolution solved for partial-qr when no tables are given")
      ->check(CLI::Range(2, 100000))
      ->default_val(50);
  // Handled before parsing; registered so it shows in --help.
  std::string config_path;
  app.add_option("--config", config_path, "key=value file; command-line flags override it")->type_name("FILE");

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "Allocation and utilities for one bid pair");
  eval->add_option("--mechanism", ea.mechanism, "Mechanism id")->required();
  eval->add_option("--t1", ea.t1, "Agent 1 two-item bid (t1, 1 - t1)")->check(CLI::Range(0.0, 1.0));
  eval->add_option("--t2", ea.t2, "Agent 2 two-item bid")->check(CLI::Range(0.0, 1.0));
  eval->add_option("--u1", ea.u1, "Agent 1 bid vector, comma separated");
  eval->add_option("--u2", ea.u2, "Agent 2 bid vector, comma separated");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Strategyproofness and ratio checks");
  verify->add_option("kind", va.kind, "sp, rochet, sufficient or ratio")
      ->required()
      ->check(CLI::IsMember({"sp", "rochet", "sufficient", "ratio"}));
  verify->add_option("--mechanism", va.mechanism, "Mechanism id")->required();
  verify->add_option("--grid", va.grid, "Grid resolution n (bids in multiples of 1/n)")->check(CLI::Range(2, 100000));
  verify->add_option("--tol", va.tol, "Pass tolerance")->check(CLI::NonNegativeNumber);
  verify->add_option("--samples", va.samples, "Sampled triples (sp) or pairs (ratio, items > 2); 0 = full grid")
      ->check(CLI::NonNegativeNumber);
  verify->add_option("--items", va.items, "Number of items for sampled checks")->check(CLI::Range(2, 64));
  verify->add_option("--misreports", va.misreports, "Misreports per sampled type")->check(CLI::PositiveNumber);
  verify->add_option("--min-ratio", va.min_ratio, "ratio: fail when the minimum is below this");

  LpArgs la;
  auto* lpc = app.add_subcommand("lp", "Build and solve the bounding and synthesis LPs");
  lpc->require_subcommand(1);
  auto add_common = [&](CLI::App* sub, bool with_kind) {
    if (with_kind) {
      sub->add_option("--kind", la.kind, "full, partial or qr")->check(CLI::IsMember({"full", "partial", "qr"}));
      sub->add_flag("--prune", la.prune, "Keep only adjacent misreport rows");
    }
    sub->add_option("--n", la.n, "Grid resolution")->check(CLI::Range(2, 100000));
    sub->add_option("--delta", la.delta, "Q/R headroom: 'auto' = 2.92/(2n) or a number");
    sub->add_option("--out", la.out, "Output path");
  };
  auto* lp_build = lpc->add_subcommand("build", "Write an LP file");
  add_common(lp_build, true);
  auto* lp_solve = lpc->add_subcommand("solve", "Solve a built-in LP or an LP file");
  add_common(lp_solve, true);
  lp_solve->add_option("--in", la.in, "LP file to solve instead of building one")->check(CLI::ExistingFile);
  lp_solve->add_option("--zero-tol", la.zero_tol, "Omit |value| <= this from nonzeros")->check(CLI::NonNegativeNumber);
  auto* lp_qr = lpc->add_subcommand("qr", "Solve the Q/R program and save its tables");
  add_common(lp_qr, false);

  BoundArgs ba;
  auto* bound = app.add_subcommand("bound", "Upper-bound certificates");
  bound->require_subcommand(1);
  auto* bound_check = bound->add_subcommand("check", "Evaluate a certificate (h, q*, t1', t1'')");
  bound_check->set_help_flag("--help", "Print this help message and exit");
  bound_check->add_option("--h", ba.h)->default_val(ba.h);
  bound_check->add_option("--q", ba.q)->default_val(ba.q);
  bound_check->add_option("--t1p", ba.t1p)->default_val(ba.t1p);
  bound_check->add_option("--t1pp", ba.t1pp)->default_val(ba.t1pp);
  auto* bound_search = bound->add_subcommand("search", "Smallest h with a certificate on the search grid");
  bound_search->add_option("--h-lo", ba.search.h_lo)->default_val(ba.search.h_lo);
  bound_search->add_option("--h-hi", ba.search.h_hi)->default_val(ba.search.h_hi);
  bound_search->add_option("--h-step", ba.search.h_step)->default_val(ba.search.h_step)->check(CLI::PositiveNumber);
  bound_search->add_option("--q-lo", ba.search.q_lo)->default_val(ba.search.q_lo);
  bound_search->add_option("--q-hi", ba.search.q_hi)->default_val(ba.search.q_hi);
  bound_search->add_option("--t-step", ba.search.t_step)->default_val(ba.search.t_step)->check(CLI::PositiveNumber);

  double dip_t2 = 0.0;
  int dip_samples = 101;
  std::string dip_out;
  auto* dip = app.add_subcommand("dip", "Price schedules");
  dip->require_subcommand(1);
  auto* dip_prices = dip->add_subcommand("prices", "CSV of y and the marginal price of each item");
  dip_prices->add_option("--t2", dip_t2, "Opponent report")->required()->check(CLI::Range(0.0, 1.0));
  dip_prices->add_option("--samples", dip_samples, "Number of y values in [0, 1]")->default_val(101);
  dip_prices->add_option("--out", dip_out, "Write the CSV here instead of standard output");

  PaArgs pa;
  auto* pac = app.add_subcommand("pa", "Averaged partial-allocation mechanism");
  pac->require_subcommand(1);
  auto* pa_cert = pac->add_subcommand("certificate", "Grid lower bound on the ratio");
  pa_cert->add_option("--grid", pa.grid, "Grid step is 1/grid")->default_val(200);
  pa_cert->add_option("--csv", pa.csv, "Write u1,u2,bound rows");
  pa_cert->add_flag("--certified", pa.certified, "Also compute a cell-refined bound valid at every real point");
  pa_cert->add_option("--refine-to", pa.refine_to, "Finest cell is 1/refine-to")->default_val(2000);
  pa_cert->add_option("--target", pa.target, "Pass threshold")->default_val(pa.target);

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = merge_config(args);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);

    if (*eval) run_eval(ea, g);
    if (*verify) run_verify(va, g);
    if (*lp_build) run_lp_build(la);
    if (*lp_solve) run_lp_solve(la, g);
    if (*lp_qr) run_lp_qr(la, g);
    if (*bound_check) run_bound_check(ba);
    if (*bound_search) run_bound_search(ba);
    if (*dip_prices) run_dip_prices(dip_t2, dip_samples, dip_out);
    if (*pa_cert) run_pa_certificate(pa, g);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const VerificationFailed&) {
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
