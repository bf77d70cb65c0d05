#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "spalloc/dip.hpp"
#include "spalloc/error.hpp"
#include "spalloc/lp/builders.hpp"
#include "spalloc/lp/solve.hpp"
#include "spalloc/mechanisms.hpp"
#include "spalloc/multi_item.hpp"
#include "spalloc/two_item.hpp"
#include "spalloc/verify.hpp"

namespace py = pybind11;
using namespace spalloc;

namespace {

py::dict sp_dict(const SPReport& r) {
  py::dict d;
  d["passed"] = r.passed;
  d["max_regret"] = r.max_regret;
  d["true_bid"] = r.true_bid;
  d["misreport"] = r.misreport;
  d["opponent_bid"] = r.opponent_bid;
  d["agent"] = r.agent + 1;
  d["checks"] = r.checks;
  return d;
}

py::tuple bundles(const Allocation& a) { return py::make_tuple(a.bundle(0), a.bundle(1)); }

const SymmetricTwoItemMechanism& symmetric_of(const NamedMechanism& m) {
  if (!m.symmetric) throw InputError(m.handle.label() + " is not of the form A(b1, b2)");
  return *m.symmetric;
}

NamedMechanism make(const std::string& id, const std::optional<std::filesystem::path>& qr_tables, int qr_n) {
  MechanismContext ctx;
  if (qr_tables) ctx.qr = load_qr_tables(*qr_tables);
  ctx.qr_n = qr_n;
  return make_mechanism(id, ctx);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Strategyproof two-agent allocation of divisible items.";

  py::class_<NamedMechanism>(m, "Mechanism")
      .def(py::init(&make), py::arg("id"), py::arg("qr_tables") = std::nullopt, py::arg("qr_n") = 50)
      .def_property_readonly("label", [](const NamedMechanism& self) { return self.handle.label(); })
      .def_property_readonly("two_items_only", [](const NamedMechanism& self) { return self.two_items_only; })
      .def("__call__",
           [](const NamedMechanism& self, std::vector<double> b1, std::vector<double> b2) {
             return bundles(self.handle(UtilityVector(std::move(b1)), UtilityVector(std::move(b2))));
           },
           py::arg("b1"), py::arg("b2"), "Bundles (agent1, agent2) for one bid pair.")
      .def("__repr__", [](const NamedMechanism& self) { return "<spalloc.Mechanism " + self.handle.label() + ">"; });

  m.def("mechanism_ids", &mechanism_ids);

  m.def("first_best",
        [](std::vector<double> u1, std::vector<double> u2) {
          const FirstBest fb = first_best(UtilityVector(std::move(u1)), UtilityVector(std::move(u2)));
          return py::make_tuple(fb.value, bundles(fb.allocation));
        },
        py::arg("u1"), py::arg("u2"));
  m.def("social_welfare",
        [](const NamedMechanism& mech, std::vector<double> u1, std::vector<double> u2) {
          return social_welfare(mech.handle, UtilityVector(std::move(u1)), UtilityVector(std::move(u2)));
        },
        py::arg("mechanism"), py::arg("u1"), py::arg("u2"));
  m.def("competitive_ratio",
        [](const NamedMechanism& mech, std::vector<double> u1, std::vector<double> u2) {
          return competitive_ratio_at(mech.handle, UtilityVector(std::move(u1)), UtilityVector(std::move(u2)));
        },
        py::arg("mechanism"), py::arg("u1"), py::arg("u2"));

  m.def("f_five_sixths", &f_five_sixths, py::arg("t"));

  m.def("check_sp",
        [](const NamedMechanism& mech, int grid, double tol, int items, long samples, int misreports,
           std::uint64_t seed, int workers) {
          SPReport r;
          {
            py::gil_scoped_release release;
            r = check_sp_direct(mech.handle, grid, tol, {items, samples, misreports, seed, workers});
          }
          return sp_dict(r);
        },
        py::arg("mechanism"), py::arg("grid") = 200, py::arg("tol") = 1e-9, py::arg("items") = 2,
        py::arg("samples") = 0, py::arg("misreports") = 1000, py::arg("seed") = 20240601, py::arg("workers") = 1);
  m.def("check_rochet",
        [](const NamedMechanism& mech, int grid, double tol) { return sp_dict(check_rochet(symmetric_of(mech), grid, tol)); },
        py::arg("mechanism"), py::arg("grid") = 200, py::arg("tol") = 1e-9);
  m.def("check_sufficient_condition",
        [](const NamedMechanism& mech, std::vector<double> breakpoints, double tol, int grid) {
          return sp_dict(check_sufficient_condition(symmetric_of(mech), breakpoints, tol, grid));
        },
        py::arg("mechanism"), py::arg("breakpoints"), py::arg("tol") = 1e-6, py::arg("grid") = 200);
  m.def("measure_ratio",
        [](const NamedMechanism& mech, int grid, int items, long samples, std::uint64_t seed, int workers) {
          RatioReport r;
          {
            py::gil_scoped_release release;
            r = measure_ratio(mech.handle, grid, {items, samples, seed, workers});
          }
          py::dict d;
          d["min_ratio"] = r.min_ratio;
          d["argmin"] = py::make_tuple(r.argmin_bid1, r.argmin_bid2);
          d["grid_n"] = r.grid_n;
          d["points"] = r.points;
          return d;
        },
        py::arg("mechanism"), py::arg("grid") = 1000, py::arg("items") = 2, py::arg("samples") = 100000,
        py::arg("seed") = 20240601, py::arg("workers") = 1);

  m.def("solve_weighted_product",
        [](std::vector<double> u1, std::vector<double> u2, double c) {
          const PAResult r = solve_weighted_product(UtilityVector(std::move(u1)), UtilityVector(std::move(u2)), c);
          py::dict d;
          d["w"] = r.w_value;
          d["base"] = bundles(r.base_allocation);
          d["scaled"] = bundles(r.scaled_allocation);
          return d;
        },
        py::arg("u1"), py::arg("u2"), py::arg("c"));
  m.def("pa_ratio_certificate",
        [](double grid_step, int workers) {
          const PACertificate c = pa_ratio_certificate(kAveragedPaExponent, kAveragedPaWeights, grid_step, workers);
          py::dict d;
          d["grid_min"] = c.grid_min;
          d["argmin"] = py::make_tuple(c.argmin.r1, c.argmin.r2);
          d["corrected"] = c.corrected;
          d["points"] = c.points;
          return d;
        },
        py::arg("grid_step") = 1.0 / 200.0, py::arg("workers") = 1);

  m.def("u_upper",
        [](double t1, double opponent, double h) {
          if (opponent != 0.0 && opponent != 0.1) throw InputError("opponent must be 0 or 0.1");
          return u_upper(t1, opponent == 0.0 ? OpponentCase::opponent_0 : OpponentCase::opponent_0_1, h);
        },
        py::arg("t1"), py::arg("opponent"), py::arg("h"));
  m.def("l_lower", &l_lower, py::arg("t1"), py::arg("h"));
  m.def("check_bound_certificate",
        [](double h, double q, double t1p, double t1pp) {
          const CertificateCheck c = evaluate_certificate({h, q, t1p, t1pp});
          return py::make_tuple(c.valid, c.slack_a, c.slack_b);
        },
        py::arg("h"), py::arg("q_star"), py::arg("t1_prime"), py::arg("t1_double_prime"));

  m.def("five_sixths_prices",
        [](double t2, double y) {
          const PriceSchedule s = five_sixths_price_schedule(t2);
          return py::make_tuple(s.per_item[0](y), s.per_item[1](y));
        },
        py::arg("t2"), py::arg("y"));
  m.def("five_sixths_purchase",
        [](double t1, double t2) {
          const Purchase p = optimal_purchase(UtilityVector::of_two(t1), five_sixths_price_schedule(t2));
          return py::make_tuple(p.quantities, p.spent);
        },
        py::arg("t1"), py::arg("t2"));

  m.def("gc_lambda",
        [](int n, bool partial, bool prune, const std::string& backend) {
          const lp::LPInstance inst = lp::build_gc_lp(n, partial ? lp::GcVariant::partial : lp::GcVariant::full, prune);
          py::gil_scoped_release release;
          const lp::LPSolution sol = lp::solve(inst, *lp::make_backend(backend.empty() ? lp::default_backend_id() : backend));
          if (sol.status != lp::SolveStatus::optimal) throw NumericalError("LP not optimal");
          return *sol.value("lambda");
        },
        py::arg("n"), py::arg("partial") = false, py::arg("prune") = false, py::arg("backend") = "");
  m.def("solve_qr",
        [](int n, std::optional<double> delta) {
          QRTables t;
          {
            py::gil_scoped_release release;
            t = solve_default_qr(n, delta ? *delta : lp::default_qr_delta(n));
          }
          py::dict d;
          d["n"] = t.n;
          d["delta"] = t.delta;
          d["lambda"] = t.lambda;
          d["q"] = t.q_values;
          d["r"] = t.r_values;
          return d;
        },
        py::arg("n"), py::arg("delta") = std::nullopt);
}
