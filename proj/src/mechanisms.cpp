#include "spalloc/mechanisms.hpp"

#include <charconv>
#include <cmath>

#include "spalloc/dip.hpp"
#include "spalloc/error.hpp"
#include "spalloc/lp/builders.hpp"
#include "spalloc/lp/solve.hpp"
#include "spalloc/multi_item.hpp"

namespace spalloc {

QRTables solve_default_qr(int n, double delta) {
  const lp::LPInstance inst = lp::build_qr_lp(n, delta, partial_f1(), partial_f2());
  return lp::extract_qr_tables(lp::solve(inst), n, delta);
}

NamedMechanism make_mechanism(std::string_view id, const MechanismContext& ctx) {
  auto symmetric = [](SymmetricTwoItemMechanism m) {
    NamedMechanism out{m.handle(), m, true};
    return out;
  };
  if (id == "five-sixths") return symmetric(five_sixths_mechanism());
  if (id == "dictator-fixture") return symmetric(dictator_fixture());
  if (id == "partial-qr") {
    const QRTables qr = ctx.qr ? *ctx.qr : solve_default_qr(ctx.qr_n, lp::default_qr_delta(ctx.qr_n));
    return symmetric(partial_family_mechanism(partial_f1(), partial_f2(), qr));
  }
  if (id == "even-split") return {even_split_mechanism(), std::nullopt, false};
  if (id == "pa-max") return {pa_max_mechanism(), std::nullopt, false};
  if (id == "pa-avg") return {averaged_pa_mechanism(), std::nullopt, false};
  if (id == "dip-five-sixths") return {dip_five_sixths_mechanism(), std::nullopt, true};
  if (id.starts_with("pa:")) {
    const std::string_view num = id.substr(3);
    double c = 0.0;
    const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), c);
    if (ec != std::errc() || ptr != num.data() + num.size() || !(c > 0.0) || !std::isfinite(c)) {
      throw InputError("pa:<c> needs a positive exponent, got '" + std::string(num) + "'");
    }
    return {pa_mechanism(c), std::nullopt, false};
  }
  throw InputError("unknown mechanism '" + std::string(id) + "'");
}

std::vector<std::string> mechanism_ids() {
  return {"five-sixths", "partial-qr", "pa:<c>", "pa-max", "pa-avg", "even-split", "dip-five-sixths", "dictator-fixture"};
}

}  // namespace spalloc
