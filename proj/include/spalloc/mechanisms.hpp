#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spalloc/core.hpp"
#include "spalloc/qr_tables.hpp"
#include "spalloc/two_item.hpp"

namespace spalloc {

struct NamedMechanism {
  MechanismHandle handle;
  // Set for mechanisms of the form A(b1, b2); needed by the Rochet and sufficient-condition checks.
  std::optional<SymmetricTwoItemMechanism> symmetric;
  bool two_items_only = false;
};

/// Tables for `partial-qr`. Without them the Q/R program is solved at `qr_n` with the default delta.
struct MechanismContext {
  std::optional<QRTables> qr;
  int qr_n = 50;
};

/// Ids: five-sixths, partial-qr, pa:<c>, pa-max, pa-avg, even-split, dip-five-sixths, dictator-fixture.
/// Throws InputError for anything else.
NamedMechanism make_mechanism(std::string_view id, const MechanismContext& ctx = {});

std::vector<std::string> mechanism_ids();

/// Solves the Q/R program at resolution n with the default f1, f2 and returns its tables.
QRTables solve_default_qr(int n, double delta);

}  // namespace spalloc
