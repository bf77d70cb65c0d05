#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "spalloc/lp/instance.hpp"

namespace spalloc::lp {

// Textual LP files in the CPLEX-LP subset:
//
//   \ comment
//   Maximize
//    obj: 1 lambda
//   Subject To
//    sp_1_2_3: 0.02 A_2_3 - 0.02 A_1_3 + ... <= 0
//   Bounds
//    A_0_0 >= 0
//    lambda free
//   End
//
// A row's provenance tag is the prefix of its name up to the first '_'.
// Rows whose names lack a tag prefix are written as "<tag>_<name>".
void write_lp(const LPInstance& lp, std::ostream& os);
LPInstance read_lp(std::istream& is);

void export_lp(const LPInstance& lp, const std::filesystem::path& path);
LPInstance import_lp(const std::filesystem::path& path);

/// {"status", "objective", "nonzeros": {name: value}} plus diagnostics.
std::string solution_json(const LPSolution& sol, double zero_tol = 0.0);
LPSolution parse_solution_json(std::string_view text, const LPInstance& lp);

}  // namespace spalloc::lp
