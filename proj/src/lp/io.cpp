#include "spalloc/lp/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>
#include <vector>

#include "spalloc/error.hpp"

namespace spalloc::lp {
namespace {

std::string fmt_number(double v) {
  if (v == kInfinity) return "+inf";
  if (v == -kInfinity) return "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_terms(std::ostream& os, std::span<const Term> terms, const LPInstance& lp) {
  if (terms.empty()) {
    os << " 0 " << lp.variable(0).name;
    return;
  }
  bool first = true;
  for (const Term& t : terms) {
    const double mag = std::abs(t.coef);
    if (first) {
      os << ' ' << (t.coef < 0 ? "-" : "") << fmt_number(mag);
    } else {
      os << (t.coef < 0 ? " - " : " + ") << fmt_number(mag);
    }
    os << ' ' << lp.variable(t.var).name;
    first = false;
  }
}

std::string tagged_name(const RowInfo& row) {
  const std::string tag(to_string(row.tag));
  if (row.name == tag || row.name.starts_with(tag + "_")) return row.name;
  return tag + "_" + row.name;
}

double parse_number(std::string_view tok, int line) {
  if (tok == "+inf" || tok == "inf" || tok == "+infinity" || tok == "infinity") return kInfinity;
  if (tok == "-inf" || tok == "-infinity") return -kInfinity;
  double v = 0.0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw InputError("LP file line " + std::to_string(line) + ": expected a number, got '" + std::string(tok) + "'");
  }
  return v;
}

bool is_number_token(std::string_view tok) {
  if (tok == "+inf" || tok == "-inf" || tok == "inf") return true;
  if (!tok.empty() && (tok[0] == '-' || tok[0] == '+')) tok.remove_prefix(1);
  if (tok.empty()) return false;
  const char c = tok[0];
  return (c >= '0' && c <= '9') || c == '.';
}

bool is_relation(std::string_view tok) {
  return tok == "<=" || tok == ">=" || tok == "=" || tok == "<" || tok == ">" || tok == "=<" || tok == "=>";
}

Relation parse_relation(std::string_view tok) {
  if (tok == "<=" || tok == "<" || tok == "=<") return Relation::less_equal;
  if (tok == ">=" || tok == ">" || tok == "=>") return Relation::greater_equal;
  return Relation::equal;
}

struct PendingRow {
  std::string name;
  std::vector<std::pair<std::string, double>> terms;
  Relation rel = Relation::equal;
  double rhs = 0.0;
};

// Parses "[+|-] [coef] name ..." until a relation token or end of tokens.
std::size_t parse_linear(const std::vector<std::string>& tok, std::size_t k, int line,
                         std::vector<std::pair<std::string, double>>& out) {
  double sign = 1.0;
  double coef = 1.0;
  bool have_coef = false;
  while (k < tok.size() && !is_relation(tok[k])) {
    const std::string& t = tok[k];
    if (t == "+") {
      sign = 1.0;
    } else if (t == "-") {
      sign = -1.0;
    } else if (is_number_token(t) && !have_coef) {
      coef = parse_number(t, line);
      have_coef = true;
    } else {
      out.emplace_back(t, sign * coef);
      sign = 1.0;
      coef = 1.0;
      have_coef = false;
    }
    ++k;
  }
  return k;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

}  // namespace

void write_lp(const LPInstance& lp, std::ostream& os) {
  lp.validate();
  if (lp.num_variables() == 0) throw InputError("cannot export an LP without variables");
  os << "\\ spalloc LP: " << lp.num_variables() << " variables, " << lp.num_rows() << " rows\n";
  os << (lp.sense() == Sense::maximize ? "Maximize\n" : "Minimize\n");
  os << " obj:";
  write_terms(os, lp.objective(), lp);
  os << "\nSubject To\n";
  for (int i = 0; i < lp.num_rows(); ++i) {
    const auto& row = lp.row(i);
    os << ' ' << tagged_name(row) << ':';
    write_terms(os, lp.row_terms(i), lp);
    os << ' ' << to_string(row.rel) << ' ' << fmt_number(row.rhs) << '\n';
  }
  os << "Bounds\n";
  for (const auto& v : lp.variables()) {
    if (v.lower == -kInfinity && v.upper == kInfinity) {
      os << ' ' << v.name << " free\n";
    } else if (v.upper == kInfinity) {
      os << ' ' << v.name << " >= " << fmt_number(v.lower) << '\n';
    } else {
      os << ' ' << fmt_number(v.lower) << " <= " << v.name << " <= " << fmt_number(v.upper) << '\n';
    }
  }
  os << "End\n";
}

LPInstance read_lp(std::istream& is) {
  enum class Section { none, objective, constraints, bounds, done } section = Section::none;
  Sense sense = Sense::maximize;
  std::vector<std::string> obj_tokens;
  std::vector<PendingRow> rows;
  std::vector<std::string> current;  // tokens of the row being accumulated
  std::vector<int> current_line;
  std::vector<std::string> var_order;
  std::vector<std::pair<double, double>> var_bounds;
  std::unordered_map<std::string, int> var_index;

  auto declare = [&](const std::string& name) {
    auto [it, inserted] = var_index.emplace(name, static_cast<int>(var_order.size()));
    if (inserted) {
      var_order.push_back(name);
      var_bounds.emplace_back(0.0, kInfinity);
    }
    return it->second;
  };

  int line_no = 0;
  int row_line = 0;
  auto flush_row = [&]() {
    if (current.empty()) return;
    PendingRow row;
    std::string head = current[0];
    std::size_t k = 1;
    if (head.back() == ':') {
      row.name = head.substr(0, head.size() - 1);
    } else {
      const auto colon = head.find(':');
      if (colon == std::string::npos) throw InputError("LP file line " + std::to_string(row_line) + ": row without a name");
      row.name = head.substr(0, colon);
      current[0] = head.substr(colon + 1);
      k = current[0].empty() ? 1 : 0;
    }
    k = parse_linear(current, k, row_line, row.terms);
    if (k + 1 >= current.size() + 0 && k >= current.size()) {
      throw InputError("LP file line " + std::to_string(row_line) + ": row " + row.name + " has no relation");
    }
    row.rel = parse_relation(current[k]);
    if (k + 1 >= current.size()) throw InputError("LP file line " + std::to_string(row_line) + ": missing right-hand side");
    row.rhs = parse_number(current[k + 1], row_line);
    rows.push_back(std::move(row));
    current.clear();
  };

  std::string line;
  while (std::getline(is, line)) {
    ++line_no;
    if (const auto bs = line.find('\\'); bs != std::string::npos) line.erase(bs);
    auto tok = split_ws(line);
    if (tok.empty()) continue;
    std::string lower;
    for (char c : line) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    auto trimmed = split_ws(lower);
    const std::string key = trimmed.size() >= 2 ? trimmed[0] + " " + trimmed[1] : trimmed[0];
    if (trimmed[0] == "maximize" || trimmed[0] == "maximise" || trimmed[0] == "max") {
      section = Section::objective;
      sense = Sense::maximize;
      continue;
    }
    if (trimmed[0] == "minimize" || trimmed[0] == "minimise" || trimmed[0] == "min") {
      section = Section::objective;
      sense = Sense::minimize;
      continue;
    }
    if (key == "subject to" || trimmed[0] == "st" || trimmed[0] == "s.t.") {
      section = Section::constraints;
      continue;
    }
    if (trimmed[0] == "bounds") {
      flush_row();
      section = Section::bounds;
      continue;
    }
    if (trimmed[0] == "end") {
      flush_row();
      section = Section::done;
      break;
    }
    switch (section) {
      case Section::objective:
        obj_tokens.insert(obj_tokens.end(), tok.begin(), tok.end());
        break;
      case Section::constraints:
        if (tok[0].find(':') != std::string::npos) {
          flush_row();
          row_line = line_no;
        }
        current.insert(current.end(), tok.begin(), tok.end());
        break;
      case Section::bounds: {
        if (tok.size() == 2 && (tok[1] == "free" || tok[1] == "Free")) {
          var_bounds[declare(tok[0])] = {-kInfinity, kInfinity};
        } else if (tok.size() == 3 && is_relation(tok[1])) {
          const int j = declare(tok[0]);
          const double v = parse_number(tok[2], line_no);
          switch (parse_relation(tok[1])) {
            case Relation::greater_equal: var_bounds[j].first = v; break;
            case Relation::less_equal: var_bounds[j].second = v; break;
            case Relation::equal: var_bounds[j] = {v, v}; break;
          }
        } else if (tok.size() == 5 && is_relation(tok[1]) && is_relation(tok[3])) {
          const int j = declare(tok[2]);
          var_bounds[j] = {parse_number(tok[0], line_no), parse_number(tok[4], line_no)};
        } else {
          throw InputError("LP file line " + std::to_string(line_no) + ": unrecognised bound");
        }
        break;
      }
      case Section::none:
      case Section::done:
        throw InputError("LP file line " + std::to_string(line_no) + ": content outside a section");
    }
  }
  flush_row();
  if (section != Section::done) throw InputError("LP file has no End marker");

  // Variables are declared in the order of the Bounds section, then in order of first use.
  std::vector<std::pair<std::string, double>> obj_terms;
  if (!obj_tokens.empty()) {
    std::size_t k = 0;
    if (obj_tokens[0].back() == ':') k = 1;
    parse_linear(obj_tokens, k, 0, obj_terms);
  }
  for (const auto& [name, c] : obj_terms) declare(name);
  for (const auto& r : rows)
    for (const auto& [name, c] : r.terms) declare(name);

  LPInstance lp;
  for (std::size_t j = 0; j < var_order.size(); ++j) lp.add_variable(var_order[j], var_bounds[j].first, var_bounds[j].second);
  std::vector<Term> terms;
  for (const auto& [name, c] : obj_terms) terms.push_back({var_index.at(name), c});
  lp.set_objective(sense, terms);
  for (auto& r : rows) {
    terms.clear();
    for (const auto& [name, c] : r.terms) terms.push_back({var_index.at(name), c});
    const auto us = r.name.find('_');
    const auto tag = parse_row_tag(r.name.substr(0, us));
    if (!tag) throw InputError("LP row " + r.name + " has no provenance tag prefix");
    lp.add_row(std::move(r.name), terms, r.rel, r.rhs, *tag);
  }
  return lp;
}

void export_lp(const LPInstance& lp, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_lp(lp, os);
  os.flush();
  if (!os) throw std::runtime_error("write to " + path.string() + " failed");
}

LPInstance import_lp(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  return read_lp(is);
}

std::string solution_json(const LPSolution& sol, double zero_tol) {
  nlohmann::ordered_json j;
  j["status"] = std::string(to_string(sol.status));
  if (sol.status == SolveStatus::optimal) {
    j["objective"] = sol.objective_value;
  } else {
    j["objective"] = nullptr;
  }
  nlohmann::ordered_json nz = nlohmann::ordered_json::object();
  for (std::size_t k = 0; k < sol.values.size() && k < sol.names.size(); ++k) {
    if (std::abs(sol.values[k]) > zero_tol) nz[sol.names[k]] = sol.values[k];
  }
  j["nonzeros"] = std::move(nz);
  j["iterations"] = sol.iterations;
  j["backend"] = sol.backend;
  j["max_row_violation"] = sol.max_row_violation;
  return j.dump(2);
}

LPSolution parse_solution_json(std::string_view text, const LPInstance& lp) {
  const auto j = nlohmann::json::parse(text);
  LPSolution sol;
  const std::string status = j.at("status").get<std::string>();
  if (status == "optimal") {
    sol.status = SolveStatus::optimal;
  } else if (status == "infeasible") {
    sol.status = SolveStatus::infeasible;
  } else if (status == "unbounded") {
    sol.status = SolveStatus::unbounded;
  } else {
    throw InputError("unknown solution status: " + status);
  }
  if (sol.status == SolveStatus::optimal) {
    sol.values.assign(lp.num_variables(), 0.0);
    for (const auto& [name, value] : j.at("nonzeros").items()) {
      const auto idx = lp.find_variable(name);
      if (!idx) throw InputError("solution names unknown variable " + name);
      sol.values[*idx] = value.get<double>();
    }
    sol.objective_value = j.value("objective", 0.0);
  }
  sol.iterations = j.value("iterations", 0L);
  return sol;
}

}  // namespace spalloc::lp
