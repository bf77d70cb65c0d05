#include "spalloc/qr_tables.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "spalloc/error.hpp"

namespace spalloc {
namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

double QRTables::max_q() const {
  return q_values.empty() ? 0.0 : *std::max_element(q_values.begin(), q_values.end());
}

void QRTables::validate() const {
  if (n < 1) throw InputError("QR tables need n >= 1");
  if (q_values.size() != static_cast<std::size_t>(n) + 1 || r_values.size() != q_values.size()) {
    throw InputError("QR tables must hold n+1 values of Q and R");
  }
  for (int k = 0; k <= n; ++k) {
    if (q_values[k] < 0.0 || r_values[k] < 0.0) {
      throw InputError("QR table entry " + std::to_string(k) + " is negative");
    }
  }
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  p.replace_extension(".meta");
  return p;
}

void save_qr_tables(const QRTables& tables, const std::filesystem::path& csv_path) {
  tables.validate();
  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot open " + csv_path.string() + " for writing");
  csv << "t,q,r\n";
  for (int k = 0; k <= tables.n; ++k) {
    csv << fmt(static_cast<double>(k) / tables.n) << ',' << fmt(tables.q_values[k]) << ',' << fmt(tables.r_values[k])
        << '\n';
  }
  std::ofstream meta(sidecar_path(csv_path));
  if (!meta) throw std::runtime_error("cannot write " + sidecar_path(csv_path).string());
  meta << "# QR table metadata\n";
  meta << "n=" << tables.n << '\n';
  meta << "delta=" << fmt(tables.delta) << '\n';
  meta << "lambda=" << fmt(tables.lambda) << '\n';
  meta << "max_q=" << fmt(tables.max_q()) << '\n';
}

QRTables load_qr_tables(const std::filesystem::path& csv_path) {
  std::ifstream meta(sidecar_path(csv_path));
  if (!meta) throw InputError("missing QR metadata file " + sidecar_path(csv_path).string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(meta, line)) {
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InputError("bad metadata line: " + line);
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  QRTables t;
  try {
    t.n = std::stoi(kv.at("n"));
    t.delta = std::stod(kv.at("delta"));
    t.lambda = std::stod(kv.at("lambda"));
  } catch (const std::exception&) {
    throw InputError("QR metadata must define n, delta and lambda");
  }

  std::ifstream csv(csv_path);
  if (!csv) throw InputError("cannot open " + csv_path.string());
  if (!std::getline(csv, line) || trim(line) != "t,q,r") throw InputError("QR CSV must start with header t,q,r");
  while (std::getline(csv, line)) {
    line = trim(line);
    if (line.empty()) continue;
    std::istringstream is(line);
    std::string a, b, c;
    if (!std::getline(is, a, ',') || !std::getline(is, b, ',') || !std::getline(is, c)) {
      throw InputError("bad QR CSV line: " + line);
    }
    t.q_values.push_back(std::stod(b));
    t.r_values.push_back(std::stod(c));
  }
  t.validate();
  return t;
}

}  // namespace spalloc
