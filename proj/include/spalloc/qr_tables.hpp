#pragma once

#include <filesystem>
#include <vector>

namespace spalloc {

/// Grid tables Q(k/n), R(k/n) for k = 0..n from a solved Q/R program.
struct QRTables {
  int n = 0;
  std::vector<double> q_values;
  std::vector<double> r_values;
  double delta = 0.0;
  double lambda = 0.0;

  [[nodiscard]] double max_q() const;
  /// Throws InputError when sizes disagree with n or an entry is negative.
  void validate() const;
};

/// CSV with header `t,q,r` and a key=value sidecar next to it (see sidecar_path).
void save_qr_tables(const QRTables& tables, const std::filesystem::path& csv_path);
QRTables load_qr_tables(const std::filesystem::path& csv_path);

/// `qr.csv` -> `qr.meta`
std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

}  // namespace spalloc
