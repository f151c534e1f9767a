#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace qcse {

struct MetricRow {
  long step = 0;
  double critic_loss = 0.0;
  double actor_loss = 0.0;
  double mean_q = 0.0;
  double mean_intrinsic = 0.0;
  double buffer_entropy = 0.0;
  double eval_return = 0.0;
  double norm_score = 0.0;
  double wall_ms = 0.0;
};

/// Append-only per-run metric log; one CSV per (experiment, seed). Numbers
/// are written with round-trip precision so identical runs produce
/// identical bytes (the wall_ms column is the one timing-dependent field).
class MetricLog {
 public:
  MetricLog() = default;  ///< in-memory only
  explicit MetricLog(const std::string& csv_path);

  void append(const MetricRow& row);
  const std::vector<MetricRow>& rows() const { return rows_; }

  static const char* header();
  static std::string format_row(const MetricRow& row);

 private:
  std::vector<MetricRow> rows_;
  std::ofstream file_;
};

}  // namespace qcse
