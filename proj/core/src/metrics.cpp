#include "qcse/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace qcse {

namespace {

void append_num(std::string& out, double v) {
  if (!std::isfinite(v)) {
    out += std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

}  // namespace

const char* MetricLog::header() {
  return "step,critic_loss,actor_loss,mean_q,mean_intrinsic,buffer_entropy,eval_return,norm_score,wall_ms";
}

std::string MetricLog::format_row(const MetricRow& r) {
  std::string line = std::to_string(r.step);
  for (double v : {r.critic_loss, r.actor_loss, r.mean_q, r.mean_intrinsic, r.buffer_entropy,
                   r.eval_return, r.norm_score, r.wall_ms}) {
    line += ',';
    append_num(line, v);
  }
  return line;
}

MetricLog::MetricLog(const std::string& csv_path) : file_(csv_path) {
  if (!file_) throw std::runtime_error("MetricLog: cannot open '" + csv_path + "'");
  file_ << header() << '\n';
  file_.flush();
}

void MetricLog::append(const MetricRow& row) {
  rows_.push_back(row);
  if (file_.is_open()) {
    file_ << format_row(row) << '\n';
    file_.flush();
  }
}

}  // namespace qcse
