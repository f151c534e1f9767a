#include "qcse/double_q.hpp"

namespace qcse {

DoubleQ::DoubleQ(const MlpSpec& critic_spec, Rng& init)
    : q1(critic_spec, init), q2(critic_spec, init), t1(q1), t2(q2) {}

void DoubleQ::ema_update() {
  for (int l = 0; l < q1.layer_count(); ++l) {
    t1.W[l] = (1.0 - ema_rate) * q1.W[l] + ema_rate * t1.W[l];
    t1.b[l] = (1.0 - ema_rate) * q1.b[l] + ema_rate * t1.b[l];
    t2.W[l] = (1.0 - ema_rate) * q2.W[l] + ema_rate * t2.W[l];
    t2.b[l] = (1.0 - ema_rate) * q2.b[l] + ema_rate * t2.b[l];
  }
}

Eigen::MatrixXd DoubleQ::min_online(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) const {
  ++min_online_queries;
  return a.cwiseMin(b);
}

Eigen::MatrixXd DoubleQ::min_target(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) const {
  ++min_target_queries;
  return a.cwiseMin(b);
}

}  // namespace qcse
