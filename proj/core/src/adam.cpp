#include "qcse/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace qcse {

Adam::Adam(int dim, AdamConfig cfg) : cfg_(cfg) {
  if (dim < 1) throw std::invalid_argument("Adam: dim must be >= 1");
  m = Eigen::VectorXd::Zero(dim);
  v = Eigen::VectorXd::Zero(dim);
}

void Adam::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
  if (params.size() != m.size() || grad.size() != m.size()) {
    throw std::invalid_argument("Adam::step: shape mismatch");
  }
  if (!grad.allFinite()) {
    throw std::invalid_argument("Adam::step: non-finite gradient");
  }
  ++t_;
  m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * grad;
  v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * grad.array().square().matrix();
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  params.array() -=
      cfg_.lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + cfg_.eps);
}

void adam_apply(Adam& opt, Mlp& net, const Mlp::Grad& grad) {
  Eigen::VectorXd p = net.flatten();
  opt.step(p, net.flatten_grad(grad));
  net.unflatten(p);
}

}  // namespace qcse
