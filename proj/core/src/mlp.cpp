#include "qcse/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace qcse {

std::vector<int> MlpSpec::layer_sizes() const {
  std::vector<int> sizes;
  sizes.push_back(input_dim);
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(output_dim);
  return sizes;
}

static void validate_spec(const MlpSpec& spec) {
  if (spec.input_dim < 1 || spec.output_dim < 1) {
    throw std::invalid_argument("MlpSpec: input_dim and output_dim must be >= 1");
  }
  for (int h : spec.hidden) {
    if (h < 1) throw std::invalid_argument("MlpSpec: hidden widths must be >= 1");
  }
  if (spec.head == HeadKind::gaussian) {
    if (spec.output_dim % 2 != 0) {
      throw std::invalid_argument("MlpSpec: gaussian head needs an even output_dim");
    }
    if (!(spec.log_std_min < spec.log_std_max)) {
      throw std::invalid_argument("MlpSpec: log_std_min must be < log_std_max");
    }
  }
}

Mlp::Mlp(MlpSpec spec) : spec_(std::move(spec)) {
  validate_spec(spec_);
  const auto sizes = spec_.layer_sizes();
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    W.emplace_back(Eigen::MatrixXd::Zero(sizes[l], sizes[l + 1]));
    b.emplace_back(Eigen::VectorXd::Zero(sizes[l + 1]));
  }
}

Mlp::Mlp(MlpSpec spec, Rng& init) : Mlp(std::move(spec)) {
  for (std::size_t l = 0; l < W.size(); ++l) {
    const double fan_in = static_cast<double>(W[l].rows());
    const double fan_out = static_cast<double>(W[l].cols());
    if (spec_.activation == Activation::relu) {
      const double sd = std::sqrt(2.0 / fan_in);
      for (Eigen::Index r = 0; r < W[l].rows(); ++r)
        for (Eigen::Index c = 0; c < W[l].cols(); ++c) W[l](r, c) = sd * init.normal();
    } else {
      const double limit = std::sqrt(6.0 / (fan_in + fan_out));
      for (Eigen::Index r = 0; r < W[l].rows(); ++r)
        for (Eigen::Index c = 0; c < W[l].cols(); ++c) W[l](r, c) = init.uniform(-limit, limit);
    }
  }
  // Small final layer for gaussian heads: near-zero initial mean/log_std
  // keeps early policy entropy at the clamp-free scale.
  if (spec_.head == HeadKind::gaussian && !W.empty()) {
    W.back() *= 0.01;
  }
}

Mlp Mlp::zeros(MlpSpec spec) { return Mlp(std::move(spec)); }

int Mlp::param_count() const {
  int n = 0;
  for (std::size_t l = 0; l < W.size(); ++l) {
    n += static_cast<int>(W[l].size() + b[l].size());
  }
  return n;
}

static Eigen::MatrixXd apply_activation(const Eigen::MatrixXd& z, Activation act) {
  if (act == Activation::tanh) return z.array().tanh().matrix();
  return z.array().max(0.0).matrix();
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x) const {
  Cache cache;
  return forward(x, cache);
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x, Cache& cache) const {
  if (x.cols() != spec_.input_dim) {
    throw std::invalid_argument("Mlp::forward: input dimension mismatch");
  }
  cache.acts.clear();
  cache.acts.reserve(W.size() + 1);
  cache.acts.push_back(x);
  for (std::size_t l = 0; l < W.size(); ++l) {
    Eigen::MatrixXd z = cache.acts.back() * W[l];
    z.rowwise() += b[l].transpose();
    const bool last = (l + 1 == W.size());
    cache.acts.push_back(last ? std::move(z) : apply_activation(z, spec_.activation));
  }
  return cache.acts.back();
}

Mlp::Grad Mlp::backward(const Cache& cache, const Eigen::MatrixXd& dout) const {
  if (cache.acts.size() != W.size() + 1) {
    throw std::invalid_argument("Mlp::backward: cache does not match a forward pass");
  }
  if (dout.rows() != cache.acts.back().rows() || dout.cols() != spec_.output_dim) {
    throw std::invalid_argument("Mlp::backward: dout shape mismatch");
  }
  Grad g = zero_grad();
  Eigen::MatrixXd delta = dout;
  for (int l = layer_count() - 1; l >= 0; --l) {
    g.dW[l] = cache.acts[l].transpose() * delta;
    g.db[l] = delta.colwise().sum();
    Eigen::MatrixXd dprev = delta * W[l].transpose();
    if (l > 0) {
      const Eigen::MatrixXd& a = cache.acts[l];
      if (spec_.activation == Activation::tanh) {
        delta = dprev.array() * (1.0 - a.array().square());
      } else {
        delta = dprev.array() * (a.array() > 0.0).cast<double>();
      }
    } else {
      g.dx = std::move(dprev);
    }
  }
  return g;
}

Mlp::Grad Mlp::zero_grad() const {
  Grad g;
  for (std::size_t l = 0; l < W.size(); ++l) {
    g.dW.emplace_back(Eigen::MatrixXd::Zero(W[l].rows(), W[l].cols()));
    g.db.emplace_back(Eigen::VectorXd::Zero(b[l].size()));
  }
  return g;
}

void Mlp::accumulate(Grad& acc, const Grad& g, double scale) {
  if (acc.dW.size() != g.dW.size()) {
    throw std::invalid_argument("Mlp::accumulate: layer count mismatch");
  }
  for (std::size_t l = 0; l < acc.dW.size(); ++l) {
    acc.dW[l] += scale * g.dW[l];
    acc.db[l] += scale * g.db[l];
  }
}

Eigen::VectorXd Mlp::flatten() const {
  Eigen::VectorXd flat(param_count());
  Eigen::Index at = 0;
  for (std::size_t l = 0; l < W.size(); ++l) {
    flat.segment(at, W[l].size()) = Eigen::Map<const Eigen::VectorXd>(W[l].data(), W[l].size());
    at += W[l].size();
    flat.segment(at, b[l].size()) = b[l];
    at += b[l].size();
  }
  return flat;
}

void Mlp::unflatten(const Eigen::VectorXd& flat) {
  if (flat.size() != param_count()) {
    throw std::invalid_argument("Mlp::unflatten: parameter count mismatch");
  }
  Eigen::Index at = 0;
  for (std::size_t l = 0; l < W.size(); ++l) {
    Eigen::Map<Eigen::VectorXd>(W[l].data(), W[l].size()) = flat.segment(at, W[l].size());
    at += W[l].size();
    b[l] = flat.segment(at, b[l].size());
    at += b[l].size();
  }
}

Eigen::VectorXd Mlp::flatten_grad(const Grad& g) const {
  Eigen::VectorXd flat(param_count());
  Eigen::Index at = 0;
  for (std::size_t l = 0; l < W.size(); ++l) {
    flat.segment(at, g.dW[l].size()) = Eigen::Map<const Eigen::VectorXd>(g.dW[l].data(), g.dW[l].size());
    at += g.dW[l].size();
    flat.segment(at, g.db[l].size()) = g.db[l];
    at += g.db[l].size();
  }
  return flat;
}

}  // namespace qcse
