#include "qcse/heads.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qcse {

namespace {

constexpr double kHalfLog2Pi = 0.9189385332046727;  // log(2*pi)/2
constexpr double kLog2 = 0.6931471805599453;
constexpr double kAtanhClip = 1.0 - 1e-6;

// -log(1 - tanh(x)^2) = 2*(x + softplus(-2x) - log 2); smooth and exact,
// so no epsilon inside the log and the derivative is exactly 2*tanh(x).
double neg_log_sech2(double x) { return 2.0 * (x + softplus(-2.0 * x) - kLog2); }

}  // namespace

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

GaussianHead::GaussianHead(const MlpSpec& spec)
    : action_dim_(spec.output_dim / 2),
      log_std_min_(spec.log_std_min),
      log_std_max_(spec.log_std_max) {
  if (spec.head != HeadKind::gaussian) {
    throw std::invalid_argument("GaussianHead: spec head is not gaussian");
  }
}

GaussianSample GaussianHead::sample(const Eigen::MatrixXd& raw, Rng& rng) const {
  Eigen::MatrixXd noise(raw.rows(), action_dim_);
  for (Eigen::Index i = 0; i < noise.rows(); ++i)
    for (Eigen::Index j = 0; j < noise.cols(); ++j) noise(i, j) = rng.normal();
  return sample_with_noise(raw, noise);
}

GaussianSample GaussianHead::sample_with_noise(const Eigen::MatrixXd& raw,
                                               const Eigen::MatrixXd& noise) const {
  const Eigen::Index n = raw.rows();
  if (raw.cols() != 2 * action_dim_) throw std::invalid_argument("GaussianHead: raw width mismatch");
  GaussianSample s;
  s.noise = noise;
  s.pre.resize(n, action_dim_);
  s.action.resize(n, action_dim_);
  s.log_prob = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int j = 0; j < action_dim_; ++j) {
      const double mean = raw(i, j);
      const double ls = std::clamp(raw(i, action_dim_ + j), log_std_min_, log_std_max_);
      const double sigma = std::exp(ls);
      const double pre = mean + sigma * noise(i, j);
      s.pre(i, j) = pre;
      s.action(i, j) = std::tanh(pre);
      s.log_prob[i] += -0.5 * noise(i, j) * noise(i, j) - kHalfLog2Pi - ls + neg_log_sech2(pre);
    }
  }
  return s;
}

Eigen::MatrixXd GaussianHead::mean_action(const Eigen::MatrixXd& raw) const {
  return raw.leftCols(action_dim_).array().tanh().matrix();
}

Eigen::VectorXd GaussianHead::log_prob(const Eigen::MatrixXd& raw,
                                       const Eigen::MatrixXd& action) const {
  const Eigen::Index n = raw.rows();
  if (action.rows() != n || action.cols() != action_dim_) {
    throw std::invalid_argument("GaussianHead::log_prob: action shape mismatch");
  }
  Eigen::VectorXd lp = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int j = 0; j < action_dim_; ++j) {
      const double a = std::clamp(action(i, j), -kAtanhClip, kAtanhClip);
      const double pre = std::atanh(a);
      const double mean = raw(i, j);
      const double ls = std::clamp(raw(i, action_dim_ + j), log_std_min_, log_std_max_);
      const double z = (pre - mean) / std::exp(ls);
      lp[i] += -0.5 * z * z - kHalfLog2Pi - ls + neg_log_sech2(pre);
    }
  }
  return lp;
}

Eigen::MatrixXd GaussianHead::backward_sample(const Eigen::MatrixXd& raw,
                                              const GaussianSample& s,
                                              const Eigen::VectorXd& dlogp,
                                              const Eigen::MatrixXd& daction) const {
  const Eigen::Index n = raw.rows();
  Eigen::MatrixXd draw = Eigen::MatrixXd::Zero(n, 2 * action_dim_);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int j = 0; j < action_dim_; ++j) {
      const double raw_ls = raw(i, action_dim_ + j);
      const bool clamped = raw_ls < log_std_min_ || raw_ls > log_std_max_;
      const double ls = std::clamp(raw_ls, log_std_min_, log_std_max_);
      const double sigma = std::exp(ls);
      const double t = s.action(i, j);  // tanh(pre)
      // Through pre = mean + sigma*xi: d log_prob/d pre = 2 tanh(pre),
      // d action/d pre = 1 - tanh^2.
      const double dpre = dlogp[i] * 2.0 * t + daction(i, j) * (1.0 - t * t);
      draw(i, j) += dpre;
      if (!clamped) {
        draw(i, action_dim_ + j) += dpre * sigma * s.noise(i, j) - dlogp[i];
      }
    }
  }
  return draw;
}

Eigen::MatrixXd GaussianHead::backward_log_prob(const Eigen::MatrixXd& raw,
                                                const Eigen::MatrixXd& action,
                                                const Eigen::VectorXd& dlogp) const {
  const Eigen::Index n = raw.rows();
  Eigen::MatrixXd draw = Eigen::MatrixXd::Zero(n, 2 * action_dim_);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int j = 0; j < action_dim_; ++j) {
      const double a = std::clamp(action(i, j), -kAtanhClip, kAtanhClip);
      const double pre = std::atanh(a);
      const double raw_ls = raw(i, action_dim_ + j);
      const bool clamped = raw_ls < log_std_min_ || raw_ls > log_std_max_;
      const double ls = std::clamp(raw_ls, log_std_min_, log_std_max_);
      const double z = (pre - raw(i, j)) / std::exp(ls);
      draw(i, j) += dlogp[i] * z / std::exp(ls);
      if (!clamped) {
        draw(i, action_dim_ + j) += dlogp[i] * (z * z - 1.0);
      }
    }
  }
  return draw;
}

Eigen::MatrixXd CategoricalHead::probs(const Eigen::MatrixXd& logits) const {
  Eigen::MatrixXd p(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double m = logits.row(i).maxCoeff();
    Eigen::ArrayXd e = (logits.row(i).array() - m).exp();
    p.row(i) = (e / e.sum()).matrix();
  }
  return p;
}

Eigen::MatrixXd CategoricalHead::log_probs(const Eigen::MatrixXd& logits) const {
  Eigen::MatrixXd lp(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double m = logits.row(i).maxCoeff();
    const Eigen::ArrayXd shifted = logits.row(i).array() - m;
    const double lse = std::log(shifted.exp().sum());
    lp.row(i) = (shifted - lse).matrix();
  }
  return lp;
}

std::vector<int> CategoricalHead::sample(const Eigen::MatrixXd& logits, Rng& rng) const {
  const Eigen::MatrixXd p = probs(logits);
  std::vector<int> out(p.rows());
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    const double u = rng.uniform();
    double cum = 0.0;
    int pick = static_cast<int>(p.cols()) - 1;
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
      cum += p(i, j);
      if (u < cum) {
        pick = static_cast<int>(j);
        break;
      }
    }
    out[i] = pick;
  }
  return out;
}

std::vector<int> CategoricalHead::argmax(const Eigen::MatrixXd& logits) const {
  std::vector<int> out(logits.rows());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    Eigen::Index j;
    logits.row(i).maxCoeff(&j);
    out[i] = static_cast<int>(j);
  }
  return out;
}

}  // namespace qcse
