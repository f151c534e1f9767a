#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qcse/rng.hpp"

namespace qcse {

enum class Activation { tanh, relu };

/// Output-head descriptor. `linear` emits the raw last layer; `gaussian`
/// marks the raw output as [mean | log_std] halves for a squashed-Gaussian
/// policy (math in heads.hpp), with log_std clamped to the configured range.
enum class HeadKind { linear, gaussian };

struct MlpSpec {
  int input_dim = 0;
  std::vector<int> hidden;
  int output_dim = 0;
  Activation activation = Activation::tanh;
  HeadKind head = HeadKind::linear;
  double log_std_min = -5.0;
  double log_std_max = 2.0;

  std::vector<int> layer_sizes() const;  // [input, hidden..., output]
};

/// Multilayer perceptron with exact reverse-mode gradients. Batches are
/// rows. Hidden layers share one activation; the output layer is affine.
class Mlp {
 public:
  Mlp(MlpSpec spec, Rng& init);
  static Mlp zeros(MlpSpec spec);

  const MlpSpec& spec() const { return spec_; }
  int layer_count() const { return static_cast<int>(W.size()); }
  int param_count() const;

  std::vector<Eigen::MatrixXd> W;  ///< W[l]: fan_in x fan_out
  std::vector<Eigen::VectorXd> b;  ///< b[l]: fan_out

  /// Post-activation values per layer; acts[0] is the input, acts.back()
  /// the raw output. Enough to rebuild both tanh and relu derivatives.
  struct Cache {
    std::vector<Eigen::MatrixXd> acts;
  };

  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, Cache& cache) const;

  struct Grad {
    std::vector<Eigen::MatrixXd> dW;
    std::vector<Eigen::VectorXd> db;
    Eigen::MatrixXd dx;  ///< gradient w.r.t. the input batch
  };

  /// Reverse pass for dLoss/dOutput `dout` against a cached forward.
  /// Throws if the cache is missing or shapes disagree.
  Grad backward(const Cache& cache, const Eigen::MatrixXd& dout) const;

  Grad zero_grad() const;
  /// acc += scale * g (dW/db only; dx is per-call).
  static void accumulate(Grad& acc, const Grad& g, double scale = 1.0);

  Eigen::VectorXd flatten() const;
  void unflatten(const Eigen::VectorXd& flat);
  Eigen::VectorXd flatten_grad(const Grad& g) const;

 private:
  explicit Mlp(MlpSpec spec);
  MlpSpec spec_;
};

}  // namespace qcse
