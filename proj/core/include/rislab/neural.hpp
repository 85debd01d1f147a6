#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "rislab/rng.hpp"

namespace rislab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class OutputActivation { kLinear, kTanh };

struct DenseLayer {
  Matrix weight;  // out x in
  Vector bias;    // out
};

/// Activations recorded by a forward pass; column j of every matrix belongs to
/// sample j of the batch.
struct MlpTrace {
  std::vector<Matrix> activations;  // [0] = input, back() = output
};

struct Gradients {
  std::vector<DenseLayer> params;
  Matrix input;

  bool all_finite() const;
};

/// Xavier-uniform matrix of shape rows x cols, bound sqrt(6 / (rows + cols)).
/// Entries are drawn in row-major order.
Matrix xavier_init(Eigen::Index rows, Eigen::Index cols, SeededRng& rng);

/// Fully connected network with rectifier hidden units and a linear or tanh
/// head. `sizes` lists every layer width starting with the input, so
/// {in, out} is a single affine layer and {in, h1, h2, out} the usual
/// two-hidden-layer topology.
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::vector<Eigen::Index> sizes, OutputActivation head, SeededRng& rng);

  /// All parameters zero.
  static Mlp zeros(std::vector<Eigen::Index> sizes, OutputActivation head);

  Eigen::Index input_size() const { return sizes_.front(); }
  Eigen::Index output_size() const { return sizes_.back(); }
  const std::vector<Eigen::Index>& sizes() const { return sizes_; }
  OutputActivation head() const { return head_; }

  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  std::size_t parameter_count() const;
  bool same_architecture(const Mlp& other) const;
  bool all_finite() const;

  Matrix forward(const Matrix& x) const;
  Vector forward(const Vector& x) const;

  MlpTrace forward_trace(const Matrix& x) const;

  /// Reverse-mode gradients of Σ_j <upstream_j, output_j> with respect to
  /// every parameter and every input column.
  Gradients backward(const MlpTrace& trace, const Matrix& upstream) const;

  /// Convenience wrapper: forward_trace followed by backward.
  Gradients backward(const Matrix& x, const Matrix& upstream) const;

  /// Only the input gradient; parameter gradients are not formed.
  Matrix input_gradient(const MlpTrace& trace, const Matrix& upstream) const;

  /// Only the parameter gradients; Gradients::input is left empty.
  Gradients parameter_gradient(const MlpTrace& trace, const Matrix& upstream) const;

 private:
  Mlp(std::vector<Eigen::Index> sizes, OutputActivation head);
  void check_input(const Matrix& x) const;
  Gradients backprop(const MlpTrace& trace, const Matrix& upstream, bool want_params,
                     bool want_input) const;

  std::vector<Eigen::Index> sizes_;
  OutputActivation head_ = OutputActivation::kLinear;
  std::vector<DenseLayer> layers_;
};

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

enum class Direction { kDescend, kAscend };

/// First/second moment accumulators mirroring an Mlp's parameters.
class OptimState {
 public:
  OptimState() = default;
  OptimState(const Mlp& net, AdamConfig config);

  const AdamConfig& config() const { return config_; }
  std::int64_t step() const { return step_; }

 private:
  friend void adam_step(OptimState&, Mlp&, const Gradients&, Direction);

  AdamConfig config_;
  std::vector<DenseLayer> first_;
  std::vector<DenseLayer> second_;
  std::int64_t step_ = 0;
};

/// One bias-corrected Adam update. kAscend steps along +grad. Throws
/// DomainError (leaving net and state untouched) on non-finite gradients.
void adam_step(OptimState& opt, Mlp& net, const Gradients& grads, Direction direction);

/// Adam for a single scalar parameter (the entropy temperature).
class ScalarAdam {
 public:
  explicit ScalarAdam(AdamConfig config = {}) : config_(config) {}
  void step(double& param, double grad, Direction direction);
  std::int64_t steps() const { return step_; }

 private:
  AdamConfig config_;
  double first_ = 0.0;
  double second_ = 0.0;
  std::int64_t step_ = 0;
};

/// target <- (1 - tau) * target + tau * online, parameter by parameter.
void polyak_update(Mlp& target, const Mlp& online, double tau);

/// Text checkpoint: versioned header, layer sizes, head, then every weight
/// (row-major) and bias in layer order at 17 significant digits.
void save_mlp(std::ostream& out, const Mlp& net);
Mlp load_mlp(std::istream& in);

}  // namespace rislab
