#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rislab/neural.hpp"

namespace rislab {

class GaussianPolicy;
struct TwinCritics;
struct Batch;

/// How the explorer output is combined with the policy action.
enum class PerturbMode {
  kBlended,  // a * ((1 - lambda) + lambda * xi): lambda = 0 leaves a untouched
  kLiteral,  // a * (lambda * xi)
};

/// Deterministic network predicting one reflection loss per RIS element.
/// The raw tanh outputs x_l are mapped to beta_l = lo + (1 - lo)(x_l + 1)/2
/// and assembled into xi = [1 ... 1 (2MK), beta_1 beta_1 ... beta_L beta_L].
class ExplorerNet {
 public:
  ExplorerNet(Eigen::Index state_dim, std::size_t beamformer_dim, std::size_t elements,
              std::vector<Eigen::Index> hidden, double beta_lo, AdamConfig adam, SeededRng& rng);

  /// Wraps an existing network (used by tests); the target starts as a copy.
  ExplorerNet(Mlp net, std::size_t beamformer_dim, double beta_lo, AdamConfig adam = {});

  Mlp& online() { return online_; }
  const Mlp& online() const { return online_; }
  Mlp& target() { return target_; }
  const Mlp& target() const { return target_; }
  OptimState& optimizer() { return opt_; }

  double beta_lo() const { return beta_lo_; }
  std::size_t beamformer_dim() const { return beamformer_dim_; }
  std::size_t elements() const { return static_cast<std::size_t>(online_.output_size()); }
  std::size_t action_dim() const { return beamformer_dim_ + 2 * elements(); }

  /// Assembled xi for each state column; (2MK + 2L) x N.
  Matrix predict(const Matrix& states) const { return assemble(online_.forward(states)); }
  Matrix predict_target(const Matrix& states) const { return assemble(target_.forward(states)); }
  Vector predict(const Vector& state) const;

  /// Maps raw tanh outputs (L x N) to the assembled vector.
  Matrix assemble(const Matrix& tanh_out) const;

  /// Backpropagates d/d xi (action_dim x N) onto the raw tanh outputs.
  Matrix assemble_backward(const Matrix& grad_xi) const;

 private:
  std::size_t beamformer_dim_;
  double beta_lo_;
  Mlp online_;
  Mlp target_;
  OptimState opt_;
};

/// Multiplier applied to every action entry: (1 - lambda) + lambda * xi for
/// blended mode, lambda * xi for literal mode. Throws DomainError when lambda
/// is outside [0, 1].
Matrix perturbation_factors(const Matrix& xi, double lambda, PerturbMode mode);

/// a_beta = a (.) factors(xi, lambda).
Matrix perturb(const Matrix& actions, const Matrix& xi, double lambda, PerturbMode mode);
Vector perturb(const Vector& action, const Vector& xi, double lambda, PerturbMode mode);

/// Per-element modulus carried by a factor vector (every second entry of the
/// phase block).
std::vector<double> element_scale(const Vector& factors, std::size_t beamformer_dim);

/// Linear decay lambda(t) = lambda0 * max(0, 1 - t / total).
class LambdaSchedule {
 public:
  LambdaSchedule(double initial, std::int64_t total_steps);

  double current() const;
  std::int64_t step_index() const { return step_; }

  /// Returns lambda at the current step, then advances.
  double step();

 private:
  double initial_;
  std::int64_t total_;
  std::int64_t step_ = 0;
};

/// Explorer objective and the perturbation context handed to the SAC losses.
struct Perturbation {
  const ExplorerNet* explorer = nullptr;
  double lambda = 0.0;
  PerturbMode mode = PerturbMode::kBlended;
};

/// Sum over both critics of the mean squared TD error at perturbed fresh
/// policy actions, with `targets` held constant. One Adam ascent step on the
/// online explorer. Returns the objective before the step.
double explorer_update(const Batch& batch, const Vector& targets, const TwinCritics& critics,
                       const GaussianPolicy& policy, ExplorerNet& explorer, double lambda,
                       PerturbMode mode, SeededRng& rng);

/// The objective alone, and its gradient with respect to the online explorer
/// for given fresh actions (exposed for gradient checks).
double explorer_objective(const Matrix& states, const Matrix& actions, const Vector& targets,
                          const TwinCritics& critics, const ExplorerNet& explorer, double lambda,
                          PerturbMode mode);
Gradients explorer_gradient(const Matrix& states, const Matrix& actions, const Vector& targets,
                            const TwinCritics& critics, const ExplorerNet& explorer,
                            double lambda, PerturbMode mode);

}  // namespace rislab
