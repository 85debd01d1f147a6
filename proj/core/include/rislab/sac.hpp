#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "rislab/explorer.hpp"
#include "rislab/neural.hpp"

namespace rislab {

/// (s, a, a_beta, r, s') as stored by the agent. `executed` equals `action`
/// whenever no explorer is attached.
struct Transition {
  Vector state;
  Vector action;
  Vector executed;
  double reward = 0.0;
  Vector next_state;
};

/// Column-stacked mini-batch.
struct Batch {
  Matrix states;
  Matrix actions;
  Matrix executed;
  Vector rewards;
  Matrix next_states;

  Eigen::Index size() const { return rewards.size(); }
};

/// Fixed-capacity ring; the oldest transition is overwritten first.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return items_.size(); }
  std::size_t inserted() const { return inserted_; }

  void push(Transition t);
  const Transition& at(std::size_t i) const { return items_.at(i); }

  /// Uniform sampling with replacement.
  Batch sample(std::size_t n, SeededRng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::size_t inserted_ = 0;
  std::vector<Transition> items_;
};

/// Everything the reparameterised sample needs for backpropagation.
struct PolicySample {
  Matrix actions;    // tanh(u), d x N
  Vector log_probs;  // N
  Matrix noise;      // epsilon
  Matrix mean;       // tanh of the mean head
  Matrix log_std;    // clamped
  Matrix log_std_raw;
  MlpTrace trace;
};

/// Tanh-squashed diagonal Gaussian. The trunk emits 2d values: the first d
/// pass through tanh to form the mean, the last d are the log standard
/// deviation, clamped to [kLogStdMin, kLogStdMax].
class GaussianPolicy {
 public:
  static constexpr double kLogStdMin = -20.0;
  static constexpr double kLogStdMax = 2.0;
  static constexpr double kSquashEpsilon = 1e-6;

  GaussianPolicy(Eigen::Index state_dim, Eigen::Index action_dim,
                 std::vector<Eigen::Index> hidden, SeededRng& rng);
  explicit GaussianPolicy(Mlp trunk);

  Eigen::Index action_dim() const { return net_.output_size() / 2; }
  Eigen::Index state_dim() const { return net_.input_size(); }
  Mlp& net() { return net_; }
  const Mlp& net() const { return net_; }

  PolicySample sample(const Matrix& states, SeededRng& rng) const;

  /// Same as sample() with caller-supplied noise (d x N).
  PolicySample sample_with_noise(const Matrix& states, const Matrix& noise) const;

  /// Gradient of a scalar J(actions, log_probs) with respect to the trunk,
  /// given dJ/d actions (d x N) and dJ/d log_probs (N), noise held fixed.
  Gradients backward(const PolicySample& s, const Matrix& grad_actions,
                     const Vector& grad_log_probs) const;

 private:
  Mlp net_;
};

/// Twin Q-networks over the concatenated (state, action) input, their Polyak
/// targets, and optimizers.
struct TwinCritics {
  TwinCritics(Eigen::Index state_dim, Eigen::Index action_dim, std::vector<Eigen::Index> hidden,
              AdamConfig adam, SeededRng& rng);
  TwinCritics(Mlp q1, Mlp q2, AdamConfig adam = {});
  TwinCritics(std::pair<Mlp, Mlp> pair, AdamConfig adam);

  Eigen::Index state_dim;
  Mlp online[2];
  Mlp target[2];
  OptimState opt[2];

  /// min_i Q_i(s, a) over the online or target pair, per column.
  Vector min_q(const Matrix& states, const Matrix& actions, bool use_target) const;
};

Matrix stack_input(const Matrix& states, const Matrix& actions);

/// Running mean of every instantaneous reward recorded so far.
class RewardTracker {
 public:
  double mean() const { return count_ == 0 ? 0.0 : sum_ / static_cast<double>(count_); }
  std::size_t count() const { return count_; }
  void record(double r);

  /// r minus the mean of the rewards recorded before it; then records r.
  double adjust(double r);

 private:
  double sum_ = 0.0;
  std::size_t count_ = 0;
};

/// Trainable log temperature with target entropy -action_dim.
class EntropyTuner {
 public:
  EntropyTuner(double initial_alpha, double target_entropy, AdamConfig adam = {});

  double alpha() const;
  double log_alpha() const { return log_alpha_; }
  double target_entropy() const { return target_entropy_; }

  /// One Adam descent step on mean(-exp(log_alpha) * (log_pi + target)).
  double update(const Vector& log_probs);

 private:
  double log_alpha_;
  double target_entropy_;
  ScalarAdam opt_;
};

struct CriticStep {
  double loss[2] = {0.0, 0.0};
  Vector targets;  // y, held constant by the explorer objective
};

/// Soft Bellman targets y = (r - reward_mean) + gamma (min_i Q'_i(s', a') - alpha log pi(a'|s'))
/// with a' ~ pi(.|s') (perturbed by the target explorer when `perturbation`
/// is set), then one Adam descent step per critic on mean (y - Q_i(s, a_beta))^2.
CriticStep critic_update(const Batch& batch, TwinCritics& critics, const GaussianPolicy& policy,
                         double alpha, double reward_mean, const Perturbation* perturbation,
                         SeededRng& rng, double discount = 1.0);

/// Computes only the targets (no parameter change).
Vector critic_targets(const Batch& batch, const TwinCritics& critics, const GaussianPolicy& policy,
                      double alpha, double reward_mean, const Perturbation* perturbation,
                      SeededRng& rng, double discount = 1.0);

struct ActorStep {
  double loss = 0.0;
  Vector log_probs;
};

/// J(psi) = mean(alpha log pi(a|s) - min_j Q_j(s, a_beta)) on fresh
/// reparameterised actions; one Adam step minimising J.
ActorStep actor_update(const Batch& batch, GaussianPolicy& policy, OptimState& opt,
                       const TwinCritics& critics, double alpha, const Perturbation* perturbation,
                       SeededRng& rng);

/// Loss and trunk gradient for fixed noise (exposed for gradient checks).
double actor_loss(const Matrix& states, const Matrix& noise, const GaussianPolicy& policy,
                  const TwinCritics& critics, double alpha, const Perturbation* perturbation);
Gradients actor_gradient(const Matrix& states, const Matrix& noise, const GaussianPolicy& policy,
                         const TwinCritics& critics, double alpha,
                         const Perturbation* perturbation, Vector* log_probs = nullptr);

}  // namespace rislab
