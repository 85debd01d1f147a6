#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "rislab/environment.hpp"
#include "rislab/explorer.hpp"
#include "rislab/sac.hpp"

namespace rislab {

/// Learner hyperparameters. Defaults follow the reference table of the
/// experiments (2 x 256 rectifier layers, eta = tau = 1e-3, batch 16, ...).
struct AgentConfig {
  std::vector<Eigen::Index> hidden{256, 256};
  double learning_rate = 1e-3;
  std::size_t batch_size = 16;
  std::size_t buffer_capacity = 20000;
  double tau = 1e-3;
  double discount = 1.0;
  double initial_alpha = 0.2;

  bool use_explorer = false;
  double lambda0 = 0.3;
  PerturbMode perturb_mode = PerturbMode::kBlended;
  /// Lower end of the explorer's beta range; nullopt means the true beta_min.
  std::optional<double> beta_lo;

  AdamConfig adam() const { return AdamConfig{learning_rate, 0.9, 0.999, 1e-8}; }
};

struct StepRecord {
  double true_sum_rate = 0.0;
  double training_reward = 0.0;
  double lambda = 0.0;
  double alpha = 0.0;

  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct LearningRecord {
  std::uint64_t seed = 0;
  std::vector<StepRecord> steps;
};

/// Independent RNG streams derived from one run seed.
struct RunStreams {
  explicit RunStreams(std::uint64_t seed);

  SeededRng channels;
  SeededRng policy_init;
  SeededRng critic_init;
  SeededRng explorer_init;
  SeededRng acting;
  SeededRng replay;
  SeededRng updates;
  SeededRng explorer_updates;
};

/// One learner: policy, twin critics, entropy tuner, replay, optional explorer.
class Agent {
 public:
  Agent(const SystemConfig& sys, const AgentConfig& cfg, RunStreams& streams);

  GaussianPolicy& policy() { return policy_; }
  TwinCritics& critics() { return critics_; }
  ExplorerNet* explorer() { return explorer_ ? &*explorer_ : nullptr; }
  ReplayBuffer& buffer() { return buffer_; }
  RewardTracker& rewards() { return rewards_; }
  double alpha() const { return tuner_.alpha(); }

  /// One full update (critics, actor, explorer, temperature, targets) when the
  /// buffer holds at least a mini-batch. Returns false when skipped.
  bool update(double lambda, RunStreams& streams);

 private:
  AgentConfig cfg_;
  GaussianPolicy policy_;
  OptimState policy_opt_;
  TwinCritics critics_;
  std::optional<ExplorerNet> explorer_;
  EntropyTuner tuner_;
  ReplayBuffer buffer_;
  RewardTracker rewards_;
};

using ProgressFn = std::function<void(std::int64_t step, const StepRecord&)>;
using FinishFn = std::function<void(Agent&)>;

/// Runs `steps` environment steps with one update after each. When `channels`
/// is given the environment starts from it instead of drawing a realisation.
/// `finish` sees the trained agent before it is destroyed.
LearningRecord train_loop(const SystemConfig& sys, const AgentConfig& cfg, std::uint64_t seed,
                          std::int64_t steps, const std::optional<ChannelSet>& channels = {},
                          const ProgressFn& progress = {}, const FinishFn& finish = {});

}  // namespace rislab
