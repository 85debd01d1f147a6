#include "rislab/training.hpp"

#include <stdexcept>

namespace rislab {

namespace {

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

RunStreams::RunStreams(std::uint64_t seed)
    : channels(SeededRng(seed).fork(1)),
      policy_init(SeededRng(seed).fork(2)),
      critic_init(SeededRng(seed).fork(3)),
      explorer_init(SeededRng(seed).fork(4)),
      acting(SeededRng(seed).fork(5)),
      replay(SeededRng(seed).fork(6)),
      updates(SeededRng(seed).fork(7)),
      explorer_updates(SeededRng(seed).fork(8)) {}

Agent::Agent(const SystemConfig& sys, const AgentConfig& cfg, RunStreams& streams)
    : cfg_(cfg),
      policy_(static_cast<Eigen::Index>(sys.state_dim()), static_cast<Eigen::Index>(sys.action_dim()),
              cfg.hidden, streams.policy_init),
      policy_opt_(policy_.net(), cfg.adam()),
      critics_(static_cast<Eigen::Index>(sys.state_dim()), static_cast<Eigen::Index>(sys.action_dim()),
               cfg.hidden, cfg.adam(), streams.critic_init),
      tuner_(cfg.initial_alpha, -static_cast<double>(sys.action_dim()), cfg.adam()),
      buffer_(cfg.buffer_capacity) {
  if (cfg.batch_size == 0) throw DomainError("AgentConfig: batch size must be positive");
  if (!(cfg.discount > 0.0 && cfg.discount <= 1.0)) {
    throw DomainError("AgentConfig: discount must lie in (0, 1]");
  }
  if (cfg.use_explorer) {
    explorer_.emplace(static_cast<Eigen::Index>(sys.state_dim()), sys.beamformer_dim(),
                      sys.elements, cfg.hidden, cfg.beta_lo.value_or(sys.beta_min), cfg.adam(),
                      streams.explorer_init);
  }
}

bool Agent::update(double lambda, RunStreams& streams) {
  if (buffer_.size() < cfg_.batch_size) return false;
  const Batch batch = buffer_.sample(cfg_.batch_size, streams.replay);
  const double alpha = tuner_.alpha();

  Perturbation perturbation;
  const Perturbation* p = nullptr;
  if (explorer_) {
    perturbation = {&*explorer_, lambda, cfg_.perturb_mode};
    p = &perturbation;
  }

  const CriticStep cs =
      critic_update(batch, critics_, policy_, alpha, rewards_.mean(), p, streams.updates, cfg_.discount);
  const ActorStep as = actor_update(batch, policy_, policy_opt_, critics_, alpha, p, streams.updates);
  if (explorer_) {
    explorer_update(batch, cs.targets, critics_, policy_, *explorer_, lambda, cfg_.perturb_mode,
                    streams.explorer_updates);
  }
  tuner_.update(as.log_probs);

  for (int i = 0; i < 2; ++i) polyak_update(critics_.target[i], critics_.online[i], cfg_.tau);
  if (explorer_) polyak_update(explorer_->target(), explorer_->online(), cfg_.tau);
  return true;
}

LearningRecord train_loop(const SystemConfig& sys, const AgentConfig& cfg, std::uint64_t seed,
                          std::int64_t steps, const std::optional<ChannelSet>& channels,
                          const ProgressFn& progress, const FinishFn& finish) {
  if (steps <= 0) throw DomainError("train_loop: steps must be positive");
  RunStreams streams(seed);
  Environment env(sys);
  EnvObservation obs = channels ? env.reset(*channels) : env.reset(streams.channels);
  Agent agent(sys, cfg, streams);
  LambdaSchedule schedule(cfg.lambda0, steps);

  LearningRecord record;
  record.seed = seed;
  record.steps.reserve(static_cast<std::size_t>(steps));

  Vector state = to_vector(obs.state);
  for (std::int64_t t = 0; t < steps; ++t) {
    const double lambda = cfg.use_explorer ? schedule.step() : 0.0;
    const PolicySample ps = agent.policy().sample(Matrix(state), streams.acting);
    const Vector action = ps.actions.col(0);

    Vector executed = action;
    if (ExplorerNet* ex = agent.explorer()) {
      const Matrix factors = perturbation_factors(ex->predict(Matrix(state)), lambda, cfg.perturb_mode);
      executed = action.cwiseProduct(factors.col(0));
      const std::vector<double> scale = element_scale(factors.col(0), sys.beamformer_dim());
      obs = env.step({executed.data(), static_cast<std::size_t>(executed.size())}, scale);
    } else {
      obs = env.step({executed.data(), static_cast<std::size_t>(executed.size())});
    }

    agent.rewards().record(obs.reward);
    Vector next_state = to_vector(obs.state);
    agent.buffer().push({state, action, executed, obs.reward, next_state});
    agent.update(lambda, streams);

    const StepRecord rec{obs.true_sum_rate, obs.reward, lambda, agent.alpha()};
    record.steps.push_back(rec);
    if (progress) progress(t, rec);
    state = std::move(next_state);
  }
  if (finish) finish(agent);
  return record;
}

}  // namespace rislab
