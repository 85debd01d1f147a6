#include "rislab/sac.hpp"

#include <cmath>
#include <numbers>
#include <utility>

namespace rislab {

namespace {

std::vector<Eigen::Index> with_ends(Eigen::Index in, std::vector<Eigen::Index> hidden,
                                    Eigen::Index out) {
  std::vector<Eigen::Index> sizes{in};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  return sizes;
}

Matrix standard_normal(Eigen::Index rows, Eigen::Index cols, SeededRng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = rng.normal();
  }
  return m;
}

/// Factors applied to actions at `states`, or an empty matrix when there is no
/// explorer.
Matrix factors_for(const Perturbation* p, const Matrix& states, bool use_target) {
  if (p == nullptr || p->explorer == nullptr) return {};
  const Matrix xi = use_target ? p->explorer->predict_target(states) : p->explorer->predict(states);
  return perturbation_factors(xi, p->lambda, p->mode);
}

}  // namespace

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw DomainError("ReplayBuffer: capacity must be positive");
  items_.reserve(capacity);
}

void ReplayBuffer::push(Transition t) {
  if (items_.size() < capacity_) {
    items_.push_back(std::move(t));
  } else {
    items_[next_] = std::move(t);
  }
  next_ = (next_ + 1) % capacity_;
  ++inserted_;
}

Batch ReplayBuffer::sample(std::size_t n, SeededRng& rng) const {
  if (items_.empty()) throw std::logic_error("ReplayBuffer::sample on empty buffer");
  const auto& first = items_.front();
  const auto cols = static_cast<Eigen::Index>(n);
  Batch b;
  b.states.resize(first.state.size(), cols);
  b.actions.resize(first.action.size(), cols);
  b.executed.resize(first.executed.size(), cols);
  b.rewards.resize(cols);
  b.next_states.resize(first.next_state.size(), cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    const Transition& t = items_[rng.index(items_.size())];
    b.states.col(c) = t.state;
    b.actions.col(c) = t.action;
    b.executed.col(c) = t.executed;
    b.rewards(c) = t.reward;
    b.next_states.col(c) = t.next_state;
  }
  return b;
}

GaussianPolicy::GaussianPolicy(Eigen::Index state_dim, Eigen::Index action_dim,
                               std::vector<Eigen::Index> hidden, SeededRng& rng)
    : net_(with_ends(state_dim, std::move(hidden), 2 * action_dim), OutputActivation::kLinear,
           rng) {}

GaussianPolicy::GaussianPolicy(Mlp trunk) : net_(std::move(trunk)) {
  if (net_.output_size() % 2 != 0 || net_.head() != OutputActivation::kLinear) {
    throw ShapeError("GaussianPolicy: trunk needs a linear head of even width");
  }
}

PolicySample GaussianPolicy::sample(const Matrix& states, SeededRng& rng) const {
  return sample_with_noise(states, standard_normal(action_dim(), states.cols(), rng));
}

PolicySample GaussianPolicy::sample_with_noise(const Matrix& states, const Matrix& noise) const {
  const Eigen::Index d = action_dim();
  if (noise.rows() != d || noise.cols() != states.cols()) {
    throw ShapeError("GaussianPolicy: noise shape mismatch");
  }
  PolicySample s;
  s.trace = net_.forward_trace(states);
  const Matrix& out = s.trace.activations.back();
  s.noise = noise;
  s.mean = out.topRows(d).array().tanh().matrix();
  s.log_std_raw = out.bottomRows(d);
  s.log_std = s.log_std_raw.cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
  const Matrix u = s.mean + s.log_std.array().exp().matrix().cwiseProduct(noise);
  s.actions = u.array().tanh().matrix();

  const double half_log_two_pi = 0.5 * std::log(2.0 * std::numbers::pi);
  const Eigen::ArrayXXd gauss = -0.5 * noise.array().square() - s.log_std.array() - half_log_two_pi;
  const Eigen::ArrayXXd squash = (1.0 - s.actions.array().square() + kSquashEpsilon).log();
  s.log_probs = (gauss - squash).colwise().sum().transpose();
  return s;
}

Gradients GaussianPolicy::backward(const PolicySample& s, const Matrix& grad_actions,
                                   const Vector& grad_log_probs) const {
  const Eigen::Index d = action_dim();
  const Eigen::ArrayXXd a = s.actions.array();
  const Eigen::ArrayXXd one_minus_a2 = 1.0 - a.square();
  const Eigen::ArrayXXd g_logp = grad_log_probs.transpose().replicate(d, 1).array();

  // a = tanh(u), u = mean + std * eps.
  const Eigen::ArrayXXd d_u = grad_actions.array() * one_minus_a2 +
                              g_logp * 2.0 * a * one_minus_a2 / (one_minus_a2 + kSquashEpsilon);
  const Eigen::ArrayXXd d_log_std = d_u * s.log_std.array().exp() * s.noise.array() - g_logp;
  const Eigen::ArrayXXd in_clip =
      ((s.log_std_raw.array() >= kLogStdMin) && (s.log_std_raw.array() <= kLogStdMax))
          .cast<double>();

  Matrix upstream(2 * d, s.actions.cols());
  upstream.topRows(d) = (d_u * (1.0 - s.mean.array().square())).matrix();
  upstream.bottomRows(d) = (d_log_std * in_clip).matrix();
  return net_.parameter_gradient(s.trace, upstream);
}

Matrix stack_input(const Matrix& states, const Matrix& actions) {
  if (states.cols() != actions.cols()) throw ShapeError("stack_input: batch size mismatch");
  Matrix x(states.rows() + actions.rows(), states.cols());
  x.topRows(states.rows()) = states;
  x.bottomRows(actions.rows()) = actions;
  return x;
}

namespace {

std::pair<Mlp, Mlp> make_critic_pair(Eigen::Index input, const std::vector<Eigen::Index>& hidden,
                                     SeededRng& rng) {
  // Sequenced explicitly: both constructions draw from rng.
  Mlp q1(with_ends(input, hidden, 1), OutputActivation::kLinear, rng);
  Mlp q2(with_ends(input, hidden, 1), OutputActivation::kLinear, rng);
  return {std::move(q1), std::move(q2)};
}

}  // namespace

TwinCritics::TwinCritics(Eigen::Index sd, Eigen::Index action_dim,
                         std::vector<Eigen::Index> hidden, AdamConfig adam, SeededRng& rng)
    : TwinCritics(make_critic_pair(sd + action_dim, hidden, rng), adam) {
  state_dim = sd;
}

TwinCritics::TwinCritics(std::pair<Mlp, Mlp> pair, AdamConfig adam)
    : TwinCritics(std::move(pair.first), std::move(pair.second), adam) {}

TwinCritics::TwinCritics(Mlp q1, Mlp q2, AdamConfig adam)
    : state_dim(0),
      online{std::move(q1), std::move(q2)},
      target{online[0], online[1]},
      opt{OptimState(online[0], adam), OptimState(online[1], adam)} {
  if (!online[0].same_architecture(online[1]) || online[0].output_size() != 1) {
    throw ShapeError("TwinCritics: critics must share a scalar-output architecture");
  }
}

Vector TwinCritics::min_q(const Matrix& states, const Matrix& actions, bool use_target) const {
  const Matrix x = stack_input(states, actions);
  const Mlp* nets = use_target ? target : online;
  const Vector q1 = nets[0].forward(x).row(0).transpose();
  const Vector q2 = nets[1].forward(x).row(0).transpose();
  return q1.cwiseMin(q2);
}

void RewardTracker::record(double r) {
  sum_ += r;
  ++count_;
}

double RewardTracker::adjust(double r) {
  const double adjusted = r - mean();
  record(r);
  return adjusted;
}

EntropyTuner::EntropyTuner(double initial_alpha, double target_entropy, AdamConfig adam)
    : log_alpha_(std::log(initial_alpha)), target_entropy_(target_entropy), opt_(adam) {
  if (!(initial_alpha > 0.0)) throw DomainError("EntropyTuner: initial alpha must be positive");
}

double EntropyTuner::alpha() const { return std::exp(log_alpha_); }

double EntropyTuner::update(const Vector& log_probs) {
  const double a = alpha();
  const double c = (log_probs.array() + target_entropy_).mean();
  const double loss = -a * c;
  opt_.step(log_alpha_, -a * c, Direction::kDescend);
  return loss;
}

Vector critic_targets(const Batch& batch, const TwinCritics& critics, const GaussianPolicy& policy,
                      double alpha, double reward_mean, const Perturbation* perturbation,
                      SeededRng& rng, double discount) {
  const PolicySample next = policy.sample(batch.next_states, rng);
  Matrix next_actions = next.actions;
  const Matrix f = factors_for(perturbation, batch.next_states, true);
  if (f.size() != 0) next_actions = next_actions.cwiseProduct(f);
  const Vector q = critics.min_q(batch.next_states, next_actions, true);
  return (batch.rewards.array() - reward_mean +
          discount * (q.array() - alpha * next.log_probs.array()))
      .matrix();
}

CriticStep critic_update(const Batch& batch, TwinCritics& critics, const GaussianPolicy& policy,
                         double alpha, double reward_mean, const Perturbation* perturbation,
                         SeededRng& rng, double discount) {
  CriticStep out;
  out.targets =
      critic_targets(batch, critics, policy, alpha, reward_mean, perturbation, rng, discount);
  const Matrix x = stack_input(batch.states, batch.executed);
  const double n = static_cast<double>(batch.size());
  for (int i = 0; i < 2; ++i) {
    const MlpTrace t = critics.online[i].forward_trace(x);
    const Matrix diff = t.activations.back() - out.targets.transpose();
    out.loss[i] = diff.squaredNorm() / n;
    const Gradients g = critics.online[i].parameter_gradient(t, (2.0 / n) * diff);
    adam_step(critics.opt[i], critics.online[i], g, Direction::kDescend);
  }
  return out;
}

namespace {

struct ActorPass {
  double loss = 0.0;
  Vector log_probs;
  Gradients grads;
};

ActorPass actor_pass(const Matrix& states, const Matrix& noise, const GaussianPolicy& policy,
                     const TwinCritics& critics, double alpha, const Perturbation* perturbation,
                     bool want_grads) {
  const PolicySample ps = policy.sample_with_noise(states, noise);
  const Matrix f = factors_for(perturbation, states, false);
  const Matrix evaluated = f.size() != 0 ? Matrix(ps.actions.cwiseProduct(f)) : ps.actions;
  const Matrix x = stack_input(states, evaluated);
  const MlpTrace t1 = critics.online[0].forward_trace(x);
  const MlpTrace t2 = critics.online[1].forward_trace(x);
  const auto& q1 = t1.activations.back();
  const auto& q2 = t2.activations.back();
  const Eigen::Index n = states.cols();
  const double inv_n = 1.0 / static_cast<double>(n);

  ActorPass out;
  out.log_probs = ps.log_probs;
  Matrix up1 = Matrix::Zero(1, n);
  Matrix up2 = Matrix::Zero(1, n);
  double loss = 0.0;
  for (Eigen::Index c = 0; c < n; ++c) {
    const bool first = q1(0, c) <= q2(0, c);
    loss += alpha * ps.log_probs(c) - (first ? q1(0, c) : q2(0, c));
    (first ? up1 : up2)(0, c) = -inv_n;
  }
  out.loss = loss * inv_n;
  if (!want_grads) return out;

  const Eigen::Index ad = ps.actions.rows();
  Matrix grad_actions = critics.online[0].input_gradient(t1, up1).bottomRows(ad) +
                        critics.online[1].input_gradient(t2, up2).bottomRows(ad);
  if (f.size() != 0) grad_actions = grad_actions.cwiseProduct(f);
  const Vector grad_logp = Vector::Constant(n, alpha * inv_n);
  out.grads = policy.backward(ps, grad_actions, grad_logp);
  return out;
}

}  // namespace

double actor_loss(const Matrix& states, const Matrix& noise, const GaussianPolicy& policy,
                  const TwinCritics& critics, double alpha, const Perturbation* perturbation) {
  return actor_pass(states, noise, policy, critics, alpha, perturbation, false).loss;
}

Gradients actor_gradient(const Matrix& states, const Matrix& noise, const GaussianPolicy& policy,
                         const TwinCritics& critics, double alpha,
                         const Perturbation* perturbation, Vector* log_probs) {
  ActorPass p = actor_pass(states, noise, policy, critics, alpha, perturbation, true);
  if (log_probs != nullptr) *log_probs = std::move(p.log_probs);
  return std::move(p.grads);
}

ActorStep actor_update(const Batch& batch, GaussianPolicy& policy, OptimState& opt,
                       const TwinCritics& critics, double alpha, const Perturbation* perturbation,
                       SeededRng& rng) {
  const Matrix noise = standard_normal(policy.action_dim(), batch.size(), rng);
  ActorPass p = actor_pass(batch.states, noise, policy, critics, alpha, perturbation, true);
  adam_step(opt, policy.net(), p.grads, Direction::kDescend);
  return {p.loss, std::move(p.log_probs)};
}

}  // namespace rislab
