#include "rislab/explorer.hpp"

#include <algorithm>
#include <string>

#include "rislab/sac.hpp"

namespace rislab {

namespace {

std::vector<Eigen::Index> explorer_sizes(Eigen::Index state_dim, std::vector<Eigen::Index> hidden,
                                         std::size_t elements) {
  std::vector<Eigen::Index> sizes{state_dim};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(static_cast<Eigen::Index>(elements));
  return sizes;
}

void check_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw DomainError("perturbation: lambda " + std::to_string(lambda) + " outside [0, 1]");
  }
}

}  // namespace

ExplorerNet::ExplorerNet(Eigen::Index state_dim, std::size_t beamformer_dim, std::size_t elements,
                         std::vector<Eigen::Index> hidden, double beta_lo, AdamConfig adam,
                         SeededRng& rng)
    : ExplorerNet(Mlp(explorer_sizes(state_dim, std::move(hidden), elements),
                      OutputActivation::kTanh, rng),
                  beamformer_dim, beta_lo, adam) {}

ExplorerNet::ExplorerNet(Mlp net, std::size_t beamformer_dim, double beta_lo, AdamConfig adam)
    : beamformer_dim_(beamformer_dim),
      beta_lo_(beta_lo),
      online_(std::move(net)),
      target_(online_),
      opt_(online_, adam) {
  if (!(beta_lo >= 0.0 && beta_lo <= 1.0)) throw DomainError("ExplorerNet: beta_lo not in [0, 1]");
  if (online_.head() != OutputActivation::kTanh) {
    throw DomainError("ExplorerNet: network head must be tanh");
  }
}

Vector ExplorerNet::predict(const Vector& state) const {
  return predict(Matrix(state)).col(0);
}

Matrix ExplorerNet::assemble(const Matrix& tanh_out) const {
  const Eigen::Index L = tanh_out.rows();
  const auto prefix = static_cast<Eigen::Index>(beamformer_dim_);
  Matrix xi(prefix + 2 * L, tanh_out.cols());
  xi.topRows(prefix).setOnes();
  const double half_span = (1.0 - beta_lo_) / 2.0;
  for (Eigen::Index c = 0; c < tanh_out.cols(); ++c) {
    for (Eigen::Index l = 0; l < L; ++l) {
      const double beta = std::clamp(beta_lo_ + half_span * (tanh_out(l, c) + 1.0), beta_lo_, 1.0);
      xi(prefix + 2 * l, c) = beta;
      xi(prefix + 2 * l + 1, c) = beta;
    }
  }
  return xi;
}

Matrix ExplorerNet::assemble_backward(const Matrix& grad_xi) const {
  const Eigen::Index L = static_cast<Eigen::Index>(elements());
  const auto prefix = static_cast<Eigen::Index>(beamformer_dim_);
  const double half_span = (1.0 - beta_lo_) / 2.0;
  Matrix g(L, grad_xi.cols());
  for (Eigen::Index c = 0; c < grad_xi.cols(); ++c) {
    for (Eigen::Index l = 0; l < L; ++l) {
      g(l, c) = half_span * (grad_xi(prefix + 2 * l, c) + grad_xi(prefix + 2 * l + 1, c));
    }
  }
  return g;
}

Matrix perturbation_factors(const Matrix& xi, double lambda, PerturbMode mode) {
  check_lambda(lambda);
  if (mode == PerturbMode::kLiteral) return lambda * xi;
  return ((1.0 - lambda) + (lambda * xi).array()).matrix();
}

Matrix perturb(const Matrix& actions, const Matrix& xi, double lambda, PerturbMode mode) {
  if (actions.rows() != xi.rows() || actions.cols() != xi.cols()) {
    throw ShapeError("perturb: action and explorer output shapes differ");
  }
  return actions.cwiseProduct(perturbation_factors(xi, lambda, mode));
}

Vector perturb(const Vector& action, const Vector& xi, double lambda, PerturbMode mode) {
  return perturb(Matrix(action), Matrix(xi), lambda, mode).col(0);
}

std::vector<double> element_scale(const Vector& factors, std::size_t beamformer_dim) {
  const auto prefix = static_cast<Eigen::Index>(beamformer_dim);
  if (factors.size() < prefix || (factors.size() - prefix) % 2 != 0) {
    throw ShapeError("element_scale: factor vector has the wrong length");
  }
  std::vector<double> scale(static_cast<std::size_t>((factors.size() - prefix) / 2));
  for (std::size_t l = 0; l < scale.size(); ++l) {
    scale[l] = factors(prefix + 2 * static_cast<Eigen::Index>(l));
  }
  return scale;
}

LambdaSchedule::LambdaSchedule(double initial, std::int64_t total_steps)
    : initial_(initial), total_(total_steps) {
  if (!(initial >= 0.0 && initial <= 1.0)) throw DomainError("LambdaSchedule: lambda0 not in [0, 1]");
  if (total_steps <= 0) throw DomainError("LambdaSchedule: total steps must be positive");
}

double LambdaSchedule::current() const {
  const double frac = static_cast<double>(step_) / static_cast<double>(total_);
  return initial_ * std::max(0.0, 1.0 - frac);
}

double LambdaSchedule::step() {
  const double value = current();
  ++step_;
  return value;
}

namespace {

struct ExplorerPass {
  MlpTrace trace;
  Matrix xi;
  Matrix factors;
  Matrix perturbed;
};

ExplorerPass explorer_pass(const Matrix& states, const Matrix& actions, const ExplorerNet& explorer,
                           double lambda, PerturbMode mode) {
  ExplorerPass p;
  p.trace = explorer.online().forward_trace(states);
  p.xi = explorer.assemble(p.trace.activations.back());
  p.factors = perturbation_factors(p.xi, lambda, mode);
  p.perturbed = actions.cwiseProduct(p.factors);
  return p;
}

}  // namespace

double explorer_objective(const Matrix& states, const Matrix& actions, const Vector& targets,
                          const TwinCritics& critics, const ExplorerNet& explorer, double lambda,
                          PerturbMode mode) {
  const ExplorerPass p = explorer_pass(states, actions, explorer, lambda, mode);
  const Matrix input = stack_input(states, p.perturbed);
  const double n = static_cast<double>(states.cols());
  double j = 0.0;
  for (const auto& q : critics.online) {
    const Vector pred = q.forward(input).row(0).transpose();
    j += (targets - pred).squaredNorm() / n;
  }
  return j;
}

namespace {

Gradients explorer_gradient_and_objective(const Matrix& states, const Matrix& actions,
                                          const Vector& targets, const TwinCritics& critics,
                                          const ExplorerNet& explorer, double lambda,
                                          PerturbMode mode, double* objective) {
  const ExplorerPass p = explorer_pass(states, actions, explorer, lambda, mode);
  const Matrix input = stack_input(states, p.perturbed);
  const double n = static_cast<double>(states.cols());
  const Eigen::Index ad = actions.rows();

  double j = 0.0;
  Matrix grad_perturbed = Matrix::Zero(ad, states.cols());
  for (const auto& q : critics.online) {
    const MlpTrace qt = q.forward_trace(input);
    const Matrix& pred = qt.activations.back();
    const Matrix diff = pred - targets.transpose();
    j += diff.squaredNorm() / n;
    grad_perturbed += q.input_gradient(qt, (2.0 / n) * diff).bottomRows(ad);
  }
  if (objective != nullptr) *objective = j;
  // d perturbed / d xi = lambda * a in both modes.
  const Matrix grad_xi = lambda * grad_perturbed.cwiseProduct(actions);
  return explorer.online().parameter_gradient(p.trace, explorer.assemble_backward(grad_xi));
}

}  // namespace

Gradients explorer_gradient(const Matrix& states, const Matrix& actions, const Vector& targets,
                            const TwinCritics& critics, const ExplorerNet& explorer,
                            double lambda, PerturbMode mode) {
  return explorer_gradient_and_objective(states, actions, targets, critics, explorer, lambda, mode,
                                         nullptr);
}

double explorer_update(const Batch& batch, const Vector& targets, const TwinCritics& critics,
                       const GaussianPolicy& policy, ExplorerNet& explorer, double lambda,
                       PerturbMode mode, SeededRng& rng) {
  const PolicySample fresh = policy.sample(batch.states, rng);
  double j = 0.0;
  const Gradients g = explorer_gradient_and_objective(batch.states, fresh.actions, targets, critics,
                                                      explorer, lambda, mode, &j);
  adam_step(explorer.optimizer(), explorer.online(), g, Direction::kAscend);
  return j;
}

}  // namespace rislab
