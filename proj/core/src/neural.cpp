#include "rislab/neural.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace rislab {

namespace {

constexpr const char* kCheckpointMagic = "rislab-mlp";
constexpr int kCheckpointVersion = 1;

bool finite(const Matrix& m) { return m.allFinite(); }

std::vector<DenseLayer> zero_like(const std::vector<DenseLayer>& layers) {
  std::vector<DenseLayer> out;
  out.reserve(layers.size());
  for (const auto& l : layers) {
    out.push_back({Matrix::Zero(l.weight.rows(), l.weight.cols()), Vector::Zero(l.bias.size())});
  }
  return out;
}

void check_sizes(const std::vector<Eigen::Index>& sizes) {
  if (sizes.size() < 2) throw ShapeError("Mlp: need at least input and output sizes");
  for (auto s : sizes) {
    if (s <= 0) throw DomainError("Mlp: layer sizes must be positive");
  }
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

bool Gradients::all_finite() const {
  for (const auto& p : params) {
    if (!finite(p.weight) || !p.bias.allFinite()) return false;
  }
  return input.size() == 0 || finite(input);
}

Matrix xavier_init(Eigen::Index rows, Eigen::Index cols, SeededRng& rng) {
  if (rows <= 0 || cols <= 0) throw DomainError("xavier_init: zero dimension");
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Matrix w(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) w(r, c) = rng.uniform(-bound, bound);
  }
  return w;
}

Mlp::Mlp(std::vector<Eigen::Index> sizes, OutputActivation head)
    : sizes_(std::move(sizes)), head_(head) {
  check_sizes(sizes_);
}

Mlp::Mlp(std::vector<Eigen::Index> sizes, OutputActivation head, SeededRng& rng)
    : Mlp(std::move(sizes), head) {
  for (std::size_t i = 0; i + 1 < sizes_.size(); ++i) {
    const Eigen::Index fan_in = sizes_[i];
    const Eigen::Index fan_out = sizes_[i + 1];
    layers_.push_back({xavier_init(fan_out, fan_in, rng), Vector::Zero(fan_out)});
  }
}

Mlp Mlp::zeros(std::vector<Eigen::Index> sizes, OutputActivation head) {
  Mlp net(std::move(sizes), head);
  for (std::size_t i = 0; i + 1 < net.sizes_.size(); ++i) {
    net.layers_.push_back({Matrix::Zero(net.sizes_[i + 1], net.sizes_[i]),
                           Vector::Zero(net.sizes_[i + 1])});
  }
  return net;
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

bool Mlp::same_architecture(const Mlp& other) const {
  return sizes_ == other.sizes_ && head_ == other.head_;
}

bool Mlp::all_finite() const {
  for (const auto& l : layers_) {
    if (!finite(l.weight) || !l.bias.allFinite()) return false;
  }
  return true;
}

void Mlp::check_input(const Matrix& x) const {
  if (x.rows() != input_size()) {
    throw ShapeError("Mlp: input has " + std::to_string(x.rows()) + " rows, expected " +
                     std::to_string(input_size()));
  }
}

Matrix Mlp::forward(const Matrix& x) const {
  check_input(x);
  Matrix a = x;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    Matrix z = layers_[i].weight * a;
    z.colwise() += layers_[i].bias;
    if (i + 1 < layers_.size()) {
      a = z.cwiseMax(0.0);
    } else if (head_ == OutputActivation::kTanh) {
      a = z.array().tanh().matrix();
    } else {
      a = std::move(z);
    }
  }
  return a;
}

Vector Mlp::forward(const Vector& x) const {
  Matrix out = forward(Matrix(x));
  return out.col(0);
}

MlpTrace Mlp::forward_trace(const Matrix& x) const {
  check_input(x);
  MlpTrace trace;
  trace.activations.reserve(layers_.size() + 1);
  trace.activations.push_back(x);
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    Matrix z = layers_[i].weight * trace.activations.back();
    z.colwise() += layers_[i].bias;
    if (i + 1 < layers_.size()) {
      trace.activations.push_back(z.cwiseMax(0.0));
    } else if (head_ == OutputActivation::kTanh) {
      trace.activations.push_back(z.array().tanh().matrix());
    } else {
      trace.activations.push_back(std::move(z));
    }
  }
  return trace;
}

Gradients Mlp::backprop(const MlpTrace& trace, const Matrix& upstream, bool want_params,
                        bool want_input) const {
  if (trace.activations.size() != layers_.size() + 1) {
    throw ShapeError("Mlp::backward: trace does not belong to this network");
  }
  const Matrix& out = trace.activations.back();
  if (upstream.rows() != out.rows() || upstream.cols() != out.cols()) {
    throw ShapeError("Mlp::backward: upstream shape mismatch");
  }

  Gradients g;
  if (want_params) g.params.resize(layers_.size());

  Matrix delta = upstream;
  if (head_ == OutputActivation::kTanh) {
    delta.array() *= (1.0 - out.array().square());
  }
  for (std::size_t i = layers_.size(); i-- > 0;) {
    const Matrix& a_prev = trace.activations[i];
    if (want_params) {
      g.params[i].weight.noalias() = delta * a_prev.transpose();
      g.params[i].bias = delta.rowwise().sum();
    }
    if (i == 0 && !want_input) break;
    Matrix back = layers_[i].weight.transpose() * delta;
    if (i > 0) {
      // Rectifier derivative: pass where the hidden activation was positive.
      back.array() *= (a_prev.array() > 0.0).cast<double>();
    }
    delta = std::move(back);
  }
  if (want_input) g.input = std::move(delta);
  return g;
}

Gradients Mlp::backward(const MlpTrace& trace, const Matrix& upstream) const {
  return backprop(trace, upstream, true, true);
}

Matrix Mlp::input_gradient(const MlpTrace& trace, const Matrix& upstream) const {
  return backprop(trace, upstream, false, true).input;
}

Gradients Mlp::parameter_gradient(const MlpTrace& trace, const Matrix& upstream) const {
  return backprop(trace, upstream, true, false);
}

Gradients Mlp::backward(const Matrix& x, const Matrix& upstream) const {
  return backward(forward_trace(x), upstream);
}

OptimState::OptimState(const Mlp& net, AdamConfig config)
    : config_(config), first_(zero_like(net.layers())), second_(zero_like(net.layers())) {}

namespace {

// Moments below this are set to zero. A unit whose gradient stops (a dead
// rectifier) would otherwise decay its first moment into the subnormal range
// within a few thousand steps, where arithmetic is orders of magnitude slower.
// The step such a moment contributes is far below one ulp of any parameter.
constexpr double kMomentFloor = 1e-200;

// One fused pass over parameter, gradient and both moments.
void adam_apply(double* param, const double* grad, double* m, double* v, Eigen::Index n,
                const AdamConfig& c, double corr1, double corr2, double sign) {
  const double b1 = c.beta1, b2 = c.beta2, lr = c.learning_rate, eps = c.epsilon;
  const double inv1 = 1.0 / corr1, inv2 = 1.0 / corr2;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double g = grad[i];
    double mi = b1 * m[i] + (1.0 - b1) * (sign * g);
    double vi = b2 * v[i] + (1.0 - b2) * (g * g);
    if (std::abs(mi) < kMomentFloor) mi = 0.0;
    if (vi < kMomentFloor) vi = 0.0;
    m[i] = mi;
    v[i] = vi;
    param[i] -= lr * (mi * inv1) / (std::sqrt(vi * inv2) + eps);
  }
}

}  // namespace

void adam_step(OptimState& opt, Mlp& net, const Gradients& grads, Direction direction) {
  auto& layers = net.layers();
  if (grads.params.size() != layers.size() || opt.first_.size() != layers.size()) {
    throw ShapeError("adam_step: gradient/optimizer shape mismatch");
  }
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (grads.params[i].weight.rows() != layers[i].weight.rows() ||
        grads.params[i].weight.cols() != layers[i].weight.cols() ||
        grads.params[i].bias.size() != layers[i].bias.size()) {
      throw ShapeError("adam_step: gradient shape mismatch in layer " + std::to_string(i));
    }
    if (!finite(grads.params[i].weight) || !grads.params[i].bias.allFinite()) {
      throw DomainError("adam_step: non-finite gradient rejected");
    }
  }

  ++opt.step_;
  const auto& c = opt.config_;
  const double t = static_cast<double>(opt.step_);
  const double corr1 = 1.0 - std::pow(c.beta1, t);
  const double corr2 = 1.0 - std::pow(c.beta2, t);
  // Ascent is descent on the negated gradient; v only sees g^2.
  const double sign = direction == Direction::kAscend ? -1.0 : 1.0;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    adam_apply(layers[i].weight.data(), grads.params[i].weight.data(), opt.first_[i].weight.data(),
               opt.second_[i].weight.data(), layers[i].weight.size(), c, corr1, corr2, sign);
    adam_apply(layers[i].bias.data(), grads.params[i].bias.data(), opt.first_[i].bias.data(),
               opt.second_[i].bias.data(), layers[i].bias.size(), c, corr1, corr2, sign);
  }
}

void ScalarAdam::step(double& param, double grad, Direction direction) {
  if (!std::isfinite(grad)) throw DomainError("ScalarAdam: non-finite gradient rejected");
  ++step_;
  const double g = direction == Direction::kAscend ? -grad : grad;
  const double t = static_cast<double>(step_);
  first_ = config_.beta1 * first_ + (1.0 - config_.beta1) * g;
  second_ = config_.beta2 * second_ + (1.0 - config_.beta2) * g * g;
  const double mhat = first_ / (1.0 - std::pow(config_.beta1, t));
  const double vhat = second_ / (1.0 - std::pow(config_.beta2, t));
  param -= config_.learning_rate * mhat / (std::sqrt(vhat) + config_.epsilon);
}

void polyak_update(Mlp& target, const Mlp& online, double tau) {
  if (!target.same_architecture(online)) throw ShapeError("polyak_update: architecture mismatch");
  if (!(tau > 0.0 && tau <= 1.0)) throw DomainError("polyak_update: tau must lie in (0, 1]");
  auto& t = target.layers();
  const auto& o = online.layers();
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i].weight.array() = (1.0 - tau) * t[i].weight.array() + tau * o[i].weight.array();
    t[i].bias.array() = (1.0 - tau) * t[i].bias.array() + tau * o[i].bias.array();
  }
}

void save_mlp(std::ostream& out, const Mlp& net) {
  out << kCheckpointMagic << ' ' << kCheckpointVersion << '\n';
  out << "sizes";
  for (auto s : net.sizes()) out << ' ' << s;
  out << '\n';
  out << "head " << (net.head() == OutputActivation::kTanh ? "tanh" : "linear") << '\n';
  for (const auto& l : net.layers()) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) {
        out << format_double(l.weight(r, c)) << (c + 1 == l.weight.cols() ? '\n' : ' ');
      }
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) {
      out << format_double(l.bias(r)) << (r + 1 == l.bias.size() ? '\n' : ' ');
    }
  }
}

Mlp load_mlp(std::istream& in) {
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (!in || magic != kCheckpointMagic) throw std::runtime_error("load_mlp: not an mlp checkpoint");
  if (version != kCheckpointVersion) {
    throw std::runtime_error("load_mlp: unsupported version " + std::to_string(version));
  }
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  std::istringstream sizes_line(line);
  std::string key;
  sizes_line >> key;
  if (key != "sizes") throw std::runtime_error("load_mlp: expected sizes");
  std::vector<Eigen::Index> sizes;
  for (Eigen::Index s; sizes_line >> s;) sizes.push_back(s);
  std::string head;
  in >> key >> head;
  if (key != "head" || (head != "tanh" && head != "linear")) {
    throw std::runtime_error("load_mlp: expected head");
  }
  Mlp net = Mlp::zeros(sizes, head == "tanh" ? OutputActivation::kTanh : OutputActivation::kLinear);
  auto read = [&in]() {
    std::string tok;
    in >> tok;
    if (!in) throw std::runtime_error("load_mlp: truncated parameters");
    return std::stod(tok);
  };
  for (auto& l : net.layers()) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = read();
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias(r) = read();
  }
  return net;
}

}  // namespace rislab
