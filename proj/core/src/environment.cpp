#include "rislab/environment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rislab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

const std::vector<CMatrix>& observed_channels(const ChannelSet& ch, const SystemConfig& cfg) {
  return cfg.scenario == Scenario::kGolden ? ch.cascaded : ch.estimated;
}

const CVector& observed_phases(const DecodedAction& a, const SystemConfig& cfg) {
  return cfg.scenario == Scenario::kGolden ? a.true_phases : a.scaled_phases;
}

}  // namespace

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

void SystemConfig::validate() const {
  if (users == 0 || antennas == 0 || elements == 0) {
    throw DomainError("SystemConfig: K, M and L must be at least 1");
  }
  if (!(beta_min >= 0.0 && beta_min <= 1.0)) throw DomainError("SystemConfig: beta_min not in [0, 1]");
  if (!(kappa >= 0.0)) throw DomainError("SystemConfig: kappa must be >= 0");
  if (!(mu >= 0.0)) throw DomainError("SystemConfig: mu must be >= 0");
  if (!(noise_power > 0.0)) throw DomainError("SystemConfig: noise power must be > 0");
  if (!(error_variance >= 0.0)) throw DomainError("SystemConfig: error variance must be >= 0");
  if (!(power_watts() > 0.0) || !std::isfinite(power_watts())) {
    throw DomainError("SystemConfig: transmit power must be positive");
  }
}

double amplitude(double phase, const SystemConfig& cfg) {
  const double base = (std::sin(phase - cfg.mu) + 1.0) / 2.0;
  return (1.0 - cfg.beta_min) * std::pow(base, cfg.kappa) + cfg.beta_min;
}

void assemble_cascaded(ChannelSet& ch) {
  const std::size_t k_users = ch.ris_user.size();
  ch.cascaded.clear();
  ch.estimated.clear();
  if (ch.errors.size() != k_users) throw ShapeError("assemble_cascaded: error count mismatch");
  for (std::size_t k = 0; k < k_users; ++k) {
    ch.cascaded.push_back(diag_times(ch.ris_user[k], ch.bs_ris));
    ch.estimated.push_back(ch.cascaded[k] + ch.errors[k]);
  }
}

ChannelSet generate_channels(const SystemConfig& cfg, SeededRng& rng) {
  cfg.validate();
  const std::size_t L = cfg.elements;
  const std::size_t M = cfg.antennas;
  ChannelSet ch;
  ch.bs_ris = CMatrix(L, M);
  const CVector h = sample_cn(rng, 1.0, L * M);
  std::copy(h.begin(), h.end(), ch.bs_ris.data().begin());
  for (std::size_t k = 0; k < cfg.users; ++k) ch.ris_user.push_back(sample_cn(rng, 1.0, L));
  for (std::size_t k = 0; k < cfg.users; ++k) {
    CMatrix e(L, M);
    const CVector draw = sample_cn(rng, cfg.error_variance, L * M);
    if (cfg.scenario == Scenario::kMismatch) std::copy(draw.begin(), draw.end(), e.data().begin());
    ch.errors.push_back(std::move(e));
  }
  assemble_cascaded(ch);
  return ch;
}

DecodedAction decode_action(std::span<const double> raw, const SystemConfig& cfg,
                            std::span<const double> element_scale) {
  const std::size_t M = cfg.antennas;
  const std::size_t K = cfg.users;
  const std::size_t L = cfg.elements;
  if (raw.size() != cfg.action_dim()) {
    throw ShapeError("decode_action: raw action has length " + std::to_string(raw.size()) +
                     ", expected " + std::to_string(cfg.action_dim()));
  }
  if (!element_scale.empty() && element_scale.size() != L) {
    throw ShapeError("decode_action: element scale must have length L");
  }

  DecodedAction out;
  out.beamformer = CMatrix(M, K);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t m = 0; m < M; ++m) {
      const std::size_t i = 2 * (k * M + m);
      out.beamformer(m, k) = cdouble{raw[i], raw[i + 1]};
    }
  }
  const double power = trace_gram(out.beamformer);
  if (power > 0.0) out.beamformer *= std::sqrt(cfg.power_watts() / power);

  out.phases.resize(L);
  out.unit_phases.resize(L);
  out.true_phases.resize(L);
  out.scaled_phases.resize(L);
  const std::size_t offset = cfg.beamformer_dim();
  for (std::size_t l = 0; l < L; ++l) {
    const cdouble z{raw[offset + 2 * l], raw[offset + 2 * l + 1]};
    const double mod = std::abs(z);
    const cdouble unit = mod > 0.0 ? z / mod : cdouble{1.0, 0.0};
    double phase = std::arg(unit);
    if (phase < 0.0) phase += kTwoPi;
    if (phase >= kTwoPi) phase -= kTwoPi;
    out.phases[l] = phase;
    out.unit_phases[l] = unit;
    out.true_phases[l] = amplitude(phase, cfg) * unit;
    out.scaled_phases[l] = element_scale.empty() ? unit : element_scale[l] * unit;
  }
  return out;
}

std::vector<double> initial_raw_action(const SystemConfig& cfg) {
  std::vector<double> raw(cfg.action_dim(), 0.0);
  const std::size_t M = cfg.antennas;
  const std::size_t n = std::min(M, cfg.users);
  const double scale = std::sqrt(cfg.power_watts() / static_cast<double>(n));
  for (std::size_t k = 0; k < n; ++k) raw[2 * (k * M + k)] = scale;
  for (std::size_t l = 0; l < cfg.elements; ++l) raw[cfg.beamformer_dim() + 2 * l] = 1.0;
  return raw;
}

std::vector<double> received_powers(std::span<const cdouble> phi,
                                    std::span<const CMatrix> channels, const CMatrix& beamformer) {
  std::vector<double> p;
  p.reserve(channels.size());
  for (const auto& d : channels) p.push_back(sq_norm(row_vec_mat(row_vec_mat(phi, d), beamformer)));
  return p;
}

double sum_rate(std::span<const cdouble> phi, std::span<const CMatrix> channels,
                const CMatrix& beamformer, double noise_power, LogBase base) {
  if (!(noise_power > 0.0)) throw DomainError("sum_rate: noise power must be > 0");
  const std::vector<double> p = received_powers(phi, channels, beamformer);
  double total = 0.0;
  for (double x : p) total += x;
  double rate = 0.0;
  for (double pk : p) {
    const double interference = total - pk;
    rate += std::log1p(pk / (std::max(interference, 0.0) + noise_power));
  }
  return base == LogBase::kTwo ? rate / std::numbers::ln2 : rate;
}

std::vector<double> build_state(const ChannelSet& channels, const DecodedAction& action,
                                std::span<const double> raw_action, const SystemConfig& cfg) {
  const std::size_t K = cfg.users;
  std::vector<double> s;
  s.reserve(cfg.state_dim());
  for (std::size_t k = 0; k < K; ++k) {
    double col = 0.0;
    for (std::size_t m = 0; m < cfg.antennas; ++m) col += std::norm(action.beamformer(m, k));
    s.push_back(col);
  }
  const auto& view = observed_channels(channels, cfg);
  const auto rx = received_powers(observed_phases(action, cfg), view, action.beamformer);
  s.insert(s.end(), rx.begin(), rx.end());
  s.insert(s.end(), raw_action.begin(), raw_action.end());
  for (const auto& d : view) {
    for (const auto& x : d.data()) {
      s.push_back(x.real());
      s.push_back(x.imag());
    }
  }
  if (s.size() != cfg.state_dim()) throw ShapeError("build_state: inconsistent dimensions");
  return s;
}

double WhitenStats::variance(std::size_t i) const {
  return count_ == 0 ? 0.0 : m2_[i] / static_cast<double>(count_);
}

void WhitenStats::observe(std::span<const double> x) {
  if (x.size() != mean_.size()) throw ShapeError("WhitenStats: dimension mismatch");
  ++count_;
  const double n = static_cast<double>(count_);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double delta = x[i] - mean_[i];
    mean_[i] += delta / n;
    m2_[i] += delta * (x[i] - mean_[i]);
  }
}

std::vector<double> whiten(std::span<const double> raw, WhitenStats& stats) {
  stats.observe(raw);
  std::vector<double> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    out[i] = (raw[i] - stats.mean()[i]) / std::sqrt(stats.variance(i) + WhitenStats::kEpsilon);
  }
  return out;
}

Environment::Environment(SystemConfig cfg) : cfg_(cfg) { cfg_.validate(); }

EnvObservation Environment::reset(SeededRng& rng) { return reset(generate_channels(cfg_, rng)); }

EnvObservation Environment::reset(ChannelSet channels) {
  if (channels.ris_user.size() != cfg_.users || channels.bs_ris.rows() != cfg_.elements ||
      channels.bs_ris.cols() != cfg_.antennas) {
    throw ShapeError("Environment::reset: channel set does not match configuration");
  }
  channels_ = std::move(channels);
  whiten_ = WhitenStats(cfg_.state_dim());
  ready_ = true;
  const auto raw = initial_raw_action(cfg_);
  return observe(decode_action(raw, cfg_), raw);
}

EnvObservation Environment::step(std::span<const double> raw_action,
                                 std::span<const double> element_scale) {
  if (!ready_) throw std::logic_error("Environment::step called before reset");
  return observe(decode_action(raw_action, cfg_, element_scale), raw_action);
}

EnvObservation Environment::observe(const DecodedAction& action,
                                    std::span<const double> raw_action) {
  EnvObservation obs;
  obs.true_sum_rate = sum_rate(action.true_phases, channels_.cascaded, action.beamformer,
                               cfg_.noise_power, cfg_.log_base);
  if (cfg_.scenario == Scenario::kGolden) {
    obs.reward = obs.true_sum_rate;
  } else {
    obs.reward = sum_rate(action.scaled_phases, channels_.estimated, action.beamformer,
                          cfg_.noise_power, cfg_.log_base);
  }
  obs.raw_state = build_state(channels_, action, raw_action, cfg_);
  obs.state = whiten(obs.raw_state, whiten_);
  return obs;
}

}  // namespace rislab
