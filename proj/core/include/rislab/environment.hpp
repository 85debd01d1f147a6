#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "rislab/numerics.hpp"
#include "rislab/rng.hpp"

namespace rislab {

/// Which model of the world the agent trains against.
enum class Scenario {
  kGolden,    // true amplitude model, perfect cascaded channels
  kMismatch,  // ideal unit-modulus reflections, noisy channel estimates
};

enum class LogBase { kTwo, kNatural };

double dbm_to_watts(double dbm);

struct SystemConfig {
  std::size_t users = 4;         // K
  std::size_t antennas = 4;      // M
  std::size_t elements = 16;     // L
  double power_dbm = 30.0;       // P_t
  double noise_power = 1e-2;     // sigma_w^2, linear
  double error_variance = 1e-2;  // sigma_e^2, linear
  double beta_min = 0.3;
  double mu = 0.0;     // radians
  double kappa = 1.5;
  Scenario scenario = Scenario::kGolden;
  LogBase log_base = LogBase::kTwo;

  double power_watts() const { return dbm_to_watts(power_dbm); }
  std::size_t action_dim() const { return 2 * antennas * users + 2 * elements; }
  std::size_t beamformer_dim() const { return 2 * antennas * users; }
  std::size_t state_dim() const {
    return 2 * users * elements * antennas + action_dim() + 2 * users;
  }

  /// Throws DomainError when any invariant is violated.
  void validate() const;
};

/// Phase-dependent reflection amplitude beta(phase) in [beta_min, 1].
double amplitude(double phase, const SystemConfig& cfg);

/// One channel realisation. D[k] = diag(h[k]) * H and D_hat[k] = D[k] + E[k].
struct ChannelSet {
  CMatrix bs_ris;                 // H, L x M
  std::vector<CVector> ris_user;  // h_k, length L each
  std::vector<CMatrix> cascaded;  // D_k, L x M
  std::vector<CMatrix> errors;    // E_k, L x M
  std::vector<CMatrix> estimated; // D_hat_k, L x M

  friend bool operator==(const ChannelSet&, const ChannelSet&) = default;
};

/// Draws H and h_k from CN(0, 1) and E_k from CN(0, sigma_e^2). The error
/// draw always happens so that golden and mismatch runs on the same seed see
/// identical H and h_k; under the golden scenario E_k is then zeroed.
ChannelSet generate_channels(const SystemConfig& cfg, SeededRng& rng);

/// Rebuilds cascaded and estimated channels from H, h_k and E_k.
void assemble_cascaded(ChannelSet& channels);

void write_channels(std::ostream& out, const ChannelSet& channels);
ChannelSet read_channels(std::istream& in);

struct DecodedAction {
  CMatrix beamformer;         // G, M x K
  std::vector<double> phases; // varphi_l in [0, 2pi)
  CVector unit_phases;        // phi_hat, unit modulus
  CVector true_phases;        // phi, entries beta(varphi_l) e^{j varphi_l}
  CVector scaled_phases;      // phi_beta_hat; equals unit_phases when unperturbed
};

/// Maps a raw action to a feasible configuration. Layout: the first 2MK reals
/// are (Re, Im) pairs of G with users as the outer index, the last 2L reals are
/// (Re, Im) pairs per RIS element. `element_scale`, when given, holds the
/// per-element modulus applied by the explorer (length L).
DecodedAction decode_action(std::span<const double> raw, const SystemConfig& cfg,
                            std::span<const double> element_scale = {});

/// Raw vector of the reset action: G = first min(M, K) identity columns scaled
/// to the power budget, unit phases of 1 + 0j.
std::vector<double> initial_raw_action(const SystemConfig& cfg);

/// sum_k log(1 + |phi^T D_k G|^2 / (sum_{j != k} |phi^T D_j G|^2 + noise)).
double sum_rate(std::span<const cdouble> phi, std::span<const CMatrix> channels,
                const CMatrix& beamformer, double noise_power, LogBase base);

/// Per-user received power |phi^T D_k G|^2.
std::vector<double> received_powers(std::span<const cdouble> phi,
                                    std::span<const CMatrix> channels, const CMatrix& beamformer);

/// Raw state: K transmit powers, K receive powers, previous raw action, then
/// (Re, Im) of every channel matrix the agent observes, k-major then row-major.
std::vector<double> build_state(const ChannelSet& channels, const DecodedAction& action,
                                std::span<const double> raw_action, const SystemConfig& cfg);

/// Per-dimension running standardisation (Welford, population variance).
class WhitenStats {
 public:
  static constexpr double kEpsilon = 1e-8;

  WhitenStats() = default;
  explicit WhitenStats(std::size_t dim) : mean_(dim, 0.0), m2_(dim, 0.0) {}

  std::size_t dim() const { return mean_.size(); }
  std::size_t count() const { return count_; }
  std::span<const double> mean() const { return mean_; }
  double variance(std::size_t i) const;

  void observe(std::span<const double> x);

 private:
  std::vector<double> mean_;
  std::vector<double> m2_;
  std::size_t count_ = 0;
};

/// Folds `raw` into the statistics, then returns (x - mean) / sqrt(var + eps).
std::vector<double> whiten(std::span<const double> raw, WhitenStats& stats);

struct EnvObservation {
  std::vector<double> state;      // whitened
  std::vector<double> raw_state;
  double reward = 0.0;            // training reward under the scenario
  double true_sum_rate = 0.0;     // diagnostic R_sigma with the true model
};

class Environment {
 public:
  explicit Environment(SystemConfig cfg);

  const SystemConfig& config() const { return cfg_; }
  const ChannelSet& channels() const { return channels_; }
  bool ready() const { return ready_; }

  /// Draws a fresh channel realisation and returns the initial state.
  EnvObservation reset(SeededRng& rng);

  /// Starts from a previously recorded channel realisation.
  EnvObservation reset(ChannelSet channels);

  /// Executes `raw_action`. With `element_scale` the mismatch reward uses the
  /// explorer-scaled reflection vector.
  EnvObservation step(std::span<const double> raw_action,
                      std::span<const double> element_scale = {});

 private:
  EnvObservation observe(const DecodedAction& action, std::span<const double> raw_action);

  SystemConfig cfg_;
  ChannelSet channels_;
  WhitenStats whiten_;
  bool ready_ = false;
};

}  // namespace rislab
