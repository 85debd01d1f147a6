#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rislab/environment.hpp"
#include "rislab/training.hpp"

namespace rislab {

/// The three agents compared in every experiment.
enum class ExperimentScenario { kGolden, kMismatch, kBetaSpace };

/// Lower end of the explorer's amplitude range: the true beta_min, or 0 for
/// an agent that knows nothing about the hardware.
enum class BetaLoMode { kTrue, kZero };

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::string_view to_string(ExperimentScenario s);
ExperimentScenario parse_scenario(std::string_view text);
std::string_view to_string(PerturbMode m);
PerturbMode parse_perturb_mode(std::string_view text);
std::string_view to_string(BetaLoMode m);
BetaLoMode parse_beta_lo_mode(std::string_view text);
std::string_view to_string(LogBase b);
LogBase parse_log_base(std::string_view text);

inline constexpr ExperimentScenario kAllScenarios[] = {
    ExperimentScenario::kGolden, ExperimentScenario::kMismatch, ExperimentScenario::kBetaSpace};

struct ExperimentConfig {
  SystemConfig system;
  AgentConfig agent;
  ExperimentScenario scenario = ExperimentScenario::kGolden;
  BetaLoMode beta_lo_mode = BetaLoMode::kTrue;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::int64_t steps = 20000;
  std::filesystem::path output_dir = "results";
  std::vector<double> power_sweep_dbm{5, 10, 15, 20, 25, 30};
  std::size_t threads = 1;
  std::size_t last_window = 1000;
  std::size_t smooth_window = 25;

  /// Throws ConfigError when any field is out of range.
  void validate() const;

  /// Environment settings for one scenario (beta_space trains on the
  /// mismatch model).
  SystemConfig system_for(ExperimentScenario s) const;

  /// Learner settings for one scenario (explorer iff beta_space).
  AgentConfig agent_for(ExperimentScenario s) const;
};

/// Applies one `key = value` setting. Throws ConfigError on an unknown key or
/// a malformed value.
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// Reads flat `key = value` lines; blank lines and `#` comments are skipped.
void apply_config_text(ExperimentConfig& cfg, std::istream& in);
void apply_config_file(ExperimentConfig& cfg, const std::filesystem::path& path);

/// Every key with its current value, in a form apply_config_text accepts.
std::string config_text(const ExperimentConfig& cfg);

/// Known keys, in the order config_text writes them.
const std::vector<std::string>& config_keys();

/// FNV-1a hash over every setting that influences a training run of the
/// given scenario (seeds, output location, sweep list and thread count are
/// excluded). Formatted as 16 hex digits.
std::string setting_hash(const ExperimentConfig& cfg, ExperimentScenario s);

}  // namespace rislab
