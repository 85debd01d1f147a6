#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rislab/config.hpp"
#include "rislab/stats.hpp"
#include "rislab/training.hpp"

namespace rislab {

struct RunRecord {
  std::uint64_t seed = 0;
  std::vector<StepRecord> steps;
  double wall_seconds = 0.0;
  std::string config_echo;
  std::filesystem::path csv_path;
  bool from_cache = false;

  std::vector<double> true_rates() const;
};

inline constexpr const char* kRecordCsvHeader = "step,true_sum_rate,training_reward,lambda,alpha";

/// `{scenario}_{setting-hash}_{seed}`
std::string record_stem(const ExperimentConfig& cfg, ExperimentScenario s, std::uint64_t seed);

void write_record_csv(std::ostream& out, const std::vector<StepRecord>& steps);
/// Throws std::runtime_error on a malformed file.
std::vector<StepRecord> read_record_csv(std::istream& in);
std::vector<StepRecord> read_record_csv(const std::filesystem::path& path);

struct RunOptions {
  /// Load an existing CSV with the right name and length instead of training.
  bool reuse_cached = false;
  /// Start every seed from this realisation instead of drawing one.
  std::optional<ChannelSet> channels;
  /// Progress lines go here when set.
  std::ostream* log = nullptr;
  std::int64_t log_every = 0;
};

/// Trains one fresh agent per seed (seeds run on cfg.threads workers) and
/// persists each record as CSV with a `.cfg` echo next to it as soon as it
/// finishes, so a failure leaves the completed seeds on disk.
std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg, ExperimentScenario s,
                                      const RunOptions& opts = {});

using RunSet = std::map<ExperimentScenario, std::vector<RunRecord>>;

struct AggregateSummary {
  std::map<ExperimentScenario, ScenarioSummary> scenarios;
  std::optional<double> performance_increase;  // needs all three scenarios
};

/// Tail-window statistics of the true sum rate per scenario.
AggregateSummary aggregate(const RunSet& runs, std::size_t window);

void write_summary_csv(std::ostream& out, const AggregateSummary& summary);
void print_summary(std::ostream& out, const AggregateSummary& summary);

struct SuiteResult {
  RunSet runs;
  AggregateSummary summary;
  std::filesystem::path summary_csv;
  std::filesystem::path plot_svg;
};

/// Golden, mismatch and beta_space on the same seeds, then aggregation, a
/// summary CSV and a smoothed learning-curve SVG in cfg.output_dir.
SuiteResult run_suite(const ExperimentConfig& cfg, const RunOptions& opts = {});

struct SweepPoint {
  double power_dbm = 0.0;
  SuiteResult suite;
};

/// run_suite at every power in cfg.power_sweep_dbm; writes a sweep CSV.
std::vector<SweepPoint> run_sweep(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// Smoothed learning curves with across-seed bands for every scenario in `runs`.
void plot_runs(std::ostream& out, const RunSet& runs, std::size_t smooth_window,
               const std::string& title);

}  // namespace rislab
