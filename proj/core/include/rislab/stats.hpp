#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace rislab {

/// Mean of the final `window` entries, or of all entries when the series is
/// shorter (reported through `truncated`).
double tail_mean(std::span<const double> series, std::size_t window, bool* truncated = nullptr);

/// Two-sided 95% Student-t half-width t_{0.975, n-1} * s / sqrt(n) with the
/// sample standard deviation s. Zero for a single value.
double t_half_width(std::span<const double> values);

struct ScenarioSummary {
  std::vector<double> per_seed;  // tail mean of each record
  double mean = 0.0;
  double half_width = 0.0;
  bool truncated = false;        // some record was shorter than the window
};

/// Requires at least two records.
ScenarioSummary summarize(const std::vector<std::vector<double>>& records, std::size_t window);

/// 100 (beta_space - mismatch) / (golden - mismatch); nullopt unless
/// golden > mismatch.
std::optional<double> performance_increase(double golden, double mismatch, double beta_space);

/// Trailing moving average; the first window-1 points average the available
/// prefix.
std::vector<double> smooth(std::span<const double> series, std::size_t window);

/// Per-step across-record mean and 95% t half-width.
struct Band {
  std::vector<double> mean;
  std::vector<double> half_width;
};
Band across_records_band(const std::vector<std::vector<double>>& records);

}  // namespace rislab
