#include "rislab/stats.hpp"

#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "rislab/numerics.hpp"

namespace rislab {

double tail_mean(std::span<const double> series, std::size_t window, bool* truncated) {
  if (series.empty()) throw DomainError("tail_mean: empty series");
  if (window == 0) throw DomainError("tail_mean: window must be at least 1");
  const bool short_series = series.size() < window;
  if (truncated) *truncated = short_series;
  const auto tail = short_series ? series : series.last(window);
  return std::accumulate(tail.begin(), tail.end(), 0.0) / static_cast<double>(tail.size());
}

double t_half_width(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n == 0) throw DomainError("t_half_width: no values");
  if (n == 1) return 0.0;
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  const boost::math::students_t dist(static_cast<double>(n - 1));
  const double t = boost::math::quantile(dist, 0.975);
  return t * sd / std::sqrt(static_cast<double>(n));
}

ScenarioSummary summarize(const std::vector<std::vector<double>>& records, std::size_t window) {
  if (records.size() < 2) throw DomainError("summarize: at least two records are required");
  ScenarioSummary out;
  out.per_seed.reserve(records.size());
  for (const auto& r : records) {
    bool truncated = false;
    out.per_seed.push_back(tail_mean(r, window, &truncated));
    out.truncated = out.truncated || truncated;
  }
  out.mean = std::accumulate(out.per_seed.begin(), out.per_seed.end(), 0.0) /
             static_cast<double>(out.per_seed.size());
  out.half_width = t_half_width(out.per_seed);
  return out;
}

std::optional<double> performance_increase(double golden, double mismatch, double beta_space) {
  if (!(golden > mismatch)) return std::nullopt;
  return 100.0 * (beta_space - mismatch) / (golden - mismatch);
}

std::vector<double> smooth(std::span<const double> series, std::size_t window) {
  if (window == 0) throw DomainError("smooth: window must be at least 1");
  std::vector<double> out(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    const std::size_t first = i + 1 < window ? 0 : i + 1 - window;
    double sum = 0.0;
    for (std::size_t j = first; j <= i; ++j) sum += series[j];
    out[i] = sum / static_cast<double>(i + 1 - first);
  }
  return out;
}

Band across_records_band(const std::vector<std::vector<double>>& records) {
  if (records.empty()) throw DomainError("across_records_band: no records");
  const std::size_t len = records.front().size();
  for (const auto& r : records) {
    if (r.size() != len) throw ShapeError("across_records_band: records differ in length");
  }
  Band band;
  band.mean.resize(len);
  band.half_width.resize(len);
  std::vector<double> column(records.size());
  for (std::size_t t = 0; t < len; ++t) {
    for (std::size_t i = 0; i < records.size(); ++i) column[i] = records[i][t];
    band.mean[t] = std::accumulate(column.begin(), column.end(), 0.0) / static_cast<double>(column.size());
    band.half_width[t] = t_half_width(column);
  }
  return band;
}

}  // namespace rislab
