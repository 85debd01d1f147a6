#include "rislab/runner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "rislab/plot.hpp"

namespace rislab {

namespace {

std::string fmt(double v, const char* spec = "%.17g") {
  char buf[40];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

double parse_field(const std::string& s, std::size_t line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) {
    throw std::runtime_error("record csv line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

void write_text_atomically(const std::filesystem::path& path, const std::string& text) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << text;
    if (!out.flush()) throw std::runtime_error("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

std::optional<std::vector<StepRecord>> load_cached(const std::filesystem::path& path,
                                                   std::int64_t steps) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return std::nullopt;
  try {
    auto rec = read_record_csv(path);
    if (static_cast<std::int64_t>(rec.size()) != steps) return std::nullopt;
    return rec;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::string svg_title(const ExperimentConfig& cfg) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "K=%zu M=%zu L=%zu beta_min=%g P_t=%g dBm", cfg.system.users,
                cfg.system.antennas, cfg.system.elements, cfg.system.beta_min, cfg.system.power_dbm);
  return buf;
}

}  // namespace

std::vector<double> RunRecord::true_rates() const {
  std::vector<double> out;
  out.reserve(steps.size());
  for (const auto& s : steps) out.push_back(s.true_sum_rate);
  return out;
}

std::string record_stem(const ExperimentConfig& cfg, ExperimentScenario s, std::uint64_t seed) {
  return std::string(to_string(s)) + "_" + setting_hash(cfg, s) + "_" + std::to_string(seed);
}

void write_record_csv(std::ostream& out, const std::vector<StepRecord>& steps) {
  out << kRecordCsvHeader << '\n';
  for (std::size_t t = 0; t < steps.size(); ++t) {
    const auto& s = steps[t];
    out << t << ',' << fmt(s.true_sum_rate) << ',' << fmt(s.training_reward) << ',' << fmt(s.lambda)
        << ',' << fmt(s.alpha) << '\n';
  }
}

std::vector<StepRecord> read_record_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kRecordCsvHeader) {
    throw std::runtime_error("record csv: missing or unexpected header");
  }
  std::vector<StepRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (fields.size() != 5) {
      throw std::runtime_error("record csv line " + std::to_string(lineno) + ": expected 5 fields");
    }
    if (parse_field(fields[0], lineno) != static_cast<double>(out.size())) {
      throw std::runtime_error("record csv line " + std::to_string(lineno) + ": steps out of order");
    }
    out.push_back({parse_field(fields[1], lineno), parse_field(fields[2], lineno),
                   parse_field(fields[3], lineno), parse_field(fields[4], lineno)});
  }
  return out;
}

std::vector<StepRecord> read_record_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_record_csv(in);
}

std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg, ExperimentScenario s,
                                      const RunOptions& opts) {
  cfg.validate();
  std::filesystem::create_directories(cfg.output_dir);
  const SystemConfig sys = cfg.system_for(s);
  const AgentConfig agent = cfg.agent_for(s);
  const std::string echo = config_text(cfg);

  std::vector<RunRecord> records(cfg.seeds.size());
  std::mutex log_mutex;
  auto log = [&](const std::string& msg) {
    if (!opts.log) return;
    std::lock_guard lock(log_mutex);
    *opts.log << msg << std::endl;
  };

  auto run_one = [&](std::size_t i) {
    RunRecord& rec = records[i];
    rec.seed = cfg.seeds[i];
    rec.config_echo = echo;
    const std::string stem = record_stem(cfg, s, rec.seed);
    rec.csv_path = cfg.output_dir / (stem + ".csv");

    if (opts.reuse_cached) {
      if (auto cached = load_cached(rec.csv_path, cfg.steps)) {
        rec.steps = std::move(*cached);
        rec.from_cache = true;
        log("reused " + rec.csv_path.string());
        return;
      }
    }

    ProgressFn progress;
    if (opts.log && opts.log_every > 0) {
      progress = [&, stem](std::int64_t t, const StepRecord& r) {
        if ((t + 1) % opts.log_every == 0) {
          log(stem + " step " + std::to_string(t + 1) + " rate " + fmt(r.true_sum_rate, "%.4f"));
        }
      };
    }
    const auto start = std::chrono::steady_clock::now();
    LearningRecord lr = train_loop(sys, agent, rec.seed, cfg.steps, opts.channels, progress);
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rec.steps = std::move(lr.steps);
    for (const auto& st : rec.steps) {
      if (!std::isfinite(st.true_sum_rate)) {
        throw std::runtime_error(stem + ": non-finite sum rate in run record");
      }
    }

    std::ostringstream csv;
    write_record_csv(csv, rec.steps);
    write_text_atomically(rec.csv_path, csv.str());
    write_text_atomically(cfg.output_dir / (stem + ".cfg"),
                          echo + "# seed " + std::to_string(rec.seed) + ", wall clock " +
                              fmt(rec.wall_seconds) + " s\n");
    log("wrote " + rec.csv_path.string() + " (" + fmt(rec.wall_seconds, "%.1f") + " s)");
  };

  const std::size_t workers = std::min(cfg.threads, cfg.seeds.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < records.size(); i = next++) {
      try {
        run_one(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return records;
}

AggregateSummary aggregate(const RunSet& runs, std::size_t window) {
  AggregateSummary out;
  for (const auto& [scenario, records] : runs) {
    std::vector<std::vector<double>> series;
    for (const auto& r : records) series.push_back(r.true_rates());
    out.scenarios[scenario] = summarize(series, window);
  }
  const auto g = out.scenarios.find(ExperimentScenario::kGolden);
  const auto m = out.scenarios.find(ExperimentScenario::kMismatch);
  const auto b = out.scenarios.find(ExperimentScenario::kBetaSpace);
  if (g != out.scenarios.end() && m != out.scenarios.end() && b != out.scenarios.end()) {
    out.performance_increase = performance_increase(g->second.mean, m->second.mean, b->second.mean);
  }
  return out;
}

void write_summary_csv(std::ostream& out, const AggregateSummary& summary) {
  out << "scenario,seeds,mean,ci95_half_width,truncated\n";
  for (const auto& [scenario, s] : summary.scenarios) {
    out << to_string(scenario) << ',' << s.per_seed.size() << ',' << fmt(s.mean) << ','
        << fmt(s.half_width) << ',' << (s.truncated ? 1 : 0) << '\n';
  }
  out << "performance_increase_percent,,"
      << (summary.performance_increase ? fmt(*summary.performance_increase) : std::string("nan"))
      << ",,\n";
}

void print_summary(std::ostream& out, const AggregateSummary& summary) {
  char buf[160];
  for (const auto& [scenario, s] : summary.scenarios) {
    std::snprintf(buf, sizeof buf, "%-11s %6.3f +/- %.3f  (%zu seeds)%s", std::string(to_string(scenario)).c_str(),
                  s.mean, s.half_width, s.per_seed.size(),
                  s.truncated ? "  [fewer steps than the tail window]" : "");
    out << buf << '\n';
  }
  if (summary.performance_increase) {
    std::snprintf(buf, sizeof buf, "performance increase %.1f%%", *summary.performance_increase);
    out << buf << '\n';
  } else if (summary.scenarios.size() == 3) {
    out << "performance increase undefined (golden does not exceed mismatch)\n";
  }
}

void plot_runs(std::ostream& out, const RunSet& runs, std::size_t smooth_window,
               const std::string& title) {
  std::vector<PlotSeries> series;
  for (const auto& [scenario, records] : runs) {
    std::vector<std::vector<double>> smoothed;
    for (const auto& r : records) smoothed.push_back(smooth(r.true_rates(), smooth_window));
    Band band = across_records_band(smoothed);
    series.push_back({std::string(to_string(scenario)), std::move(band.mean), std::move(band.half_width)});
  }
  PlotOptions opts;
  opts.title = title;
  write_svg(out, series, opts);
}

SuiteResult run_suite(const ExperimentConfig& cfg, const RunOptions& opts) {
  SuiteResult out;
  for (ExperimentScenario s : kAllScenarios) out.runs[s] = run_experiment(cfg, s, opts);
  if (cfg.seeds.size() >= 2) out.summary = aggregate(out.runs, cfg.last_window);

  const std::string tag = setting_hash(cfg, ExperimentScenario::kGolden);
  if (cfg.seeds.size() >= 2) {
    out.summary_csv = cfg.output_dir / ("summary_" + tag + ".csv");
    std::ostringstream csv;
    write_summary_csv(csv, out.summary);
    write_text_atomically(out.summary_csv, csv.str());
  }
  out.plot_svg = cfg.output_dir / ("curves_" + tag + ".svg");
  std::ostringstream svg;
  plot_runs(svg, out.runs, cfg.smooth_window, svg_title(cfg));
  write_text_atomically(out.plot_svg, svg.str());
  return out;
}

std::vector<SweepPoint> run_sweep(const ExperimentConfig& cfg, const RunOptions& opts) {
  if (cfg.power_sweep_dbm.empty()) throw ConfigError("power_sweep must list at least one power");
  std::vector<SweepPoint> points;
  for (double p : cfg.power_sweep_dbm) {
    ExperimentConfig c = cfg;
    c.system.power_dbm = p;
    points.push_back({p, run_suite(c, opts)});
  }
  std::ostringstream csv;
  csv << "power_dbm,scenario,mean,ci95_half_width\n";
  for (const auto& pt : points) {
    for (const auto& [scenario, s] : pt.suite.summary.scenarios) {
      csv << fmt(pt.power_dbm) << ',' << to_string(scenario) << ',' << fmt(s.mean) << ','
          << fmt(s.half_width) << '\n';
    }
  }
  std::filesystem::create_directories(cfg.output_dir);
  write_text_atomically(cfg.output_dir / ("sweep_" + setting_hash(cfg, ExperimentScenario::kGolden) + ".csv"),
                        csv.str());
  return points;
}

}  // namespace rislab
