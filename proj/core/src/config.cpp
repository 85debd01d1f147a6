#include "rislab/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>

namespace rislab {

namespace {

// Bumped whenever a change to the learner alters run records, so cached
// results keyed by setting_hash are not reused across incompatible builds.
constexpr std::string_view kRecordRevision = "rislab-record-1";

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw ConfigError("invalid value '" + std::string(value) + "' for key '" + std::string(key) + "'");
}

double parse_double(std::string_view key, std::string_view text) {
  text = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) bad_value(key, text);
  return v;
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view text) {
  text = trim(text);
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) bad_value(key, text);
  return v;
}

template <typename T, typename Parse>
std::vector<T> parse_list(std::string_view text, Parse parse) {
  std::vector<T> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto end = comma == std::string_view::npos ? text.size() : comma;
    const auto item = trim(text.substr(start, end - start));
    if (!item.empty()) out.push_back(parse(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T, typename Fmt>
std::string join(const std::vector<T>& items, Fmt fmt) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += fmt(items[i]);
  }
  return out;
}

enum class Relevance { kAll, kExplorer, kNone };

struct Key {
  std::string name;
  Relevance relevance;
  std::function<void(ExperimentConfig&, std::string_view)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define RISLAB_DOUBLE_KEY(name, field, rel)                                                   \
  Key {                                                                                       \
    name, rel, [](ExperimentConfig& c, std::string_view v) { c.field = parse_double(name, v); }, \
        [](const ExperimentConfig& c) { return fmt_double(c.field); }                         \
  }
#define RISLAB_SIZE_KEY(name, field, rel)                                                          \
  Key {                                                                                            \
    name, rel,                                                                                     \
        [](ExperimentConfig& c, std::string_view v) { c.field = parse_int<std::size_t>(name, v); }, \
        [](const ExperimentConfig& c) { return std::to_string(c.field); }                          \
  }

const std::vector<Key>& keys() {
  static const std::vector<Key> table = [] {
    std::vector<Key> k;
    k.push_back(RISLAB_SIZE_KEY("users", system.users, Relevance::kAll));
    k.push_back(RISLAB_SIZE_KEY("antennas", system.antennas, Relevance::kAll));
    k.push_back(RISLAB_SIZE_KEY("elements", system.elements, Relevance::kAll));
    k.push_back(RISLAB_DOUBLE_KEY("power_dbm", system.power_dbm, Relevance::kAll));
    k.push_back(RISLAB_DOUBLE_KEY("noise_power", system.noise_power, Relevance::kAll));
    k.push_back(RISLAB_DOUBLE_KEY("error_variance", system.error_variance, Relevance::kAll));
    k.push_back(RISLAB_DOUBLE_KEY("beta_min", system.beta_min, Relevance::kAll));
    k.push_back(RISLAB_DOUBLE_KEY("mu", system.mu, Relevance::kAll));
    k.push_back(RISLAB_DOUBLE_KEY("kappa", system.kappa, Relevance::kAll));
    k.push_back(Key{"log_base", Relevance::kAll,
                    [](ExperimentConfig& c, std::string_view v) { c.system.log_base = parse_log_base(trim(v)); },
                    [](const ExperimentConfig& c) { return std::string(to_string(c.system.log_base)); }});
    k.push_back(Key{"scenario", Relevance::kNone,
                    [](ExperimentConfig& c, std::string_view v) { c.scenario = parse_scenario(trim(v)); },
                    [](const ExperimentConfig& c) { return std::string(to_string(c.scenario)); }});
    k.push_back(Key{"seeds", Relevance::kNone,
                    [](ExperimentConfig& c, std::string_view v) {
                      c.seeds = parse_list<std::uint64_t>(
                          v, [](std::string_view s) { return parse_int<std::uint64_t>("seeds", s); });
                    },
                    [](const ExperimentConfig& c) {
                      return join(c.seeds, [](std::uint64_t s) { return std::to_string(s); });
                    }});
    k.push_back(Key{"steps", Relevance::kAll,
                    [](ExperimentConfig& c, std::string_view v) { c.steps = parse_int<std::int64_t>("steps", v); },
                    [](const ExperimentConfig& c) { return std::to_string(c.steps); }});
    k.push_back(Key{"output_dir", Relevance::kNone,
                    [](ExperimentConfig& c, std::string_view v) { c.output_dir = std::string(trim(v)); },
                    [](const ExperimentConfig& c) { return c.output_dir.string(); }});
    k.push_back(Key{"hidden_layers", Relevance::kAll,
                    [](ExperimentConfig& c, std::string_view v) {
                      const auto n = parse_int<std::size_t>("hidden_layers", v);
                      const Eigen::Index width = c.agent.hidden.empty() ? 256 : c.agent.hidden.front();
                      c.agent.hidden.assign(n, width);
                    },
                    [](const ExperimentConfig& c) { return std::to_string(c.agent.hidden.size()); }});
    k.push_back(Key{"hidden_units", Relevance::kAll,
                    [](ExperimentConfig& c, std::string_view v) {
                      const auto w = parse_int<Eigen::Index>("hidden_units", v);
                      for (auto& h : c.agent.hidden) h = w;
                    },
                    [](const ExperimentConfig& c) {
                      return std::to_string(c.agent.hidden.empty() ? 0 : c.agent.hidden.front());
                    }});
    k.push_back(RISLAB_DOUBLE_KEY("learning_rate", agent.learning_rate, Relevance::kAll));
    k.push_back(RISLAB_SIZE_KEY("batch_size", agent.batch_size, Relevance::kAll));
    k.push_back(RISLAB_SIZE_KEY("buffer_capacity", agent.buffer_capacity, Relevance::kAll));
    k.push_back(RISLAB_DOUBLE_KEY("discount", agent.discount, Relevance::kAll));
    k.push_back(RISLAB_DOUBLE_KEY("tau", agent.tau, Relevance::kAll));
    k.push_back(RISLAB_DOUBLE_KEY("initial_alpha", agent.initial_alpha, Relevance::kAll));
    k.push_back(RISLAB_DOUBLE_KEY("lambda0", agent.lambda0, Relevance::kExplorer));
    k.push_back(Key{"perturb_mode", Relevance::kExplorer,
                    [](ExperimentConfig& c, std::string_view v) { c.agent.perturb_mode = parse_perturb_mode(trim(v)); },
                    [](const ExperimentConfig& c) { return std::string(to_string(c.agent.perturb_mode)); }});
    k.push_back(Key{"beta_lo_mode", Relevance::kExplorer,
                    [](ExperimentConfig& c, std::string_view v) { c.beta_lo_mode = parse_beta_lo_mode(trim(v)); },
                    [](const ExperimentConfig& c) { return std::string(to_string(c.beta_lo_mode)); }});
    k.push_back(Key{"power_sweep", Relevance::kNone,
                    [](ExperimentConfig& c, std::string_view v) {
                      c.power_sweep_dbm = parse_list<double>(
                          v, [](std::string_view s) { return parse_double("power_sweep", s); });
                    },
                    [](const ExperimentConfig& c) { return join(c.power_sweep_dbm, fmt_double); }});
    k.push_back(RISLAB_SIZE_KEY("threads", threads, Relevance::kNone));
    k.push_back(RISLAB_SIZE_KEY("last_window", last_window, Relevance::kNone));
    k.push_back(RISLAB_SIZE_KEY("smooth_window", smooth_window, Relevance::kNone));
    return k;
  }();
  return table;
}

#undef RISLAB_DOUBLE_KEY
#undef RISLAB_SIZE_KEY

}  // namespace

std::string_view to_string(ExperimentScenario s) {
  switch (s) {
    case ExperimentScenario::kGolden: return "golden";
    case ExperimentScenario::kMismatch: return "mismatch";
    case ExperimentScenario::kBetaSpace: return "beta_space";
  }
  return "?";
}

ExperimentScenario parse_scenario(std::string_view text) {
  if (text == "golden") return ExperimentScenario::kGolden;
  if (text == "mismatch") return ExperimentScenario::kMismatch;
  if (text == "beta_space") return ExperimentScenario::kBetaSpace;
  throw ConfigError("unknown scenario '" + std::string(text) + "' (golden, mismatch, beta_space)");
}

std::string_view to_string(PerturbMode m) {
  return m == PerturbMode::kBlended ? "blended" : "literal";
}

PerturbMode parse_perturb_mode(std::string_view text) {
  if (text == "blended") return PerturbMode::kBlended;
  if (text == "literal") return PerturbMode::kLiteral;
  throw ConfigError("unknown perturbation mode '" + std::string(text) + "' (blended, literal)");
}

std::string_view to_string(BetaLoMode m) { return m == BetaLoMode::kTrue ? "true" : "zero"; }

BetaLoMode parse_beta_lo_mode(std::string_view text) {
  if (text == "true") return BetaLoMode::kTrue;
  if (text == "zero") return BetaLoMode::kZero;
  throw ConfigError("unknown beta_lo mode '" + std::string(text) + "' (true, zero)");
}

std::string_view to_string(LogBase b) { return b == LogBase::kTwo ? "2" : "e"; }

LogBase parse_log_base(std::string_view text) {
  if (text == "2") return LogBase::kTwo;
  if (text == "e") return LogBase::kNatural;
  throw ConfigError("unknown log base '" + std::string(text) + "' (2, e)");
}

void ExperimentConfig::validate() const {
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (steps <= 0) throw ConfigError("steps must be positive");
  if (threads == 0) throw ConfigError("threads must be at least 1");
  if (last_window == 0) throw ConfigError("last_window must be at least 1");
  if (smooth_window == 0) throw ConfigError("smooth_window must be at least 1");
  if (agent.hidden.empty()) throw ConfigError("at least one hidden layer is required");
  for (auto h : agent.hidden) {
    if (h <= 0) throw ConfigError("hidden_units must be positive");
  }
  if (agent.batch_size == 0) throw ConfigError("batch_size must be positive");
  if (agent.buffer_capacity < agent.batch_size) {
    throw ConfigError("buffer_capacity must hold at least one batch");
  }
  if (!(agent.learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (!(agent.tau > 0.0 && agent.tau <= 1.0)) throw ConfigError("tau must lie in (0, 1]");
  if (!(agent.discount > 0.0 && agent.discount <= 1.0)) {
    throw ConfigError("discount must lie in (0, 1]");
  }
  if (!(agent.initial_alpha > 0.0)) throw ConfigError("initial_alpha must be positive");
  if (!(agent.lambda0 >= 0.0 && agent.lambda0 <= 1.0)) {
    throw ConfigError("lambda0 must lie in [0, 1]");
  }
  try {
    system.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

SystemConfig ExperimentConfig::system_for(ExperimentScenario s) const {
  SystemConfig out = system;
  out.scenario = s == ExperimentScenario::kGolden ? Scenario::kGolden : Scenario::kMismatch;
  return out;
}

AgentConfig ExperimentConfig::agent_for(ExperimentScenario s) const {
  AgentConfig out = agent;
  out.use_explorer = s == ExperimentScenario::kBetaSpace;
  out.beta_lo = beta_lo_mode == BetaLoMode::kTrue ? system.beta_min : 0.0;
  return out;
}

void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  key = trim(key);
  for (const auto& k : keys()) {
    if (k.name == key) {
      k.set(cfg, value);
      return;
    }
  }
  throw ConfigError("unknown configuration key '" + std::string(key) + "'");
}

void apply_config_text(ExperimentConfig& cfg, std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view v = line;
    if (const auto hash = v.find('#'); hash != std::string_view::npos) v = v.substr(0, hash);
    v = trim(v);
    if (v.empty()) continue;
    const auto eq = v.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    apply_setting(cfg, v.substr(0, eq), v.substr(eq + 1));
  }
}

void apply_config_file(ExperimentConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  apply_config_text(cfg, in);
}

std::string config_text(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& k : keys()) out += k.name + " = " + k.get(cfg) + "\n";
  return out;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& k : keys()) n.push_back(k.name);
    return n;
  }();
  return names;
}

std::string setting_hash(const ExperimentConfig& cfg, ExperimentScenario s) {
  std::string canon(kRecordRevision);
  canon += "\nscenario=";
  canon += to_string(s);
  for (const auto& k : keys()) {
    if (k.relevance == Relevance::kNone) continue;
    if (k.relevance == Relevance::kExplorer && s != ExperimentScenario::kBetaSpace) continue;
    canon += "\n" + k.name + "=" + k.get(cfg);
  }
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace rislab
