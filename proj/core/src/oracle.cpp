#include "rislab/oracle.hpp"

#include <cmath>

namespace rislab::oracle {

double reference_amplitude(double phase, double beta_min, double mu, double kappa) {
  const double s = 0.5 * (1.0 + std::sin(phase - mu));
  return beta_min + (1.0 - beta_min) * std::pow(s, kappa);
}

double reference_rate(const CVector& phi, const std::vector<CMatrix>& channels,
                      const CMatrix& beamformer, double noise_power, LogBase base) {
  if (!(noise_power > 0.0)) throw DomainError("reference_rate: noise power must be > 0");
  const std::size_t K = channels.size();
  std::vector<double> power(K, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    const CMatrix& d = channels[k];
    // A = D_k G, then phi^T A.
    for (std::size_t c = 0; c < beamformer.cols(); ++c) {
      cdouble v = 0.0;
      for (std::size_t l = 0; l < d.rows(); ++l) {
        cdouble a = 0.0;
        for (std::size_t m = 0; m < d.cols(); ++m) a += d(l, m) * beamformer(m, c);
        v += phi[l] * a;
      }
      power[k] += v.real() * v.real() + v.imag() * v.imag();
    }
  }
  double rate = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    double interference = 0.0;
    for (std::size_t j = 0; j < K; ++j) {
      if (j != k) interference += power[j];
    }
    const double sinr = power[k] / (interference + noise_power);
    rate += base == LogBase::kTwo ? std::log2(1.0 + sinr) : std::log(1.0 + sinr);
  }
  return rate;
}

double reference_rate(const std::vector<double>& phases, const SystemConfig& cfg,
                      const std::vector<CMatrix>& channels, const CMatrix& beamformer) {
  CVector phi(phases.size());
  for (std::size_t l = 0; l < phases.size(); ++l) {
    phi[l] = std::polar(reference_amplitude(phases[l], cfg.beta_min, cfg.mu, cfg.kappa), phases[l]);
  }
  return reference_rate(phi, channels, beamformer, cfg.noise_power, cfg.log_base);
}

void for_each_grid_point(std::size_t elements, const GridSpec& grid,
                         const std::function<void(const std::vector<double>&)>& visit) {
  if (grid.levels == 0) throw DomainError("for_each_grid_point: zero quantisation levels");
  const double points = std::pow(static_cast<double>(grid.levels), static_cast<double>(elements));
  if (points > GridSpec::kMaxPoints) {
    throw DomainError("for_each_grid_point: grid of " + std::to_string(points) +
                      " points exceeds the enumeration limit");
  }
  const double step = 2.0 * M_PI / static_cast<double>(grid.levels);
  std::vector<std::size_t> idx(elements, 0);
  std::vector<double> phases(elements, 0.0);
  for (;;) {
    for (std::size_t l = 0; l < elements; ++l) phases[l] = step * static_cast<double>(idx[l]);
    visit(phases);
    std::size_t l = 0;
    while (l < elements && ++idx[l] == grid.levels) idx[l++] = 0;
    if (l == elements) break;
  }
}

PhaseOptimum brute_force_phases(const SystemConfig& cfg, const ChannelSet& channels,
                                const CMatrix& beamformer, const GridSpec& grid) {
  PhaseOptimum best;
  best.rate = -1.0;
  for_each_grid_point(cfg.elements, grid, [&](const std::vector<double>& phases) {
    const double r = reference_rate(phases, cfg, channels.cascaded, beamformer);
    if (r > best.rate) {
      best.rate = r;
      best.phases = phases;
    }
  });
  return best;
}

CMatrix matched_filter_beamformer(const SystemConfig& cfg, const ChannelSet& channels) {
  const std::size_t M = cfg.antennas;
  const std::size_t K = cfg.users;
  CMatrix g(M, K);
  double total = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    const CMatrix& d = channels.cascaded[k];
    for (std::size_t m = 0; m < M; ++m) {
      cdouble s = 0.0;
      for (std::size_t l = 0; l < d.rows(); ++l) s += d(l, m);
      g(m, k) = std::conj(s);
      total += std::norm(s);
    }
  }
  if (total > 0.0) g *= std::sqrt(cfg.power_watts() / total);
  return g;
}

SearchResult random_search(const SystemConfig& cfg, const ChannelSet& channels, std::size_t budget,
                           SeededRng& rng) {
  if (budget == 0) throw DomainError("random_search: budget must be at least 1");
  SearchResult out;
  out.best_rate = -1.0;
  out.best_so_far.reserve(budget);
  std::vector<double> raw(cfg.action_dim());
  for (std::size_t i = 0; i < budget; ++i) {
    for (auto& x : raw) x = rng.uniform(-1.0, 1.0);
    const DecodedAction a = decode_action(raw, cfg);
    const double r = reference_rate(a.true_phases, channels.cascaded, a.beamformer,
                                    cfg.noise_power, cfg.log_base);
    if (r > out.best_rate) {
      out.best_rate = r;
      out.best_action = raw;
    }
    out.best_so_far.push_back(out.best_rate);
  }
  return out;
}

}  // namespace rislab::oracle
