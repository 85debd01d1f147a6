#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "rislab/environment.hpp"

namespace rislab::oracle {

/// Phase grid for exhaustive search: `levels` equally spaced phases
/// 2*pi*i/levels per element, levels^L points in total.
struct GridSpec {
  std::size_t levels = 16;
  static constexpr double kMaxPoints = 1e6;
};

/// Sum rate evaluated from the per-element phases, the amplitude constants in
/// `cfg` and the channel matrices. Shares no code with environment.cpp: it
/// forms D_k G first and reduces with phi afterwards.
double reference_rate(const std::vector<double>& phases, const SystemConfig& cfg,
                      const std::vector<CMatrix>& channels, const CMatrix& beamformer);

/// Same, for an explicit reflection vector.
double reference_rate(const CVector& phi, const std::vector<CMatrix>& channels,
                      const CMatrix& beamformer, double noise_power, LogBase base);

/// Reference amplitude model.
double reference_amplitude(double phase, double beta_min, double mu, double kappa);

/// Calls `visit` for every grid point. Throws DomainError when the grid has
/// more than GridSpec::kMaxPoints points.
void for_each_grid_point(std::size_t elements, const GridSpec& grid,
                         const std::function<void(const std::vector<double>&)>& visit);

struct PhaseOptimum {
  std::vector<double> phases;
  double rate = 0.0;
};

/// Exhaustive maximisation of the true sum rate over the phase grid with the
/// beamformer held fixed.
PhaseOptimum brute_force_phases(const SystemConfig& cfg, const ChannelSet& channels,
                                const CMatrix& beamformer, const GridSpec& grid);

/// Matched filter to the all-ones-phase cascaded channel of each user, scaled
/// to the power budget.
CMatrix matched_filter_beamformer(const SystemConfig& cfg, const ChannelSet& channels);

struct SearchResult {
  std::vector<double> best_action;
  double best_rate = 0.0;
  std::vector<double> best_so_far;  // one entry per sample
};

/// Uniform raw actions in [-1, 1]^d decoded by the environment; keeps the best
/// true sum rate.
SearchResult random_search(const SystemConfig& cfg, const ChannelSet& channels, std::size_t budget,
                           SeededRng& rng);

}  // namespace rislab::oracle
