#pragma once

#include <cstdint>
#include <vector>

#include "lgra/cell.hpp"
#include "lgra/channel.hpp"
#include "lgra/config.hpp"
#include "lgra/kernels.hpp"

namespace lgra {

// K distinct rows of the Sylvester-Hadamard matrix of order `length`, scaled
// to unit norm. Throws std::invalid_argument unless length is a power of two
// and K <= length.
std::vector<std::vector<double>> walsh_preambles(int n_clusters, int length);

// Unscaled +-1 Hadamard rows, for exact orthogonality checks.
std::vector<std::vector<int>> hadamard_rows(int n_clusters, int length);

// L x M matrix with i.i.d. CN(0, 1/L) entries, a pure function of the seed.
ComplexMatrix group_preamble_matrix(int length, int groups, std::uint64_t seed);

struct Phase1Params {
  double tx_power = 0.0;     // W
  double noise_power = 0.0;  // W per symbol
  double beta_min = 0.0;
  int repetitions = 1;
  bool small_scale_fading = true;
  Estimator estimator = Estimator::kEnergy;

  static Phase1Params from_config(const ScenarioConfig& config, const CellState& cell);
};

// Received phase-I signal, one vector per repetition.
struct Phase1Signal {
  std::vector<CVector> received;
};

// Superposed phase-I reception. Every active head transmits its cluster
// sequence with per-symbol power P * beta_min / beta (channel inversion of
// the large-scale gain), so that each contributes sqrt(P beta_min |s|) h_small
// to the projection on its cluster sequence. Repetitions beyond the first use
// independent small-scale draws.
Phase1Signal phase1_receive(const CellState& cell, const ChannelTable& channels, const Activity& activity,
                            const std::vector<std::vector<double>>& preambles, const Phase1Params& params,
                            std::uint64_t seed);

struct LoadEstimate {
  int count = 0;
  double lambda = 0.0;
};

// Cluster load estimate from the projection <y, s_k> normalized by
// sqrt(P beta_min |s|): the real part rounded (literal), or the
// noise-corrected energy rounded (energy). Averaged over repetitions and
// clamped to [0, groups].
LoadEstimate estimate_cluster_load(const Phase1Signal& signal, const std::vector<std::vector<double>>& preambles,
                                   int cluster, int groups, const Phase1Params& params);

// Round half up.
int round_half_up(double v);

}  // namespace lgra
