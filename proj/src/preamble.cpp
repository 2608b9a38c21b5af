#include "lgra/preamble.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lgra/random.hpp"

namespace lgra {

std::vector<std::vector<int>> hadamard_rows(int n_clusters, int length) {
  if (length < 1 || (length & (length - 1)) != 0) {
    throw std::invalid_argument("walsh_preambles: length must be a power of two");
  }
  if (n_clusters < 0 || n_clusters > length) {
    throw std::invalid_argument("walsh_preambles: more sequences than the sequence length");
  }
  std::vector<std::vector<int>> rows;
  for (int k = 0; k < n_clusters; ++k) {
    std::vector<int> row(length);
    // Sylvester construction: H[k][j] = (-1)^popcount(k & j).
    for (int j = 0; j < length; ++j) row[j] = (__builtin_popcount(static_cast<unsigned>(k & j)) & 1) ? -1 : 1;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::vector<double>> walsh_preambles(int n_clusters, int length) {
  const auto rows = hadamard_rows(n_clusters, length);
  const double scale = 1.0 / std::sqrt(static_cast<double>(length));
  std::vector<std::vector<double>> out;
  for (const auto& row : rows) {
    std::vector<double> s(row.size());
    for (std::size_t j = 0; j < row.size(); ++j) s[j] = row[j] * scale;
    out.push_back(std::move(s));
  }
  return out;
}

ComplexMatrix group_preamble_matrix(int length, int groups, std::uint64_t seed) {
  ComplexMatrix s(static_cast<std::size_t>(length), static_cast<std::size_t>(groups));
  Rng rng = make_rng(seed);
  std::normal_distribution<double> unit;
  const double var = 1.0 / length;
  for (int c = 0; c < groups; ++c) {
    cdouble* col = s.column(c);
    for (int r = 0; r < length; ++r) col[r] = complex_normal(rng, unit, var);
  }
  return s;
}

Phase1Params Phase1Params::from_config(const ScenarioConfig& config, const CellState& cell) {
  Phase1Params p;
  p.tx_power = config.tx_power_w();
  p.noise_power = config.noise_power_w();
  p.beta_min = cell.beta_min;
  p.repetitions = config.phase1_repetitions;
  p.small_scale_fading = config.small_scale_fading;
  p.estimator = config.estimator;
  return p;
}

Phase1Signal phase1_receive(const CellState& cell, const ChannelTable& channels, const Activity& activity,
                            const std::vector<std::vector<double>>& preambles, const Phase1Params& params,
                            std::uint64_t seed) {
  const std::size_t len = preambles.empty() ? 0 : preambles.front().size();
  const double amp = std::sqrt(params.tx_power * params.beta_min * static_cast<double>(len));
  Phase1Signal out;
  std::normal_distribution<double> unit;
  for (int rep = 0; rep < params.repetitions; ++rep) {
    Rng fading = make_rng(derive_seed(seed, {tag(Stream::kPhase1Repetition), static_cast<std::uint64_t>(rep)}));
    CVector y(len, cdouble(0.0, 0.0));
    for (std::size_t k = 0; k < cell.clusters.size(); ++k) {
      const auto& groups = cell.clusters[k].groups;
      // With power control every head arrives with amplitude sqrt(P beta_min)
      // times its small-scale coefficient.
      cdouble sum(0.0, 0.0);
      for (std::size_t m = 0; m < groups.size(); ++m) {
        if (!activity[k][m]) continue;
        const int head = cell.groups[groups[m]].head;
        cdouble h = channels.h_small[head];
        if (rep > 0) h = params.small_scale_fading ? complex_normal(fading, unit, 1.0) : cdouble(1.0, 0.0);
        sum += h;
      }
      if (sum == cdouble(0.0, 0.0)) continue;
      for (std::size_t j = 0; j < len; ++j) y[j] += amp * sum * preambles[k][j];
    }
    if (params.noise_power > 0) {
      Rng noise = make_rng(derive_seed(seed, {tag(Stream::kPhase1Noise), static_cast<std::uint64_t>(rep)}));
      for (auto& v : y) v += complex_normal(noise, unit, params.noise_power);
    }
    out.received.push_back(std::move(y));
  }
  return out;
}

int round_half_up(double v) { return static_cast<int>(std::floor(v + 0.5)); }

LoadEstimate estimate_cluster_load(const Phase1Signal& signal, const std::vector<std::vector<double>>& preambles,
                                   int cluster, int groups, const Phase1Params& params) {
  const auto& s = preambles[cluster];
  const double len = static_cast<double>(s.size());
  const double unit_power = params.tx_power * params.beta_min * len;
  double acc = 0.0;
  for (const CVector& y : signal.received) {
    cdouble proj(0.0, 0.0);
    for (std::size_t j = 0; j < s.size(); ++j) proj += s[j] * y[j];
    if (params.estimator == Estimator::kLiteral) {
      acc += proj.real() / std::sqrt(unit_power);
    } else {
      acc += (std::norm(proj) - params.noise_power) / unit_power;
    }
  }
  const double mean = signal.received.empty() ? 0.0 : acc / static_cast<double>(signal.received.size());
  LoadEstimate est;
  est.count = std::clamp(round_half_up(mean), 0, groups);
  est.lambda = groups > 0 ? static_cast<double>(est.count) / groups : 0.0;
  return est;
}

}  // namespace lgra
