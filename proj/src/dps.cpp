#include "lgra/dps.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace lgra {

DpsParams DpsParams::from_config(const ScenarioConfig& config) {
  DpsParams p;
  p.safety_factor = config.safety_factor;
  p.min_length = config.min_preamble_len;
  p.guard = config.guard_symbols;
  p.form = config.dps_bound;
  p.strategy = config.strategy;
  p.fixed_length = config.fixed_preamble_len;
  return p;
}

DpsPlan plan_from_loads(const std::vector<int>& loads, const DpsParams& params, const BoundProvider& bounds) {
  const int K = static_cast<int>(loads.size());
  DpsPlan p;
  p.est_load = loads;
  p.lengths.assign(K, 0);
  p.slot_start.assign(K, 0);
  p.zero_load.assign(K, 0);
  p.bound.assign(K, 0.0);
  p.guard = params.guard;
  for (int k = 0; k < K; ++k) {
    if (params.strategy == Strategy::kFixed) {
      p.lengths[k] = params.fixed_length;
      if (loads[k] > 0) {
        p.bound[k] = bounds(k, loads[k]).relaxed;
      } else {
        p.zero_load[k] = 1;
      }
      continue;
    }
    if (loads[k] <= 0) {
      p.zero_load[k] = 1;
      p.lengths[k] = params.min_length;
      continue;
    }
    const SeSolution s = bounds(k, loads[k]);
    const int base = params.form == BoundForm::kDynamic ? s.L_dynamic : s.L_bound;
    p.bound[k] = params.form == BoundForm::kDynamic ? s.dynamic : s.relaxed;
    p.lengths[k] = std::max(1, static_cast<int>(std::ceil(params.safety_factor * base - 1e-9)));
  }

  p.priority.resize(K);
  std::iota(p.priority.begin(), p.priority.end(), 0);
  std::stable_sort(p.priority.begin(), p.priority.end(), [&](int a, int b) {
    if (p.zero_load[a] != p.zero_load[b]) return p.zero_load[a] < p.zero_load[b];
    return loads[a] > loads[b];
  });
  int t = 0;
  for (int i = 0; i < K; ++i) {
    const int k = p.priority[i];
    if (i > 0) t += params.guard;
    p.slot_start[k] = t;
    t += p.lengths[k];
  }
  p.total_airtime = t;
  return p;
}

DpsPlan plan(const Phase1Signal& signal, const std::vector<std::vector<double>>& preambles,
             const std::vector<int>& groups_per_cluster, const Phase1Params& phase1, const DpsParams& params,
             const BoundProvider& bounds) {
  std::vector<int> loads(groups_per_cluster.size());
  for (std::size_t k = 0; k < loads.size(); ++k) {
    loads[k] = estimate_cluster_load(signal, preambles, static_cast<int>(k), groups_per_cluster[k], phase1).count;
  }
  return plan_from_loads(loads, params, bounds);
}

std::string DpsPlan::serialize() const {
  std::ostringstream out;
  out << "cluster,priority,slot_start,length\n";
  for (std::size_t rank = 0; rank < priority.size(); ++rank) {
    const int k = priority[rank];
    out << k << "," << rank << "," << slot_start[k] << "," << lengths[k] << "\n";
  }
  return out.str();
}

}  // namespace lgra
