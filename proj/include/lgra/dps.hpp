#pragma once

#include <functional>
#include <string>
#include <vector>

#include "lgra/config.hpp"
#include "lgra/preamble.hpp"
#include "lgra/state_evolution.hpp"

namespace lgra {

struct DpsPlan {
  std::vector<int> lengths;      // per cluster, symbols
  std::vector<int> slot_start;   // per cluster, symbol offset from the phase-II start
  std::vector<int> priority;     // cluster indices in transmission order
  std::vector<int> est_load;     // per cluster estimated active groups
  std::vector<char> zero_load;   // per cluster: estimate was zero, minimal length used
  std::vector<double> bound;     // per cluster unrounded bound used for the length (0 when zero_load)
  int guard = 0;
  int total_airtime = 0;         // sum of lengths plus guard gaps

  std::string serialize() const;  // "cluster,priority,slot_start,length" lines
};

struct DpsParams {
  double safety_factor = 1.1;
  int min_length = 16;
  int guard = 0;
  BoundForm form = BoundForm::kRelaxed;
  Strategy strategy = Strategy::kDps;
  int fixed_length = 64;

  static DpsParams from_config(const ScenarioConfig& config);
};

// Supplies the bound solution of cluster k at an estimated load.
using BoundProvider = std::function<SeSolution(int cluster, int load)>;

// Lengths from the bounds (or the fixed length), priority by descending
// estimated load with ties to the lower index and zero-load clusters last,
// back-to-back slots in priority order.
DpsPlan plan_from_loads(const std::vector<int>& loads, const DpsParams& params, const BoundProvider& bounds);

// Estimates every cluster's load from the phase-I signal, then plans.
DpsPlan plan(const Phase1Signal& signal, const std::vector<std::vector<double>>& preambles,
             const std::vector<int>& groups_per_cluster, const Phase1Params& phase1, const DpsParams& params,
             const BoundProvider& bounds);

}  // namespace lgra
