#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "lgra/cell.hpp"
#include "lgra/config.hpp"

namespace lgra {

struct GroupingParams {
  double tx_power = 0.0;      // W
  double noise_power = 0.0;   // W, N_o in the rate expression
  double bandwidth = 1e6;     // Hz
  double payload_bits = 1000.0;
  double heard_power = 0.0;   // minimum d2d |h|^2 for a head to be heard
  int group_size = 5;
  bool cap = true;
  int max_rounds = 5;

  static GroupingParams from_config(const ScenarioConfig& config);
  int capacity() const;
};

// Link power gains used by the grouping algorithm.
class LinkModel {
 public:
  virtual ~LinkModel() = default;
  virtual double d2d_power(int i, int n) const = 0;
  virtual double bs_power(int n) const = 0;
  // Cheap pre-filter; false means the pair can never be heard.
  virtual bool may_hear(int /*i*/, int /*n*/) const { return true; }
};

// Links of a built cell: reciprocal d2d model and realized large-scale gain
// toward the base station.
class CellLinks : public LinkModel {
 public:
  CellLinks(const CellState& cell, const GroupingParams& params);
  double d2d_power(int i, int n) const override;
  double bs_power(int n) const override;
  bool may_hear(int i, int n) const override;

 private:
  const CellState& cell_;
  double reach_;
};

struct GroupEnergyScore {
  int user = -1;
  double eps_inner = 0.0;
  double eps_outer = 0.0;
  double gamma = 0.0;  // +inf when some member is unreachable
};

// B * log2(1 + P |h|^2 / N_o).
double achievable_rate(std::complex<double> h, double power, double bandwidth, double noise);
double achievable_rate_from_power(double h2, double power, double bandwidth, double noise);

// Energy score of `candidate` as head of the group with the given members.
GroupEnergyScore score_candidate(const std::vector<int>& members, int candidate, const LinkModel& links,
                                 const GroupingParams& params);

// Self-election of provisional heads with probability 1/group_size, then
// capacity-capped subscription to the strongest heard head.
void initialize_groups(CellState& cell, const LinkModel& links, const GroupingParams& params, std::uint64_t seed);

struct RoundStats {
  int membership_changes = 0;
  int head_changes = 0;
  double gamma_before = 0.0;  // sum of head gammas before re-selection
  double gamma_after = 0.0;   // sum of head gammas after re-selection
  bool changed() const { return membership_changes > 0 || head_changes > 0; }
};

// One round: members re-subscribe to the strongest heard head, then each
// group re-selects the member with the smallest gamma as head.
RoundStats kmeans_round(CellState& cell, const LinkModel& links, const GroupingParams& params);

// Iterates kmeans_round until nothing changes or max_rounds is reached.
// Returns the number of rounds executed.
int run_kmeans(CellState& cell, const LinkModel& links, const GroupingParams& params);

// Every user forms its own group (grouping disabled).
void singleton_groups(CellState& cell);

}  // namespace lgra
