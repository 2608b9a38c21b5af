#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace lgra {

struct Ring {
  double inner = 0.0;
  double outer = 0.0;
  double width() const { return outer - inner; }
  bool operator==(const Ring&) const = default;
};

enum class Placement { kEqualRings, kDisc };
enum class Estimator { kEnergy, kLiteral };
enum class ThresholdMode { kSeBalanced, kObjective, kOracleBalanced };
enum class PriorLambda { kEstimated, kTrue };
enum class PriorGain { kRealized, kMean };
enum class BoundForm { kRelaxed, kDynamic };
enum class Strategy { kDps, kFixed };
enum class RadialLaw { kUniformArea, kShiftedDisc };

// Full parameterization of one scenario. Defaults reproduce the reference
// system configuration (K = 4, group size 5, 1000 groups per cluster).
struct ScenarioConfig {
  // Propagation.
  double cell_radius_m = 1000.0;
  double pathloss_alpha = 15.3;
  double pathloss_beta = 37.6;
  double shadowing_var = 8.0;  // dB^2
  double noise_power_dbm = -99.0;
  bool small_scale_fading = true;
  bool unit_gain = false;  // g = 1 for every user (AWGN setting)

  // Topology.
  int n_users = 20000;
  int n_clusters = 4;
  std::vector<Ring> cluster_rings;  // empty: default rings for n_clusters
  Placement placement = Placement::kEqualRings;
  double assignment_noise_m = 0.0;
  bool grouping = true;
  int group_size = 5;
  bool group_size_cap = true;
  int groups_per_cluster = 1000;  // nominal M for analytic experiments
  int kmeans_max_rounds = 5;
  double heard_threshold_db = 30.0;
  double payload_bits = 1000.0;
  double bandwidth_hz = 1e6;

  // Access procedure.
  int cluster_preamble_len = 32;
  double tx_power_dbm = 23.0;
  double sparsity = 0.05;
  double target_pF = 0.05;
  double target_pM = 0.05;
  Estimator estimator = Estimator::kEnergy;
  int phase1_repetitions = 1;
  Strategy strategy = Strategy::kDps;
  int fixed_preamble_len = 64;
  double safety_factor = 1.1;
  BoundForm dps_bound = BoundForm::kRelaxed;
  int min_preamble_len = 16;
  int guard_symbols = 0;

  // Detector.
  int amp_max_iters = 50;
  double amp_tolerance = 1e-3;
  ThresholdMode threshold_mode = ThresholdMode::kSeBalanced;
  PriorLambda prior_lambda = PriorLambda::kEstimated;
  PriorGain prior_gain = PriorGain::kRealized;
  RadialLaw radial_law = RadialLaw::kUniformArea;
  int gain_nodes = 384;

  // Energy and delay accounting (not taken from measurements).
  double wait_power_mw = 10.0;
  double pcs_power_mw = 50.0;
  int pcs_symbols = 200;
  int phase1_wait_symbols = 839;
  int symbols_per_slot = 839;
  double slot_duration_ms = 0.5;
  int gp_preamble_symbols = 839;
  int gp_attempts = 2;
  int gp_wait_symbols = 8390;

  std::uint64_t rng_seed = 1;

  // Derived quantities.
  double noise_power_w() const;
  double tx_power_w() const;
  double shadow_std_db() const;
  double symbol_duration_s() const;
  int effective_group_size() const { return grouping ? group_size : 1; }
  std::vector<Ring> rings() const;  // resolved ring list

  // Throws ConfigError when an invariant is violated.
  void validate() const;
};

// Equal-width rings, used when none are given. For K = 2 and K = 4 these are
// the reference layouts.
std::vector<Ring> default_rings(int n_clusters, double radius);

// Applies one `key = value` assignment. Throws ConfigError on unknown keys or
// malformed values.
void set_config_value(ScenarioConfig& config, const std::string& key, const std::string& value);

// Parses a flat key-value file; `#` starts a comment.
ScenarioConfig load_config_file(const std::string& path, ScenarioConfig base = {});
ScenarioConfig parse_config_text(const std::string& text, ScenarioConfig base = {});

// Every key and its current value, in a fixed order.
std::vector<std::pair<std::string, std::string>> config_entries(const ScenarioConfig& config);
std::vector<std::string> config_keys();

std::string format_rings(const std::vector<Ring>& rings);
std::vector<Ring> parse_rings(const std::string& text);

double dbm_to_watt(double dbm);

}  // namespace lgra
