#include "lgra/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "lgra/error.hpp"

namespace lgra {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) {
    throw ConfigError("config key '" + key + "': not a number: '" + text + "'");
  }
  return v;
}

long long parse_int(const std::string& key, const std::string& text) {
  long long v = 0;
  const char* end = text.data() + text.size();
  auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ConfigError("config key '" + key + "': not an integer: '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "on" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "off" || text == "no") return false;
  throw ConfigError("config key '" + key + "': not a boolean: '" + text + "'");
}

template <typename E>
struct EnumNames {
  std::vector<std::pair<E, std::string>> names;

  E parse(const std::string& key, const std::string& text) const {
    for (const auto& [value, name] : names) {
      if (name == text) return value;
    }
    std::string allowed;
    for (const auto& [value, name] : names) allowed += (allowed.empty() ? "" : "|") + name;
    throw ConfigError("config key '" + key + "': expected one of " + allowed + ", got '" + text + "'");
  }

  std::string format(E value) const {
    for (const auto& [v, name] : names) {
      if (v == value) return name;
    }
    return "?";
  }
};

const EnumNames<Placement> kPlacement{{{Placement::kEqualRings, "equal_rings"}, {Placement::kDisc, "disc"}}};
const EnumNames<Estimator> kEstimator{{{Estimator::kEnergy, "energy"}, {Estimator::kLiteral, "literal"}}};
const EnumNames<ThresholdMode> kThreshold{{{ThresholdMode::kSeBalanced, "se_balanced"},
                                           {ThresholdMode::kObjective, "objective"},
                                           {ThresholdMode::kOracleBalanced, "oracle_balanced"}}};
const EnumNames<PriorLambda> kPriorLambda{{{PriorLambda::kEstimated, "estimated"}, {PriorLambda::kTrue, "true"}}};
const EnumNames<PriorGain> kPriorGain{{{PriorGain::kRealized, "realized"}, {PriorGain::kMean, "mean"}}};
const EnumNames<BoundForm> kBound{{{BoundForm::kRelaxed, "relaxed"}, {BoundForm::kDynamic, "dynamic"}}};
const EnumNames<Strategy> kStrategy{{{Strategy::kDps, "dps"}, {Strategy::kFixed, "fixed"}}};
const EnumNames<RadialLaw> kRadial{{{RadialLaw::kUniformArea, "uniform_area"}, {RadialLaw::kShiftedDisc, "shifted_disc"}}};

struct Field {
  std::string name;
  std::function<void(ScenarioConfig&, const std::string&)> set;
  std::function<std::string(const ScenarioConfig&)> get;
};

#define LGRA_DOUBLE(member)                                                                   \
  Field {                                                                                     \
    #member, [](ScenarioConfig& c, const std::string& v) { c.member = parse_double(#member, v); }, \
        [](const ScenarioConfig& c) { return format_double(c.member); }                      \
  }
#define LGRA_INT(member)                                                                          \
  Field {                                                                                         \
    #member,                                                                                      \
        [](ScenarioConfig& c, const std::string& v) {                                             \
          const long long x = parse_int(#member, v);                                              \
          if (x < -2147483647LL || x > 2147483647LL) throw ConfigError("config key '" #member "': out of range"); \
          c.member = static_cast<int>(x);                                                         \
        },                                                                                        \
        [](const ScenarioConfig& c) { return std::to_string(c.member); }                         \
  }
#define LGRA_BOOL(member)                                                                   \
  Field {                                                                                   \
    #member, [](ScenarioConfig& c, const std::string& v) { c.member = parse_bool(#member, v); }, \
        [](const ScenarioConfig& c) { return std::string(c.member ? "true" : "false"); }   \
  }
#define LGRA_ENUM(member, table)                                                              \
  Field {                                                                                     \
    #member, [](ScenarioConfig& c, const std::string& v) { c.member = table.parse(#member, v); }, \
        [](const ScenarioConfig& c) { return table.format(c.member); }                       \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      LGRA_DOUBLE(cell_radius_m),
      LGRA_DOUBLE(pathloss_alpha),
      LGRA_DOUBLE(pathloss_beta),
      LGRA_DOUBLE(shadowing_var),
      LGRA_DOUBLE(noise_power_dbm),
      LGRA_BOOL(small_scale_fading),
      LGRA_BOOL(unit_gain),
      LGRA_INT(n_users),
      LGRA_INT(n_clusters),
      Field{"cluster_rings",
            [](ScenarioConfig& c, const std::string& v) { c.cluster_rings = parse_rings(v); },
            [](const ScenarioConfig& c) { return format_rings(c.cluster_rings); }},
      LGRA_ENUM(placement, kPlacement),
      LGRA_DOUBLE(assignment_noise_m),
      LGRA_BOOL(grouping),
      LGRA_INT(group_size),
      LGRA_BOOL(group_size_cap),
      LGRA_INT(groups_per_cluster),
      LGRA_INT(kmeans_max_rounds),
      LGRA_DOUBLE(heard_threshold_db),
      LGRA_DOUBLE(payload_bits),
      LGRA_DOUBLE(bandwidth_hz),
      LGRA_INT(cluster_preamble_len),
      LGRA_DOUBLE(tx_power_dbm),
      LGRA_DOUBLE(sparsity),
      LGRA_DOUBLE(target_pF),
      LGRA_DOUBLE(target_pM),
      LGRA_ENUM(estimator, kEstimator),
      LGRA_INT(phase1_repetitions),
      LGRA_ENUM(strategy, kStrategy),
      LGRA_INT(fixed_preamble_len),
      LGRA_DOUBLE(safety_factor),
      LGRA_ENUM(dps_bound, kBound),
      LGRA_INT(min_preamble_len),
      LGRA_INT(guard_symbols),
      LGRA_INT(amp_max_iters),
      LGRA_DOUBLE(amp_tolerance),
      LGRA_ENUM(threshold_mode, kThreshold),
      LGRA_ENUM(prior_lambda, kPriorLambda),
      LGRA_ENUM(prior_gain, kPriorGain),
      LGRA_ENUM(radial_law, kRadial),
      LGRA_INT(gain_nodes),
      LGRA_DOUBLE(wait_power_mw),
      LGRA_DOUBLE(pcs_power_mw),
      LGRA_INT(pcs_symbols),
      LGRA_INT(phase1_wait_symbols),
      LGRA_INT(symbols_per_slot),
      LGRA_DOUBLE(slot_duration_ms),
      LGRA_INT(gp_preamble_symbols),
      LGRA_INT(gp_attempts),
      LGRA_INT(gp_wait_symbols),
      Field{"rng_seed",
            [](ScenarioConfig& c, const std::string& v) {
              std::uint64_t x = 0;
              const char* end = v.data() + v.size();
              auto res = std::from_chars(v.data(), end, x);
              if (res.ec != std::errc() || res.ptr != end) {
                throw ConfigError("config key 'rng_seed': not an unsigned integer: '" + v + "'");
              }
              c.rng_seed = x;
            },
            [](const ScenarioConfig& c) { return std::to_string(c.rng_seed); }},
  };
  return table;
}

#undef LGRA_DOUBLE
#undef LGRA_INT
#undef LGRA_BOOL
#undef LGRA_ENUM

}  // namespace

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double ScenarioConfig::noise_power_w() const { return dbm_to_watt(noise_power_dbm); }
double ScenarioConfig::tx_power_w() const { return dbm_to_watt(tx_power_dbm); }
double ScenarioConfig::shadow_std_db() const { return std::sqrt(shadowing_var); }
double ScenarioConfig::symbol_duration_s() const {
  return slot_duration_ms * 1e-3 / static_cast<double>(symbols_per_slot);
}

std::vector<Ring> default_rings(int n_clusters, double radius) {
  std::vector<Ring> rings;
  if (n_clusters <= 0) return rings;
  for (int k = 0; k < n_clusters; ++k) {
    rings.push_back({radius * k / n_clusters, radius * (k + 1) / n_clusters});
  }
  return rings;
}

std::vector<Ring> ScenarioConfig::rings() const {
  if (!cluster_rings.empty()) return cluster_rings;
  return default_rings(n_clusters, cell_radius_m);
}

void ScenarioConfig::validate() const {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  require(cell_radius_m > 0, "cell_radius_m must be positive");
  require(pathloss_beta > 0, "pathloss_beta must be positive");
  require(shadowing_var >= 0, "shadowing_var must be non-negative");
  require(n_users >= 1, "n_users must be at least 1");
  require(n_clusters >= 1, "n_clusters must be at least 1");
  require(!grouping || group_size >= 2, "group_size must be at least 2 when grouping is enabled");
  require(groups_per_cluster >= 1, "groups_per_cluster must be at least 1");
  require(kmeans_max_rounds >= 0, "kmeans_max_rounds must be non-negative");
  require(payload_bits > 0 && bandwidth_hz > 0, "payload_bits and bandwidth_hz must be positive");
  require(cluster_preamble_len >= 1 && (cluster_preamble_len & (cluster_preamble_len - 1)) == 0,
          "cluster_preamble_len must be a power of two");
  require(n_clusters <= cluster_preamble_len, "n_clusters cannot exceed cluster_preamble_len");
  require(sparsity >= 0 && sparsity < 1, "sparsity must lie in [0, 1)");
  require(target_pF > 0 && target_pF < 1 && target_pM > 0 && target_pM < 1,
          "target_pF and target_pM must lie in (0, 1)");
  require(phase1_repetitions >= 1, "phase1_repetitions must be at least 1");
  require(fixed_preamble_len >= 1, "fixed_preamble_len must be at least 1");
  require(safety_factor >= 1, "safety_factor must be at least 1");
  require(min_preamble_len >= 1, "min_preamble_len must be at least 1");
  require(guard_symbols >= 0, "guard_symbols must be non-negative");
  require(amp_max_iters >= 1, "amp_max_iters must be at least 1");
  require(amp_tolerance > 0, "amp_tolerance must be positive");
  require(gain_nodes >= 16, "gain_nodes must be at least 16");
  require(wait_power_mw >= 0 && pcs_power_mw >= 0, "wait and processing powers must be non-negative");
  require(pcs_symbols >= 0 && phase1_wait_symbols >= 0, "processing and wait durations must be non-negative");
  require(symbols_per_slot >= 1 && slot_duration_ms > 0, "slot timing must be positive");
  require(gp_preamble_symbols >= 0 && gp_attempts >= 0 && gp_wait_symbols >= 0,
          "group paging parameters must be non-negative");
  require(assignment_noise_m >= 0, "assignment_noise_m must be non-negative");

  const auto resolved = rings();
  require(static_cast<int>(resolved.size()) == n_clusters,
          "cluster_rings must list exactly n_clusters rings");
  double edge = 0.0;
  for (std::size_t k = 0; k < resolved.size(); ++k) {
    const Ring& r = resolved[k];
    require(r.outer > r.inner, "cluster ring " + std::to_string(k) + " is empty");
    require(std::abs(r.inner - edge) < 1e-9, "cluster rings must be contiguous and start at 0");
    edge = r.outer;
  }
  require(std::abs(edge - cell_radius_m) < 1e-9, "cluster rings must cover the cell radius");
}

std::string format_rings(const std::vector<Ring>& rings) {
  std::string out;
  for (std::size_t i = 0; i < rings.size(); ++i) {
    if (i) out += ",";
    out += format_double(rings[i].inner) + ":" + format_double(rings[i].outer);
  }
  return out;
}

std::vector<Ring> parse_rings(const std::string& text) {
  std::vector<Ring> rings;
  if (trim(text).empty()) return rings;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError("cluster_rings: expected inner:outer, got '" + item + "'");
    rings.push_back({parse_double("cluster_rings", trim(item.substr(0, colon))),
                     parse_double("cluster_rings", trim(item.substr(colon + 1)))});
  }
  return rings;
}

void set_config_value(ScenarioConfig& config, const std::string& key, const std::string& value) {
  const std::string k = trim(key);
  for (const auto& f : fields()) {
    if (f.name == k) {
      f.set(config, trim(value));
      return;
    }
  }
  throw ConfigError("unknown config key '" + k + "'");
}

ScenarioConfig parse_config_text(const std::string& text, ScenarioConfig base) {
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    try {
      set_config_value(base, line.substr(0, eq), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return base;
}

ScenarioConfig load_config_file(const std::string& path, ScenarioConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), std::move(base));
}

std::vector<std::pair<std::string, std::string>> config_entries(const ScenarioConfig& config) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : fields()) out.emplace_back(f.name, f.get(config));
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& f : fields()) out.push_back(f.name);
  return out;
}

}  // namespace lgra
