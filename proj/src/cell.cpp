#include "lgra/cell.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "lgra/error.hpp"
#include "lgra/grouping.hpp"
#include "lgra/random.hpp"

namespace lgra {

namespace {

// Path loss is evaluated no closer than this to the base station.
constexpr double kMinPathlossDistance = 1.0;

int ring_of(const std::vector<Ring>& rings, double d) {
  for (std::size_t k = 0; k < rings.size(); ++k) {
    if (d < rings[k].outer) return static_cast<int>(k);
  }
  return static_cast<int>(rings.size()) - 1;
}

}  // namespace

double CellState::distance(int a, int b) const {
  return std::hypot(users[a].x - users[b].x, users[a].y - users[b].y);
}

void CellState::refresh_heads() {
  for (auto& u : users) u.is_head = false;
  beta_min = std::numeric_limits<double>::infinity();
  for (const Group& g : groups) {
    users[g.head].is_head = true;
    beta_min = std::min(beta_min, gain[g.head] * gain[g.head]);
  }
  if (groups.empty()) beta_min = 0.0;
}

CellState place_users(const ScenarioConfig& config, std::uint64_t seed) {
  config.validate();
  const auto rings = config.rings();
  const int n = config.n_users;
  const int K = config.n_clusters;
  CellState cell;
  cell.users.resize(n);
  cell.clusters.resize(K);
  for (int k = 0; k < K; ++k) cell.clusters[k].ring = rings[k];

  Rng place = make_rng(derive_seed(seed, {tag(Stream::kPlacement)}));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int u = 0; u < n; ++u) {
    User& user = cell.users[u];
    user.id = u;
    double d = 0.0;
    if (config.placement == Placement::kDisc) {
      d = config.cell_radius_m * std::sqrt(unif(place));
    } else {
      // Users split evenly over the rings, uniform over each ring's area.
      const int k = static_cast<int>((static_cast<long long>(u) * K) / n);
      const Ring r = rings[k];
      d = std::sqrt(r.inner * r.inner + unif(place) * (r.outer * r.outer - r.inner * r.inner));
    }
    user.distance = d;
    user.angle = 2.0 * std::numbers::pi * unif(place);
    user.x = d * std::cos(user.angle);
    user.y = d * std::sin(user.angle);
  }

  Rng assign = make_rng(derive_seed(seed, {tag(Stream::kAssignment)}));
  std::normal_distribution<double> unit;
  for (User& user : cell.users) {
    double measured = user.distance;
    if (config.assignment_noise_m > 0) {
      measured = std::clamp(measured + config.assignment_noise_m * unit(assign), 0.0, config.cell_radius_m);
    }
    user.cluster = ring_of(rings, measured);
    cell.clusters[user.cluster].users.push_back(user.id);
  }

  const PathLoss pl{config.pathloss_alpha, config.pathloss_beta};
  const double sigma = config.shadow_std_db();
  Rng shadow = make_rng(derive_seed(seed, {tag(Stream::kShadowing)}));
  cell.shadow_db.resize(n);
  cell.gain.resize(n);
  cell.mean_gain.resize(n);
  for (int u = 0; u < n; ++u) {
    const double s = sigma > 0 ? sigma * unit(shadow) : 0.0;
    const double d = std::max(cell.users[u].distance, kMinPathlossDistance);
    cell.shadow_db[u] = s;
    if (config.unit_gain) {
      cell.gain[u] = 1.0;
      cell.mean_gain[u] = 1.0;
    } else {
      cell.gain[u] = db_to_amplitude(large_scale_gain_db(d, s, pl));
      cell.mean_gain[u] = db_to_amplitude(large_scale_gain_db(d, 0.0, pl));
    }
  }
  cell.d2d = D2dLinks(derive_seed(seed, {tag(Stream::kD2d)}), pl, sigma);

  const int min_users = config.grouping ? config.group_size : 1;
  for (int k = 0; k < K; ++k) {
    if (static_cast<int>(cell.clusters[k].users.size()) < min_users) {
      throw InfeasibleError("cluster ring " + std::to_string(k) + " [" + format_rings({rings[k]}) + "] holds " +
                            std::to_string(cell.clusters[k].users.size()) + " users, fewer than one group");
    }
  }
  return cell;
}

CellState build_cell(const ScenarioConfig& config, std::uint64_t seed) {
  CellState cell = place_users(config, seed);
  if (!config.grouping) {
    singleton_groups(cell);
    return cell;
  }
  const GroupingParams params = GroupingParams::from_config(config);
  const CellLinks links(cell, params);
  initialize_groups(cell, links, params, seed);
  run_kmeans(cell, links, params);
  return cell;
}

Activity draw_activity(const CellState& cell, double lambda, std::uint64_t seed) {
  Activity act(cell.clusters.size());
  const double p = std::clamp(lambda, 0.0, 1.0);
  for (std::size_t k = 0; k < cell.clusters.size(); ++k) {
    Rng rng = make_rng(derive_seed(seed, {tag(Stream::kActivity), k}));
    std::bernoulli_distribution active(p);
    act[k].resize(cell.clusters[k].groups.size());
    for (auto& a : act[k]) a = active(rng) ? 1 : 0;
  }
  return act;
}

}  // namespace lgra
