#include "lgra/grouping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lgra/error.hpp"
#include "lgra/random.hpp"

namespace lgra {

namespace {

struct HeardPair {
  double power;
  int user;
  int slot;
};

// Capacity-capped subscription of the cluster's non-head users to heads.
// Returns the head slot of every user in `users` (same order). Users that
// hear no head with free capacity fall back to their previous slot, then to
// the strongest head with room regardless of the heard threshold.
std::vector<int> subscribe(const std::vector<int>& users, const std::vector<int>& heads,
                           const std::vector<int>& previous_slot, const LinkModel& links,
                           const GroupingParams& params) {
  const int cap = params.capacity();
  std::vector<int> slot_of(users.size(), -1);
  std::vector<int> load(heads.size(), 1);

  std::vector<std::pair<int, int>> head_lookup;
  for (std::size_t j = 0; j < heads.size(); ++j) head_lookup.emplace_back(heads[j], static_cast<int>(j));
  std::sort(head_lookup.begin(), head_lookup.end());
  auto head_slot = [&](int user) {
    auto it = std::lower_bound(head_lookup.begin(), head_lookup.end(), std::make_pair(user, -1));
    return (it != head_lookup.end() && it->first == user) ? it->second : -1;
  };

  std::vector<HeardPair> pairs;
  for (std::size_t i = 0; i < users.size(); ++i) {
    const int u = users[i];
    const int own = head_slot(u);
    if (own >= 0) {
      slot_of[i] = own;
      continue;
    }
    for (std::size_t j = 0; j < heads.size(); ++j) {
      if (!links.may_hear(u, heads[j])) continue;
      const double p = links.d2d_power(u, heads[j]);
      if (p >= params.heard_power) pairs.push_back({p, static_cast<int>(i), static_cast<int>(j)});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [&](const HeardPair& a, const HeardPair& b) {
    if (a.power != b.power) return a.power > b.power;
    if (users[a.user] != users[b.user]) return users[a.user] < users[b.user];
    return heads[a.slot] < heads[b.slot];
  });
  for (const HeardPair& p : pairs) {
    if (slot_of[p.user] >= 0 || load[p.slot] >= cap) continue;
    slot_of[p.user] = p.slot;
    ++load[p.slot];
  }

  for (std::size_t i = 0; i < users.size(); ++i) {
    if (slot_of[i] >= 0) continue;
    const int prev = previous_slot.empty() ? -1 : previous_slot[i];
    if (prev >= 0 && load[prev] < cap) {
      slot_of[i] = prev;
      ++load[prev];
      continue;
    }
    int best = -1;
    double best_power = -1.0;
    for (std::size_t j = 0; j < heads.size(); ++j) {
      if (load[j] >= cap) continue;
      const double p = links.d2d_power(users[i], heads[j]);
      if (p > best_power) {
        best_power = p;
        best = static_cast<int>(j);
      }
    }
    if (best < 0) throw InfeasibleError("grouping: no head has free capacity");
    slot_of[i] = best;
    ++load[best];
  }
  return slot_of;
}

}  // namespace

GroupingParams GroupingParams::from_config(const ScenarioConfig& config) {
  GroupingParams p;
  p.tx_power = config.tx_power_w();
  p.noise_power = config.noise_power_w();
  p.bandwidth = config.bandwidth_hz;
  p.payload_bits = config.payload_bits;
  p.heard_power = std::pow(10.0, config.heard_threshold_db / 10.0) * p.noise_power / p.tx_power;
  p.group_size = config.group_size;
  p.cap = config.group_size_cap;
  p.max_rounds = config.kmeans_max_rounds;
  return p;
}

int GroupingParams::capacity() const { return cap ? group_size : std::numeric_limits<int>::max(); }

CellLinks::CellLinks(const CellState& cell, const GroupingParams& params)
    : cell_(cell), reach_(cell.d2d.reach(params.heard_power)) {}

double CellLinks::d2d_power(int i, int n) const { return cell_.d2d.power(i, n, cell_.distance(i, n)); }

double CellLinks::bs_power(int n) const { return cell_.gain[n] * cell_.gain[n]; }

bool CellLinks::may_hear(int i, int n) const { return cell_.distance(i, n) <= reach_; }

double achievable_rate_from_power(double h2, double power, double bandwidth, double noise) {
  return bandwidth * std::log2(1.0 + power * h2 / noise);
}

double achievable_rate(std::complex<double> h, double power, double bandwidth, double noise) {
  return achievable_rate_from_power(std::norm(h), power, bandwidth, noise);
}

GroupEnergyScore score_candidate(const std::vector<int>& members, int candidate, const LinkModel& links,
                                 const GroupingParams& params) {
  GroupEnergyScore s;
  s.user = candidate;
  const double inf = std::numeric_limits<double>::infinity();
  for (int i : members) {
    if (i == candidate) continue;
    const double r = achievable_rate_from_power(links.d2d_power(i, candidate), params.tx_power, params.bandwidth,
                                                params.noise_power);
    if (!(r > 0)) {
      s.eps_inner = inf;
      break;
    }
    s.eps_inner += params.tx_power * params.payload_bits / r;
  }
  const double r_bs =
      achievable_rate_from_power(links.bs_power(candidate), params.tx_power, params.bandwidth, params.noise_power);
  s.eps_outer = r_bs > 0 ? params.tx_power * static_cast<double>(members.size()) * params.payload_bits / r_bs : inf;
  s.gamma = s.eps_inner + s.eps_outer;
  return s;
}

void initialize_groups(CellState& cell, const LinkModel& links, const GroupingParams& params, std::uint64_t seed) {
  cell.groups.clear();
  for (auto& u : cell.users) {
    u.group = -1;
    u.is_head = false;
  }
  const int cap = params.capacity();
  for (std::size_t k = 0; k < cell.clusters.size(); ++k) {
    Cluster& cluster = cell.clusters[k];
    cluster.groups.clear();
    const auto& users = cluster.users;
    if (users.empty()) continue;
    Rng rng = make_rng(derive_seed(seed, {tag(Stream::kGrouping), k}));
    std::bernoulli_distribution elect(1.0 / params.group_size);
    std::vector<char> is_head(users.size(), 0);
    std::size_t n_heads = 0;
    for (std::size_t i = 0; i < users.size(); ++i) {
      is_head[i] = elect(rng);
      n_heads += is_head[i];
    }
    auto promote_random = [&] {
      std::uniform_int_distribution<std::size_t> pick(0, users.size() - 1);
      std::size_t i = pick(rng);
      while (is_head[i]) i = (i + 1) % users.size();
      is_head[i] = 1;
      ++n_heads;
    };
    if (n_heads == 0) promote_random();
    while (static_cast<double>(n_heads) * cap < static_cast<double>(users.size())) promote_random();

    std::vector<int> heads;
    for (std::size_t i = 0; i < users.size(); ++i)
      if (is_head[i]) heads.push_back(users[i]);
    const std::vector<int> slot_of = subscribe(users, heads, {}, links, params);

    const int base = static_cast<int>(cell.groups.size());
    for (std::size_t j = 0; j < heads.size(); ++j) {
      Group g;
      g.cluster = static_cast<int>(k);
      g.head = heads[j];
      cell.groups.push_back(g);
      cluster.groups.push_back(base + static_cast<int>(j));
    }
    for (std::size_t i = 0; i < users.size(); ++i) {
      const int gi = base + slot_of[i];
      cell.groups[gi].members.push_back(users[i]);
      cell.users[users[i]].group = gi;
    }
  }
  cell.refresh_heads();
}

RoundStats kmeans_round(CellState& cell, const LinkModel& links, const GroupingParams& params) {
  RoundStats stats;
  for (Cluster& cluster : cell.clusters) {
    if (cluster.groups.empty()) continue;
    const auto& users = cluster.users;
    std::vector<int> heads;
    for (int gi : cluster.groups) heads.push_back(cell.groups[gi].head);

    std::vector<int> slot_by_group(cell.groups.size(), -1);
    for (std::size_t j = 0; j < cluster.groups.size(); ++j) slot_by_group[cluster.groups[j]] = static_cast<int>(j);
    std::vector<int> previous(users.size());
    for (std::size_t i = 0; i < users.size(); ++i) previous[i] = slot_by_group[cell.users[users[i]].group];

    // (a) subscription to the strongest heard head.
    const std::vector<int> slot_of = subscribe(users, heads, previous, links, params);
    for (int gi : cluster.groups) cell.groups[gi].members.clear();
    for (std::size_t i = 0; i < users.size(); ++i) {
      if (slot_of[i] != previous[i]) ++stats.membership_changes;
      const int gi = cluster.groups[slot_of[i]];
      cell.groups[gi].members.push_back(users[i]);
      cell.users[users[i]].group = gi;
    }

    // (b) head re-selection by minimum gamma, ties to the lowest id.
    for (int gi : cluster.groups) {
      Group& g = cell.groups[gi];
      const double current = score_candidate(g.members, g.head, links, params).gamma;
      int best = g.head;
      double best_gamma = current;
      for (int n : g.members) {
        const double gamma = n == g.head ? current : score_candidate(g.members, n, links, params).gamma;
        if (gamma < best_gamma || (gamma == best_gamma && n < best)) {
          best_gamma = gamma;
          best = n;
        }
      }
      stats.gamma_before += current;
      stats.gamma_after += best_gamma;
      if (best != g.head) {
        ++stats.head_changes;
        g.head = best;
      }
    }
  }
  cell.refresh_heads();
  return stats;
}

int run_kmeans(CellState& cell, const LinkModel& links, const GroupingParams& params) {
  int rounds = 0;
  while (rounds < params.max_rounds) {
    const RoundStats s = kmeans_round(cell, links, params);
    ++rounds;
    if (!s.changed()) break;
  }
  return rounds;
}

void singleton_groups(CellState& cell) {
  cell.groups.clear();
  for (Cluster& cluster : cell.clusters) {
    cluster.groups.clear();
    for (int u : cluster.users) {
      Group g;
      g.cluster = cell.users[u].cluster;
      g.head = u;
      g.members = {u};
      cluster.groups.push_back(static_cast<int>(cell.groups.size()));
      cell.users[u].group = static_cast<int>(cell.groups.size());
      cell.groups.push_back(std::move(g));
    }
  }
  cell.refresh_heads();
}

}  // namespace lgra
