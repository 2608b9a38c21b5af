#pragma once

#include <cstdint>
#include <vector>

#include "lgra/channel.hpp"
#include "lgra/config.hpp"

namespace lgra {

struct User {
  int id = 0;
  double distance = 0.0;
  double angle = 0.0;
  double x = 0.0;
  double y = 0.0;
  int cluster = 0;
  int group = -1;  // global group index
  bool is_head = false;
};

struct Group {
  int cluster = 0;
  int head = -1;
  std::vector<int> members;  // sorted user ids, head included
};

struct Cluster {
  Ring ring;
  std::vector<int> users;   // sorted user ids
  std::vector<int> groups;  // global group indices; position = local index m
};

// Static topology of one cell: users, clusters, groups and the large-scale
// channel toward the base station.
struct CellState {
  std::vector<User> users;
  std::vector<Group> groups;
  std::vector<Cluster> clusters;
  std::vector<double> shadow_db;  // per user
  std::vector<double> gain;       // realized large-scale amplitude g
  std::vector<double> mean_gain;  // distance-only amplitude (no shadowing)
  D2dLinks d2d;
  double beta_min = 0.0;  // min g^2 over group heads

  double distance(int a, int b) const;
  int group_count(int cluster) const { return static_cast<int>(clusters[cluster].groups.size()); }
  void refresh_heads();  // recomputes is_head flags and beta_min from groups
};

// Places users, assigns clusters and draws large-scale gains. Groups are not
// formed.
CellState place_users(const ScenarioConfig& config, std::uint64_t seed);

// place_users followed by group formation (initialization and K-means rounds,
// or singleton groups when grouping is disabled).
CellState build_cell(const ScenarioConfig& config, std::uint64_t seed);

// Per-cluster binary activity vectors indexed by local group index.
using Activity = std::vector<std::vector<std::uint8_t>>;

// Each group independently active with probability lambda.
Activity draw_activity(const CellState& cell, double lambda, std::uint64_t seed);

}  // namespace lgra
