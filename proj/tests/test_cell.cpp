#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "lgra/cell.hpp"
#include "lgra/error.hpp"
#include "oracles.hpp"

using namespace lgra;

namespace {

ScenarioConfig small_config() {
  ScenarioConfig c;
  c.n_users = 2000;
  c.kmeans_max_rounds = 2;
  return c;
}

}  // namespace

TEST_CASE("every user lies inside its cluster ring") {
  const ScenarioConfig c = small_config();
  const CellState cell = build_cell(c, 3);
  const auto rings = c.rings();
  std::size_t total = 0;
  for (std::size_t k = 0; k < cell.clusters.size(); ++k) {
    total += cell.clusters[k].users.size();
    for (int u : cell.clusters[k].users) {
      CHECK(cell.users[u].cluster == static_cast<int>(k));
      CHECK(cell.users[u].distance >= rings[k].inner);
      CHECK(cell.users[u].distance < rings[k].outer);
    }
  }
  CHECK(total == static_cast<std::size_t>(c.n_users));
}

TEST_CASE("groups partition the users with exactly one head each") {
  const ScenarioConfig c = small_config();
  const CellState cell = build_cell(c, 5);
  std::vector<int> seen(cell.users.size(), 0);
  for (std::size_t gi = 0; gi < cell.groups.size(); ++gi) {
    const Group& g = cell.groups[gi];
    CHECK(g.members.size() <= static_cast<std::size_t>(c.group_size));
    CHECK(std::is_sorted(g.members.begin(), g.members.end()));
    int heads = 0;
    for (int u : g.members) {
      ++seen[u];
      CHECK(cell.users[u].group == static_cast<int>(gi));
      CHECK(cell.users[u].cluster == g.cluster);
      heads += cell.users[u].is_head ? 1 : 0;
    }
    CHECK(heads == 1);
    CHECK(cell.users[g.head].is_head);
  }
  for (int s : seen) CHECK(s == 1);
  double beta_min = INFINITY;
  for (const Group& g : cell.groups) beta_min = std::min(beta_min, cell.gain[g.head] * cell.gain[g.head]);
  CHECK(cell.beta_min == beta_min);
}

TEST_CASE("same seed gives an identical cell") {
  const ScenarioConfig c = small_config();
  const CellState a = build_cell(c, 9);
  const CellState b = build_cell(c, 9);
  REQUIRE(a.users.size() == b.users.size());
  for (std::size_t i = 0; i < a.users.size(); ++i) {
    CHECK(a.users[i].x == b.users[i].x);
    CHECK(a.users[i].group == b.users[i].group);
    CHECK(a.gain[i] == b.gain[i]);
  }
  REQUIRE(a.groups.size() == b.groups.size());
  for (std::size_t g = 0; g < a.groups.size(); ++g) CHECK(a.groups[g].members == b.groups[g].members);
  const CellState other = build_cell(c, 10);
  CHECK(other.users[0].x != a.users[0].x);
}

TEST_CASE("infeasible and empty configurations are rejected") {
  ScenarioConfig c;
  c.n_users = 0;
  CHECK_THROWS(build_cell(c, 1));

  ScenarioConfig sparse;
  sparse.placement = Placement::kDisc;
  sparse.n_users = 20;
  try {
    build_cell(sparse, 1);
    FAIL("expected an infeasible ring");
  } catch (const InfeasibleError& e) {
    CHECK(std::string(e.what()).find("ring 0") != std::string::npos);
  }
}

TEST_CASE("disc placement is uniform over the area") {
  ScenarioConfig c;
  c.placement = Placement::kDisc;
  c.n_users = 100000;
  const CellState cell = place_users(c, 21);
  std::vector<double> u(cell.users.size());
  const double r2 = c.cell_radius_m * c.cell_radius_m;
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = cell.users[i].distance * cell.users[i].distance / r2;
  // Kolmogorov-Smirnov critical value at the 1% level.
  CHECK(oracle::ks_uniform(u) < 1.628 / std::sqrt(static_cast<double>(u.size())));
  std::size_t total = 0;
  for (const Cluster& k : cell.clusters) total += k.users.size();
  CHECK(total == u.size());
}

TEST_CASE("assignment noise moves only edge users") {
  ScenarioConfig c = small_config();
  c.assignment_noise_m = 10.0;
  const CellState cell = place_users(c, 4);
  const auto rings = c.rings();
  int moved = 0;
  for (const User& u : cell.users) {
    const Ring r = rings[u.cluster];
    if (u.distance < r.inner || u.distance >= r.outer) {
      ++moved;
      CHECK(std::min(std::abs(u.distance - r.inner), std::abs(u.distance - r.outer)) < 80.0);
    }
  }
  CHECK(moved > 0);
}

TEST_CASE("activity draws") {
  ScenarioConfig c;
  c.n_users = 1000;
  c.n_clusters = 1;
  c.grouping = false;
  const CellState cell = build_cell(c, 2);
  REQUIRE(cell.group_count(0) == 1000);

  const Activity none = draw_activity(cell, 0.0, 1);
  const Activity all = draw_activity(cell, 1.0, 1);
  for (auto a : none[0]) CHECK(a == 0);
  for (auto a : all[0]) CHECK(a == 1);
  CHECK(draw_activity(cell, 0.05, 8) == draw_activity(cell, 0.05, 8));

  const int draws = 10000;
  double sum = 0.0;
  for (int t = 0; t < draws; ++t) {
    const auto act = draw_activity(cell, 0.05, 1000 + t);
    sum += std::accumulate(act[0].begin(), act[0].end(), 0.0);
  }
  const double mean = sum / draws;
  const double sd = std::sqrt(1000 * 0.05 * 0.95);
  CHECK(std::abs(mean - 50.0) <= 3.0 * sd);
  CHECK(std::abs(mean - 50.0) <= 4.0 * sd / std::sqrt(static_cast<double>(draws)));
}
