#include <doctest.h>

#include <numeric>

#include "lgra/dps.hpp"

using namespace lgra;

namespace {

// Bound growing linearly with the load.
SeSolution linear_bound(int /*cluster*/, int load) {
  SeSolution s;
  s.relaxed = 2.0 * load + 0.5;
  s.L_bound = static_cast<int>(std::ceil(s.relaxed));
  s.dynamic = 2.5 * load;
  s.L_dynamic = static_cast<int>(std::ceil(s.dynamic));
  return s;
}

}  // namespace

TEST_CASE("priority by descending load") {
  const DpsParams p;
  const DpsPlan plan = plan_from_loads({80, 20, 50, 10}, p, linear_bound);
  CHECK(plan.priority == std::vector<int>{0, 2, 1, 3});
  CHECK(plan.lengths[0] == static_cast<int>(std::ceil(1.1 * 161)));
  CHECK(plan.bound[2] == doctest::Approx(100.5));

  const DpsPlan ties = plan_from_loads({30, 30, 30}, p, linear_bound);
  CHECK(ties.priority == std::vector<int>{0, 1, 2});
}

TEST_CASE("zero-load clusters get the minimal length last") {
  const DpsParams p;
  const DpsPlan plan = plan_from_loads({0, 5, 0, 3}, p, linear_bound);
  CHECK(plan.priority == std::vector<int>{1, 3, 0, 2});
  CHECK(plan.lengths[0] == 16);
  CHECK(plan.lengths[2] == 16);
  CHECK(plan.zero_load[0]);
  CHECK_FALSE(plan.zero_load[1]);
  CHECK(plan.bound[0] == 0.0);
}

TEST_CASE("slots are back to back and airtime is conserved") {
  for (int guard : {0, 3}) {
    DpsParams p;
    p.guard = guard;
    const std::vector<int> loads = {12, 40, 7, 0, 25};
    const DpsPlan plan = plan_from_loads(loads, p, linear_bound);
    int t = 0;
    for (std::size_t i = 0; i < plan.priority.size(); ++i) {
      const int k = plan.priority[i];
      CHECK(plan.slot_start[k] == t);
      t += plan.lengths[k] + guard;
    }
    CHECK(plan.total_airtime ==
          std::accumulate(plan.lengths.begin(), plan.lengths.end(), 0) + guard * (static_cast<int>(loads.size()) - 1));
  }
}

TEST_CASE("lengths are monotone in the load") {
  const DpsParams p;
  int prev = 0;
  for (int load = 1; load < 200; load += 7) {
    const int L = plan_from_loads({load}, p, linear_bound).lengths[0];
    CHECK(L >= prev);
    prev = L;
  }
}

TEST_CASE("fixed strategy and dynamic form") {
  DpsParams fixed;
  fixed.strategy = Strategy::kFixed;
  fixed.fixed_length = 64;
  const DpsPlan f = plan_from_loads({10, 0}, fixed, linear_bound);
  CHECK(f.lengths == std::vector<int>{64, 64});
  CHECK(f.bound[0] == doctest::Approx(20.5));
  CHECK(f.zero_load[1]);

  DpsParams dyn;
  dyn.form = BoundForm::kDynamic;
  dyn.safety_factor = 1.0;
  const DpsPlan d = plan_from_loads({10}, dyn, linear_bound);
  CHECK(d.lengths[0] == 25);
  CHECK(d.bound[0] == doctest::Approx(25.0));
}

TEST_CASE("plan serialization") {
  const DpsPlan plan = plan_from_loads({5, 9}, DpsParams{}, linear_bound);
  const std::string expected = "cluster,priority,slot_start,length\n1,0,0," + std::to_string(plan.lengths[1]) +
                               "\n0,1," + std::to_string(plan.lengths[1]) + "," + std::to_string(plan.lengths[0]) +
                               "\n";
  CHECK(plan.serialize() == expected);
}
