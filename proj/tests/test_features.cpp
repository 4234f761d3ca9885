#include "doctest.h"

#include <cmath>

#include "riskte/features.hpp"
#include "riskte/rng.hpp"
#include "test_helpers.hpp"

using namespace riskte;
using riskte_test::fixture;

namespace {

struct Snapshot {
  Reservation y;
  AllocationResult rec;
  std::vector<double> margins;
  LossTable losses;
};

Snapshot snapshot(const Instance& inst, const ScenarioSet& set,
                  const LatentState& state) {
  Snapshot s;
  s.y = project_gated(inst, state);
  s.rec = recover_allocation(inst, s.y);
  s.margins = bottleneck_margin(inst, s.y, s.rec);
  s.losses = compute_losses(inst, s.rec.alloc, set);
  return s;
}

}  // namespace

TEST_CASE("nominal scenario with zero allocation: full survival, full loss") {
  Instance inst = riskte_test::relay4();
  ScenarioSet set = riskte_test::relay4_scenarios(inst);
  Reservation y;
  y.y.assign(inst.num_slots(), 0.0);  // degenerate: nothing reserved
  AllocationResult rec = recover_allocation(inst, y);
  auto margins = bottleneck_margin(inst, y, rec);
  LossTable losses = compute_losses(inst, rec.alloc, set);
  std::vector<double> out;
  extract_features(inst, y, rec, margins, losses, set, set.nominal,
                   FeatureNorms::of(inst), out);
  for (int s = 0; s < inst.num_slots(); ++s) {
    CHECK(out[s * kFeatureDim + 0] == 1.0);  // alpha
    CHECK(out[s * kFeatureDim + 1] == 1.0);  // flow loss
    CHECK(out[s * kFeatureDim + 2] == 1.0);  // scenario loss
  }
}

TEST_CASE("broken tunnels report alpha = 0 regardless of reservations") {
  Instance inst = riskte_test::relay4();
  ScenarioSet set = riskte_test::relay4_scenarios(inst);
  Snapshot s = snapshot(inst, set, LatentState::zeros(inst));
  int e_s1d = inst.net.edge("e_s1d");
  int q_f1 = -1;
  for (int q = 0; q < set.size(); ++q)
    if (set.scenarios[q].failed == std::vector<int>{e_s1d}) q_f1 = q;
  REQUIRE(q_f1 >= 0);
  std::vector<double> out;
  extract_features(inst, s.y, s.rec, s.margins, s.losses, set, q_f1,
                   FeatureNorms::of(inst), out);
  for (int slot = 0; slot < inst.num_slots(); ++slot) {
    int t = inst.slot_tunnel[slot];
    double expected = set.survives(t, q_f1) ? 1.0 : 0.0;
    CHECK(out[slot * kFeatureDim + 0] == expected);
  }
}

TEST_CASE("direct-heavy state under the single-failure scenario by hand") {
  Instance inst = riskte_test::relay4();
  ScenarioSet set = riskte_test::relay4_scenarios(inst);
  // Encode the direct-heavy decision as reservations (relay split 2/3 : 1/3).
  LatentState state = LatentState::zeros(inst);
  int e_md = inst.net.edge("e_md");
  for (int s : inst.edge_slots[e_md])
    if (inst.tunnels[inst.slot_tunnel[s]].id == "t_s1_via_m")
      state.z[s] = std::log(2.0);
  Snapshot snap = snapshot(inst, set, state);

  int e_s1d = inst.net.edge("e_s1d");
  int q_f1 = -1;
  for (int q = 0; q < set.size(); ++q)
    if (set.scenarios[q].failed == std::vector<int>{e_s1d}) q_f1 = q;
  std::vector<double> out;
  extract_features(inst, snap.y, snap.rec, snap.margins, snap.losses, set, q_f1,
                   FeatureNorms::of(inst), out);
  // the direct tunnel of the first flow: alpha 0; only the 5G relay share
  // survives, so the flow loss is 1 - 5/15
  int slot = inst.slot_offset[0];
  REQUIRE(inst.tunnels[0].id == "t_s1_direct");
  CHECK(out[slot * kFeatureDim + 0] == 0.0);
  CHECK(out[slot * kFeatureDim + 1] ==
        doctest::Approx(1.0 - 5.0 / 15.0).epsilon(1e-9));
  CHECK(out[slot * kFeatureDim + 3] == doctest::Approx(10.0 / 15.0));
  CHECK(out[slot * kFeatureDim + 5] == 1.0);  // cap 10 / max cap 10
  CHECK(out[slot * kFeatureDim + 6] == 1.0);  // demand 15 / max demand 15
}

TEST_CASE("feature tuples depend on the scenario only through alpha and loss") {
  Instance inst = riskte_test::desk6();
  ScenarioSet set = riskte_test::desk6_scenarios(inst);
  Rng rng(8);
  LatentState state = LatentState::zeros(inst);
  for (double& z : state.z) z = rng.uniform(-1.0, 1.0);
  Snapshot snap = snapshot(inst, set, state);
  std::vector<double> a, b;
  FeatureNorms norms = FeatureNorms::of(inst);
  for (int q = 0; q < set.size(); ++q) {
    extract_features(inst, snap.y, snap.rec, snap.margins, snap.losses, set, q,
                     norms, a);
    if (q == 0) {
      b = a;
      continue;
    }
    for (int s = 0; s < inst.num_slots(); ++s)
      for (int d : {3, 4, 5, 6, 7})  // x, margin, norms, y: scenario-free
        CHECK(a[s * kFeatureDim + d] == b[s * kFeatureDim + d]);
  }
}

TEST_CASE("joint rescaling of capacities and demands scales only the margin") {
  Instance inst = riskte_test::desk6();
  ScenarioSet set = riskte_test::desk6_scenarios(inst);
  Rng rng(9);
  LatentState state = LatentState::zeros(inst);
  for (double& z : state.z) z = rng.uniform(-1.5, 1.5);
  for (double& w : state.w) w = rng.uniform(-1.5, 1.5);

  const double scale = 3.25;
  Instance scaled = inst;
  for (Edge& e : scaled.net.edges) e.capacity *= scale;
  for (Flow& f : scaled.flows) f.demand *= scale;
  scaled.build_index();
  ScenarioSet scaled_set = riskte_test::desk6_scenarios(scaled);

  Snapshot base = snapshot(inst, set, state);
  Snapshot big = snapshot(scaled, scaled_set, state);
  FeatureNorms n0 = FeatureNorms::of(inst), n1 = FeatureNorms::of(scaled);
  std::vector<double> f0, f1;
  for (int q = 0; q < set.size(); ++q) {
    extract_features(inst, base.y, base.rec, base.margins, base.losses, set, q,
                     n0, f0);
    extract_features(scaled, big.y, big.rec, big.margins, big.losses,
                     scaled_set, q, n1, f1);
    for (int s = 0; s < inst.num_slots(); ++s) {
      for (int d : {0, 1, 2, 3, 5, 6, 7})
        CHECK(f1[s * kFeatureDim + d] ==
              doctest::Approx(f0[s * kFeatureDim + d]).epsilon(1e-12));
      CHECK(f1[s * kFeatureDim + 4] ==
            doctest::Approx(scale * f0[s * kFeatureDim + 4]).epsilon(1e-12));
    }
  }
}

TEST_CASE("margin feature is zero at each tunnel's bottleneck slot") {
  Instance inst = riskte_test::desk6();
  ScenarioSet set = riskte_test::desk6_scenarios(inst);
  Snapshot snap = snapshot(inst, set, LatentState::zeros(inst));
  std::vector<double> out;
  extract_features(inst, snap.y, snap.rec, snap.margins, snap.losses, set, 0,
                   FeatureNorms::of(inst), out);
  for (std::size_t t = 0; t < inst.tunnels.size(); ++t)
    CHECK(out[snap.rec.bottleneck_slot[t] * kFeatureDim + 4] == 0.0);
}

TEST_CASE("all-zero demands give zero normalized demand") {
  Instance inst = riskte_test::relay4();
  for (Flow& f : inst.flows) f.demand = 0.0;
  inst.build_index();
  ScenarioSet set = riskte_test::relay4_scenarios(inst);
  Snapshot snap = snapshot(inst, set, LatentState::zeros(inst));
  std::vector<double> out;
  extract_features(inst, snap.y, snap.rec, snap.margins, snap.losses, set, 0,
                   FeatureNorms::of(inst), out);
  for (int s = 0; s < inst.num_slots(); ++s)
    CHECK(out[s * kFeatureDim + 6] == 0.0);
}

TEST_CASE("scaled-variant tuples carry the 5 reservation-free features") {
  Instance inst = riskte_test::tri3();
  ScenarioSet set = riskte_test::tri3_scenarios(inst);
  Allocation alloc;
  alloc.x = {0.5, 0.25, 0.75};
  LossTable losses = compute_losses(inst, alloc, set);
  std::vector<double> out;
  extract_features_scaled(inst, alloc, losses, set, 0, FeatureNorms::of(inst),
                          out);
  REQUIRE(out.size() == inst.tunnels.size() * kFeatureDimScaled);
  for (std::size_t t = 0; t < inst.tunnels.size(); ++t) {
    CHECK(out[t * kFeatureDimScaled + 0] == 1.0);
    CHECK(out[t * kFeatureDimScaled + 3] == alloc.x[t]);
    CHECK(out[t * kFeatureDimScaled + 4] ==
          doctest::Approx(inst.flows[inst.tunnels[t].flow].demand / 10.0));
  }
}
