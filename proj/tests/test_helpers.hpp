#pragma once

#include <string>

#include "riskte/net_model.hpp"
#include "riskte/scenario.hpp"

namespace riskte_test {

inline std::string fixture(const std::string& name) {
  return std::string(RISKTE_FIXTURE_DIR) + "/" + name;
}

inline riskte::Instance relay4() {
  return riskte::load_instance(fixture("relay4.json"));
}

inline riskte::ScenarioSet relay4_scenarios(const riskte::Instance& inst) {
  return riskte::load_scenarios(fixture("relay4_scenarios.json"), inst);
}

inline riskte::Instance desk6() {
  return riskte::load_instance(fixture("desk6.json"));
}

inline riskte::ScenarioSet desk6_scenarios(const riskte::Instance& inst) {
  return riskte::load_scenarios(fixture("desk6_scenarios.json"), inst);
}

// 3 nodes, one contested edge; small enough for finite-difference sweeps.
inline riskte::Instance tri3() {
  return riskte::parse_instance(R"({
    "nodes": ["a", "b", "c"],
    "edges": [
      {"id": "e_ab", "src": "a", "dst": "b", "capacity": 8.0},
      {"id": "e_ac", "src": "a", "dst": "c", "capacity": 6.0},
      {"id": "e_bc", "src": "b", "dst": "c", "capacity": 7.0}
    ],
    "flows": [
      {"id": "f_ac", "src": "a", "dst": "c", "demand": 10.0},
      {"id": "f_bc", "src": "b", "dst": "c", "demand": 8.0}
    ],
    "tunnels": [
      {"id": "t_ac_direct", "flow": "f_ac", "edges": ["e_ac"]},
      {"id": "t_ac_via_b", "flow": "f_ac", "edges": ["e_ab", "e_bc"]},
      {"id": "t_bc_direct", "flow": "f_bc", "edges": ["e_bc"]}
    ]
  })");
}

inline riskte::ScenarioSet tri3_scenarios(const riskte::Instance& inst) {
  return riskte::parse_scenarios(R"({
    "scenarios": [
      {"id": 0, "failed_edges": [], "prob": 0.90},
      {"id": 1, "failed_edges": ["e_ac"], "prob": 0.07},
      {"id": 2, "failed_edges": ["e_bc"], "prob": 0.03}
    ]
  })", inst);
}

}  // namespace riskte_test
