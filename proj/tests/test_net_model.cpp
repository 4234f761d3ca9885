#include "doctest.h"

#include <stdexcept>

#include <set>

#include "riskte/net_model.hpp"
#include "test_helpers.hpp"

using namespace riskte;
using riskte_test::fixture;

TEST_CASE("relay example loads with the expected shape") {
  Instance inst = riskte_test::relay4();
  CHECK(inst.flows.size() == 2);
  CHECK(inst.tunnels.size() == 4);
  CHECK(inst.net.edges.size() == 5);
  CHECK(inst.num_slots() == 6);  // two 1-hop + two 2-hop tunnels
}

TEST_CASE("empty flow list is a valid instance") {
  Instance inst = parse_instance(R"({
    "nodes": ["a", "b"],
    "edges": [{"id": "e1", "src": "a", "dst": "b", "capacity": 1.0}],
    "flows": []
  })");
  CHECK(inst.flows.empty());
  CHECK(inst.tunnels.empty());
}

TEST_CASE("dangling edge reference is rejected") {
  CHECK_THROWS_WITH_AS(parse_instance(R"({
    "nodes": ["a", "b"],
    "edges": [{"id": "e1", "src": "a", "dst": "b", "capacity": 1.0}],
    "flows": [{"id": "f", "src": "a", "dst": "b", "demand": 1.0}],
    "tunnels": [{"id": "t", "flow": "f", "edges": ["nope"]}]
  })"),
                       doctest::Contains("unknown edge"), std::runtime_error);
}

TEST_CASE("validation rejects bad inputs") {
  CHECK_THROWS(parse_instance(R"({
    "nodes": ["a", "b"],
    "edges": [{"id": "e1", "src": "a", "dst": "b", "capacity": -2.0}],
    "flows": []
  })"));
  CHECK_THROWS(parse_instance(R"({
    "nodes": ["a", "b"],
    "edges": [{"id": "e1", "src": "a", "dst": "b", "capacity": 1.0},
              {"id": "e1", "src": "b", "dst": "a", "capacity": 1.0}],
    "flows": []
  })"));
  // duplicate (src, dst) pair across flows
  CHECK_THROWS(parse_instance(R"({
    "nodes": ["a", "b"],
    "edges": [{"id": "e1", "src": "a", "dst": "b", "capacity": 1.0}],
    "flows": [{"id": "f1", "src": "a", "dst": "b", "demand": 1.0},
              {"id": "f2", "src": "a", "dst": "b", "demand": 2.0}]
  })"));
}

TEST_CASE("undirected edges expand to both directions with the same capacity") {
  Instance inst = parse_instance(R"({
    "nodes": ["a", "b"],
    "edges": [{"id": "e1", "src": "a", "dst": "b", "capacity": 3.5,
               "undirected": true}],
    "flows": []
  })");
  CHECK(inst.net.edges.size() == 2);
  CHECK(inst.net.edges[0].capacity == 3.5);
  CHECK(inst.net.edges[1].capacity == 3.5);
  CHECK(inst.net.edges[0].src != inst.net.edges[1].src);
}

TEST_CASE("tunnels_on_edge matches tunnel paths exactly") {
  Instance inst = riskte_test::relay4();
  const auto& on_md = tunnels_on_edge(inst, "e_md");
  REQUIRE(on_md.size() == 2);
  for (int t : on_md) {
    bool found = false;
    for (int ei : inst.tunnels[t].path)
      found = found || inst.net.edges[ei].id == "e_md";
    CHECK(found);
  }
  // the relay edge carries exactly the two indirect tunnels
  std::set<std::string> ids;
  for (int t : on_md) ids.insert(inst.tunnels[t].id);
  CHECK(ids == std::set<std::string>{"t_s1_via_m", "t_s2_via_m"});
  CHECK_THROWS(tunnels_on_edge(inst, "e_missing"));
}

TEST_CASE("every (edge, tunnel) incidence is consistent both ways") {
  Instance inst = riskte_test::desk6();
  for (int e = 0; e < static_cast<int>(inst.net.edges.size()); ++e) {
    for (int t = 0; t < static_cast<int>(inst.tunnels.size()); ++t) {
      bool on_path = false;
      for (int ei : inst.tunnels[t].path) on_path = on_path || ei == e;
      bool indexed = false;
      for (int ti : inst.edge_tunnels[e]) indexed = indexed || ti == t;
      CHECK(on_path == indexed);
    }
  }
}

TEST_CASE("ksp on a complete graph yields k paths per ordered pair") {
  for (int n : {4, 6, 12}) {
    Network net = make_complete_graph(n, 10.0);
    std::vector<Flow> flows;
    for (int s = 0; s < n; ++s)
      for (int d = 0; d < n; ++d) {
        if (s == d) continue;
        Flow f;
        f.id = "f" + std::to_string(s) + "_" + std::to_string(d);
        f.src = s;
        f.dst = d;
        f.demand = 1.0;
        flows.push_back(f);
      }
    auto tunnels = generate_tunnels(net, flows, 3);
    CHECK(static_cast<int>(tunnels.size()) == 3 * n * (n - 1));
  }
}

TEST_CASE("ksp on a 22-node complete graph matches the closed form") {
  Network net = make_complete_graph(22, 10.0);
  std::vector<Flow> flows;
  for (int s = 0; s < 22; ++s)
    for (int d = 0; d < 22; ++d) {
      if (s == d) continue;
      Flow f;
      f.id = "f" + std::to_string(s) + "_" + std::to_string(d);
      f.src = s;
      f.dst = d;
      f.demand = 1.0;
      flows.push_back(f);
    }
  auto tunnels = generate_tunnels(net, flows, 3);
  CHECK(tunnels.size() == 1386);
}

TEST_CASE("two-node graph admits exactly one path") {
  Network net;
  net.nodes = {"a", "b"};
  Edge e;
  e.id = "e1";
  e.src = 0;
  e.dst = 1;
  e.capacity = 1.0;
  net.edges = {e};
  net.finalize();
  Flow f;
  f.id = "f";
  f.src = net.node("a");
  f.dst = net.node("b");
  f.demand = 1.0;
  auto tunnels = generate_tunnels(net, {f}, 3);
  CHECK(tunnels.size() == 1);
  CHECK(tunnels[0].path.size() == 1);
}

TEST_CASE("ksp fails loudly when a flow has no path") {
  Network net;
  net.nodes = {"a", "b", "c"};
  Edge e;
  e.id = "e1";
  e.src = 0;
  e.dst = 1;
  e.capacity = 1.0;
  net.edges = {e};
  net.finalize();
  Flow f;
  f.id = "f_stranded";
  f.src = net.node("a");
  f.dst = net.node("c");
  f.demand = 1.0;
  CHECK_THROWS_WITH_AS(generate_tunnels(net, {f}, 2),
                       doctest::Contains("f_stranded"), std::runtime_error);
}

TEST_CASE("ksp is deterministic and hop-ordered") {
  Network net = make_ring_with_chords(8, 4, 5.0, 20.0, 42);
  std::vector<Flow> flows;
  Flow f;
  f.id = "f";
  f.src = 0;
  f.dst = 4;
  f.demand = 1.0;
  flows.push_back(f);
  auto a = generate_tunnels(net, flows, 4);
  auto b = generate_tunnels(net, flows, 4);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].path == b[i].path);
  for (std::size_t i = 1; i < a.size(); ++i)
    CHECK(a[i - 1].path.size() <= a[i].path.size());
  // loop-free: no repeated node on any path
  for (const auto& t : a) {
    std::set<int> nodes;
    nodes.insert(net.edges[t.path.front()].src);
    for (int ei : t.path) CHECK(nodes.insert(net.edges[ei].dst).second);
  }
}

TEST_CASE("instance save/load round-trip preserves structure") {
  Instance inst = riskte_test::desk6();
  std::string tmp = "/tmp/riskte_roundtrip_instance.json";
  save_instance(inst, tmp);
  Instance back = load_instance(tmp);
  CHECK(back.flows.size() == inst.flows.size());
  CHECK(back.tunnels.size() == inst.tunnels.size());
  CHECK(back.net.edges.size() == inst.net.edges.size());
  for (std::size_t t = 0; t < inst.tunnels.size(); ++t)
    CHECK(back.tunnels[t].path == inst.tunnels[t].path);
}
