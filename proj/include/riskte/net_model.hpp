#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace riskte {

struct Edge {
  std::string id;
  int src = -1;
  int dst = -1;
  double capacity = 0.0;  // Gbps
};

struct Flow {
  std::string id;
  int src = -1;
  int dst = -1;
  double demand = 0.0;  // Gbps
};

struct Tunnel {
  std::string id;
  int flow = -1;
  std::vector<int> path;  // edge indices, ordered src -> dst
};

// Directed network. Nodes, edges and every derived structure are kept in
// id-sorted order so that index comparisons coincide with lexicographic id
// comparisons and all downstream iteration is input-order independent.
struct Network {
  std::vector<std::string> nodes;
  std::vector<Edge> edges;
  std::unordered_map<std::string, int> node_index;
  std::unordered_map<std::string, int> edge_index;
  std::vector<std::vector<int>> out_edges;  // per node, ascending edge index
  std::vector<std::vector<int>> in_edges;

  int node(const std::string& id) const;
  int edge(const std::string& id) const;
  // Sorts, validates (unique ids, src != dst, capacity > 0) and builds the
  // adjacency index. Must be called after the edge/node lists are filled.
  void finalize();
};

struct Instance {
  Network net;
  std::vector<Flow> flows;      // id-sorted
  std::vector<Tunnel> tunnels;  // id-sorted

  // Derived indexes, built by build_index().
  std::vector<std::vector<int>> edge_tunnels;  // tunnels traversing edge e
  std::vector<std::vector<int>> flow_tunnels;  // candidate tunnels of flow f

  // Slot layout: one slot per (tunnel, edge-on-path) pair, tunnel-major in
  // path order. Reservations, logits and margins are all indexed by slot.
  std::vector<int> slot_offset;  // size T+1, prefix sums of path lengths
  std::vector<int> slot_edge;
  std::vector<int> slot_tunnel;
  std::vector<std::vector<int>> edge_slots;  // per edge, ascending slot

  int num_slots() const { return slot_offset.empty() ? 0 : slot_offset.back(); }
  int slot_of(int tunnel, int edge) const;  // -1 when edge not on the path

  double capacity_max() const;
  double demand_max() const;

  // Validates tunnel/flow invariants and rebuilds all derived indexes.
  void build_index();
};

// JSON instance file: nodes, edges ({id, src, dst, capacity[, undirected]}),
// flows ({id, src, dst, demand}), optional tunnels ({id, flow, edges}).
// When tunnels are absent they are generated with k-shortest paths using the
// file's "k_sp" field (default 3).
Instance load_instance(const std::string& path);
Instance parse_instance(const std::string& json_text);
void save_instance(const Instance& inst, const std::string& path);

// Up to k_sp loop-free shortest paths per flow by hop count (Yen), ties
// broken by lexicographic edge-id sequence. Throws when a flow has no path.
std::vector<Tunnel> generate_tunnels(const Network& net,
                                     const std::vector<Flow>& flows, int k_sp);

const std::vector<int>& tunnels_on_edge(const Instance& inst,
                                        const std::string& edge_id);

// Synthetic topologies for desk-scale experiments. All emit directed edges.
Network make_complete_graph(int n, double capacity);
Network make_ring_with_chords(int n, int n_chords, double cap_lo,
                              double cap_hi, std::uint64_t seed);
Network make_grid_graph(int rows, int cols, double capacity);

}  // namespace riskte
