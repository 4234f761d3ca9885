#include "riskte/net_model.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

#include "riskte/rng.hpp"
#include "json.hpp"

namespace riskte {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

}  // namespace

int Network::node(const std::string& id) const {
  auto it = node_index.find(id);
  if (it == node_index.end()) fail("unknown node id: " + id);
  return it->second;
}

int Network::edge(const std::string& id) const {
  auto it = edge_index.find(id);
  if (it == edge_index.end()) fail("unknown edge id: " + id);
  return it->second;
}

void Network::finalize() {
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  node_index.clear();
  for (int i = 0; i < static_cast<int>(nodes.size()); ++i) node_index[nodes[i]] = i;

  std::sort(edges.begin(), edges.end(),
            [](const Edge& a, const Edge& b) { return a.id < b.id; });
  edge_index.clear();
  for (int i = 0; i < static_cast<int>(edges.size()); ++i) {
    const Edge& e = edges[i];
    if (!edge_index.emplace(e.id, i).second) fail("duplicate edge id: " + e.id);
    if (e.src < 0 || e.src >= static_cast<int>(nodes.size()) || e.dst < 0 ||
        e.dst >= static_cast<int>(nodes.size()))
      fail("edge " + e.id + " references an unknown node");
    if (e.src == e.dst) fail("edge " + e.id + " is a self loop");
    if (!(e.capacity > 0.0)) fail("edge " + e.id + " has non-positive capacity");
  }

  out_edges.assign(nodes.size(), {});
  in_edges.assign(nodes.size(), {});
  for (int i = 0; i < static_cast<int>(edges.size()); ++i) {
    out_edges[edges[i].src].push_back(i);
    in_edges[edges[i].dst].push_back(i);
  }
}

int Instance::slot_of(int tunnel, int edge) const {
  for (int s = slot_offset[tunnel]; s < slot_offset[tunnel + 1]; ++s)
    if (slot_edge[s] == edge) return s;
  return -1;
}

double Instance::capacity_max() const {
  double m = 0.0;
  for (const Edge& e : net.edges) m = std::max(m, e.capacity);
  return m;
}

double Instance::demand_max() const {
  double m = 0.0;
  for (const Flow& f : flows) m = std::max(m, f.demand);
  return m;
}

void Instance::build_index() {
  std::sort(flows.begin(), flows.end(),
            [](const Flow& a, const Flow& b) { return a.id < b.id; });
  std::set<std::pair<int, int>> pairs;
  std::set<std::string> flow_ids;
  for (const Flow& f : flows) {
    if (!flow_ids.insert(f.id).second) fail("duplicate flow id: " + f.id);
    if (f.src == f.dst) fail("flow " + f.id + " has identical endpoints");
    if (!pairs.insert({f.src, f.dst}).second)
      fail("duplicate flow pair for flow " + f.id);
    if (f.demand < 0.0) fail("flow " + f.id + " has negative demand");
  }

  std::sort(tunnels.begin(), tunnels.end(),
            [](const Tunnel& a, const Tunnel& b) { return a.id < b.id; });
  std::set<std::string> tunnel_ids;
  for (const Tunnel& t : tunnels) {
    if (!tunnel_ids.insert(t.id).second) fail("duplicate tunnel id: " + t.id);
    if (t.flow < 0 || t.flow >= static_cast<int>(flows.size()))
      fail("tunnel " + t.id + " references an unknown flow");
    if (t.path.empty()) fail("tunnel " + t.id + " has an empty path");
    const Flow& f = flows[t.flow];
    std::set<int> seen_nodes;
    int at = f.src;
    for (int ei : t.path) {
      if (ei < 0 || ei >= static_cast<int>(net.edges.size()))
        fail("tunnel " + t.id + " references an unknown edge");
      const Edge& e = net.edges[ei];
      if (e.src != at) fail("tunnel " + t.id + " path is not connected");
      if (!seen_nodes.insert(e.src).second)
        fail("tunnel " + t.id + " path has a cycle");
      at = e.dst;
    }
    if (at != f.dst) fail("tunnel " + t.id + " does not end at the flow dst");
  }

  edge_tunnels.assign(net.edges.size(), {});
  flow_tunnels.assign(flows.size(), {});
  slot_offset.assign(tunnels.size() + 1, 0);
  slot_edge.clear();
  slot_tunnel.clear();
  for (int ti = 0; ti < static_cast<int>(tunnels.size()); ++ti) {
    const Tunnel& t = tunnels[ti];
    flow_tunnels[t.flow].push_back(ti);
    for (int ei : t.path) {
      edge_tunnels[ei].push_back(ti);
      slot_edge.push_back(ei);
      slot_tunnel.push_back(ti);
    }
    slot_offset[ti + 1] = static_cast<int>(slot_edge.size());
  }
  edge_slots.assign(net.edges.size(), {});
  for (int s = 0; s < static_cast<int>(slot_edge.size()); ++s)
    edge_slots[slot_edge[s]].push_back(s);
}

const std::vector<int>& tunnels_on_edge(const Instance& inst,
                                        const std::string& edge_id) {
  return inst.edge_tunnels[inst.net.edge(edge_id)];
}

// ---------------------------------------------------------------------------
// K shortest paths
// ---------------------------------------------------------------------------

namespace {

// Lexicographically-smallest shortest path src -> dst by hop count, on the
// graph minus banned edges/nodes. Edge indices are id-sorted, so choosing the
// smallest feasible edge index greedily yields the lex-smallest sequence.
std::vector<int> lex_shortest_path(const Network& net, int src, int dst,
                                   const std::vector<char>& edge_banned,
                                   const std::vector<char>& node_banned) {
  const int n = static_cast<int>(net.nodes.size());
  std::vector<int> dist(n, -1);
  std::queue<int> bfs;
  if (!node_banned[dst]) {
    dist[dst] = 0;
    bfs.push(dst);
  }
  while (!bfs.empty()) {
    int v = bfs.front();
    bfs.pop();
    for (int ei : net.in_edges[v]) {
      if (edge_banned[ei]) continue;
      int u = net.edges[ei].src;
      if (node_banned[u] || dist[u] >= 0) continue;
      dist[u] = dist[v] + 1;
      bfs.push(u);
    }
  }
  if (node_banned[src] || dist[src] < 0) return {};
  std::vector<int> path;
  int at = src;
  while (at != dst) {
    int chosen = -1;
    for (int ei : net.out_edges[at]) {  // ascending edge index
      if (edge_banned[ei]) continue;
      int v = net.edges[ei].dst;
      if (node_banned[v] && v != dst) continue;
      if (dist[v] == dist[at] - 1) {
        chosen = ei;
        break;
      }
    }
    if (chosen < 0) return {};  // disconnected under bans
    path.push_back(chosen);
    at = net.edges[chosen].dst;
  }
  return path;
}

struct PathLess {
  bool operator()(const std::vector<int>& a, const std::vector<int>& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  }
};

// Yen's algorithm under the (hop count, lex edge sequence) order.
std::vector<std::vector<int>> yen_ksp(const Network& net, int src, int dst,
                                      int k) {
  std::vector<std::vector<int>> found;
  std::vector<char> no_edge(net.edges.size(), 0), no_node(net.nodes.size(), 0);
  std::vector<int> first = lex_shortest_path(net, src, dst, no_edge, no_node);
  if (first.empty()) return found;
  found.push_back(first);

  std::set<std::vector<int>, PathLess> candidates;
  while (static_cast<int>(found.size()) < k) {
    const std::vector<int>& prev = found.back();
    for (std::size_t i = 0; i < prev.size(); ++i) {
      std::vector<int> root(prev.begin(), prev.begin() + i);
      int spur = (i == 0) ? src : net.edges[prev[i - 1]].dst;

      std::vector<char> edge_banned(net.edges.size(), 0);
      std::vector<char> node_banned(net.nodes.size(), 0);
      for (const auto& p : found) {
        if (p.size() >= i &&
            std::equal(root.begin(), root.end(), p.begin()) && p.size() > i)
          edge_banned[p[i]] = 1;
      }
      for (const auto& p : candidates) {
        if (p.size() > i && std::equal(root.begin(), root.end(), p.begin()))
          edge_banned[p[i]] = 1;
      }
      int at = src;
      for (std::size_t j = 0; j < i; ++j) {
        node_banned[at] = 1;
        at = net.edges[root[j]].dst;
      }

      std::vector<int> spur_path =
          lex_shortest_path(net, spur, dst, edge_banned, node_banned);
      if (spur_path.empty()) continue;
      root.insert(root.end(), spur_path.begin(), spur_path.end());
      candidates.insert(std::move(root));
    }
    if (candidates.empty()) break;
    found.push_back(*candidates.begin());
    candidates.erase(candidates.begin());
  }
  return found;
}

}  // namespace

std::vector<Tunnel> generate_tunnels(const Network& net,
                                     const std::vector<Flow>& flows, int k_sp) {
  if (k_sp < 1) fail("k_sp must be positive");
  std::vector<Flow> ordered = flows;
  std::sort(ordered.begin(), ordered.end(),
            [](const Flow& a, const Flow& b) { return a.id < b.id; });
  std::vector<Tunnel> out;
  for (std::size_t fi = 0; fi < ordered.size(); ++fi) {
    const Flow& f = ordered[fi];
    auto paths = yen_ksp(net, f.src, f.dst, k_sp);
    if (paths.empty()) fail("no path exists for flow " + f.id);
    for (std::size_t p = 0; p < paths.size(); ++p) {
      Tunnel t;
      t.id = "t_" + f.id + "_" + std::to_string(p);
      t.flow = static_cast<int>(fi);
      t.path = paths[p];
      out.push_back(std::move(t));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// File I/O
// ---------------------------------------------------------------------------

namespace {

Instance instance_from_json(const json& j) {
  Instance inst;
  for (const auto& n : j.at("nodes")) inst.net.nodes.push_back(n.get<std::string>());
  // Node index is needed before finalize() to resolve edge endpoints; build a
  // temporary name->position map on the sorted list.
  std::vector<std::string> sorted_nodes = inst.net.nodes;
  std::sort(sorted_nodes.begin(), sorted_nodes.end());
  std::unordered_map<std::string, int> nidx;
  for (int i = 0; i < static_cast<int>(sorted_nodes.size()); ++i)
    if (!nidx.emplace(sorted_nodes[i], i).second)
      fail("duplicate node id: " + sorted_nodes[i]);
  auto node_of = [&](const json& v, const char* what) {
    auto it = nidx.find(v.get<std::string>());
    if (it == nidx.end())
      fail(std::string(what) + " references unknown node " + v.get<std::string>());
    return it->second;
  };

  for (const auto& je : j.at("edges")) {
    Edge e;
    e.id = je.at("id").get<std::string>();
    e.src = node_of(je.at("src"), "edge");
    e.dst = node_of(je.at("dst"), "edge");
    e.capacity = je.at("capacity").get<double>();
    if (je.value("undirected", false)) {
      Edge rev;
      rev.id = e.id + "__rev";
      rev.src = e.dst;
      rev.dst = e.src;
      rev.capacity = e.capacity;  // same value, not a shared pool
      inst.net.edges.push_back(rev);
    }
    inst.net.edges.push_back(std::move(e));
  }
  inst.net.finalize();

  for (const auto& jf : j.at("flows")) {
    Flow f;
    f.id = jf.at("id").get<std::string>();
    f.src = node_of(jf.at("src"), "flow");
    f.dst = node_of(jf.at("dst"), "flow");
    f.demand = jf.at("demand").get<double>();
    inst.flows.push_back(std::move(f));
  }
  std::sort(inst.flows.begin(), inst.flows.end(),
            [](const Flow& a, const Flow& b) { return a.id < b.id; });

  if (j.contains("tunnels")) {
    std::unordered_map<std::string, int> fidx;
    for (int i = 0; i < static_cast<int>(inst.flows.size()); ++i)
      fidx[inst.flows[i].id] = i;
    for (const auto& jt : j.at("tunnels")) {
      Tunnel t;
      t.id = jt.at("id").get<std::string>();
      auto it = fidx.find(jt.at("flow").get<std::string>());
      if (it == fidx.end())
        fail("tunnel " + t.id + " references unknown flow " +
             jt.at("flow").get<std::string>());
      t.flow = it->second;
      for (const auto& je : jt.at("edges"))
        t.path.push_back(inst.net.edge(je.get<std::string>()));
      inst.tunnels.push_back(std::move(t));
    }
  } else if (!inst.flows.empty()) {
    inst.tunnels = generate_tunnels(inst.net, inst.flows, j.value("k_sp", 3));
  }
  inst.build_index();
  return inst;
}

}  // namespace

Instance parse_instance(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    fail(std::string("instance parse error: ") + e.what());
  }
  return instance_from_json(j);
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open instance file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_instance(ss.str());
  } catch (const std::runtime_error& e) {
    fail(path + ": " + e.what());
  }
}

void save_instance(const Instance& inst, const std::string& path) {
  json j;
  j["nodes"] = inst.net.nodes;
  j["edges"] = json::array();
  for (const Edge& e : inst.net.edges)
    j["edges"].push_back({{"id", e.id},
                          {"src", inst.net.nodes[e.src]},
                          {"dst", inst.net.nodes[e.dst]},
                          {"capacity", e.capacity}});
  j["flows"] = json::array();
  for (const Flow& f : inst.flows)
    j["flows"].push_back({{"id", f.id},
                          {"src", inst.net.nodes[f.src]},
                          {"dst", inst.net.nodes[f.dst]},
                          {"demand", f.demand}});
  j["tunnels"] = json::array();
  for (const Tunnel& t : inst.tunnels) {
    json edges = json::array();
    for (int ei : t.path) edges.push_back(inst.net.edges[ei].id);
    j["tunnels"].push_back(
        {{"id", t.id}, {"flow", inst.flows[t.flow].id}, {"edges", edges}});
  }
  std::ofstream out(path);
  if (!out) fail("cannot write instance file: " + path);
  out << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Synthetic topologies
// ---------------------------------------------------------------------------

namespace {

std::string node_name(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "n%02d", i);
  return buf;
}

Edge directed_edge(int a, int b, double cap) {
  Edge e;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "e_%02d_%02d", a, b);
  e.id = buf;
  e.src = a;
  e.dst = b;
  e.capacity = cap;
  return e;
}

}  // namespace

Network make_complete_graph(int n, double capacity) {
  Network net;
  for (int i = 0; i < n; ++i) net.nodes.push_back(node_name(i));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (a != b) net.edges.push_back(directed_edge(a, b, capacity));
  net.finalize();
  return net;
}

Network make_ring_with_chords(int n, int n_chords, double cap_lo,
                              double cap_hi, std::uint64_t seed) {
  Network net;
  for (int i = 0; i < n; ++i) net.nodes.push_back(node_name(i));
  Rng rng(seed);
  std::set<std::pair<int, int>> used;
  auto add_pair = [&](int a, int b) {
    if (a == b || !used.insert({a, b}).second) return;
    used.insert({b, a});
    double cap = rng.uniform(cap_lo, cap_hi);
    net.edges.push_back(directed_edge(a, b, cap));
    net.edges.push_back(directed_edge(b, a, cap));
  };
  for (int i = 0; i < n; ++i) add_pair(i, (i + 1) % n);
  int attempts = 0;
  for (int c = 0; c < n_chords && attempts < 100 * (n_chords + 1); ++attempts) {
    int a = static_cast<int>(rng.below(n));
    int b = static_cast<int>(rng.below(n));
    if (a == b || used.count({a, b})) continue;
    add_pair(a, b);
    ++c;
  }
  net.finalize();
  return net;
}

Network make_grid_graph(int rows, int cols, double capacity) {
  Network net;
  for (int i = 0; i < rows * cols; ++i) net.nodes.push_back(node_name(i));
  auto at = [cols](int r, int c) { return r * cols + c; };
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) {
        net.edges.push_back(directed_edge(at(r, c), at(r, c + 1), capacity));
        net.edges.push_back(directed_edge(at(r, c + 1), at(r, c), capacity));
      }
      if (r + 1 < rows) {
        net.edges.push_back(directed_edge(at(r, c), at(r + 1, c), capacity));
        net.edges.push_back(directed_edge(at(r + 1, c), at(r, c), capacity));
      }
    }
  net.finalize();
  return net;
}

}  // namespace riskte
